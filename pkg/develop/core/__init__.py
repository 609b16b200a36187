"""
Core: Módulos fundamentales de la calibración.

- models: Dataclasses y enums del dominio
- errors: Jerarquía de excepciones
- knowledge: Constantes del dominio (filtro, simulación, radiómetro)
- dlm: Filtro hacia delante del DLM
"""

from .models import *
from .errors import *
from .dlm import filter_series, filter_slope_batch, initial_state

__all__ = [
    'Method', 'StaticMethod', 'DlmSpec', 'DlmState', 'ForecastMoments', 'FilterOutput',
    'RegressionFit', 'CalEstimate', 'CalSummarySeries', 'SimConfig', 'SimDataset',
    'CalibrationError', 'ConfigurationError', 'NumericalError',
    'filter_series', 'filter_slope_batch', 'initial_state',
]
