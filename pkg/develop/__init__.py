"""
Calibración estadística dinámica con Modelos Lineales Dinámicos.

Organización de módulos:
- core: Modelos de datos, errores, conocimiento del dominio y filtro DLM
- calibration: Métodos estáticos, calibración dinámica (SIR) y remuestreo
- config: Archivos JSON de configuración y su cargador
"""

from .core.models import (
    Method, StaticMethod, RefSet, GainKind, TruthCase, ThetaProcess, Md2Sampling, Centering,
    DlmSpec, DlmState, ForecastMoments, FilterOutput, SlopeFilterBatch,
    RegressionFit, CalEstimate, VariancePair, ScaledCalibration,
    CalibrationDraws, CalSummarySeries, CalibrationDiagnostics,
    SimConfig, SimDataset, SeriesMetrics, AggregateMetrics, RadiometerStream,
)

from .core.errors import (
    CalibrationError, ConfigurationError, DegenerateDesignError, DegenerateResponseError,
    DegeneratePosteriorError, NearZeroSlopeError, NumericalError, NoViableProposalError,
    MetricError, ParseError,
)

from .core.dlm import (
    initial_state, predict_state, one_step_forecast, update_posterior,
    filter_series, filter_slope_batch,
)

from .calibration.static import (
    ols_fit, classical_point, classical_interval, inverse_point, inverse_interval,
    hoadley_posterior, hoadley_interval, hunter_lamboy_posterior, hunter_lamboy_interval,
    static_estimate, calibrate_static,
)
from .calibration.dynamic import (
    sample_variance_priors, standardize, run_proposal, run_proposals,
    md1_draw, md2_draw, rescale, unscale, summarize, calibrate_dynamic,
)
from .calibration.resampling import sir_resample, normalized_weights, effective_sample_size

from .main import DynamicCalibrator, CalibrationConfig, CalibrationResult, create_calibrator

__all__ = [
    # Modelos
    'Method', 'StaticMethod', 'RefSet', 'GainKind', 'TruthCase', 'ThetaProcess', 'Md2Sampling',
    'Centering',
    'DlmSpec', 'DlmState', 'ForecastMoments', 'FilterOutput', 'SlopeFilterBatch',
    'RegressionFit', 'CalEstimate', 'VariancePair', 'ScaledCalibration',
    'CalibrationDraws', 'CalSummarySeries', 'CalibrationDiagnostics',
    'SimConfig', 'SimDataset', 'SeriesMetrics', 'AggregateMetrics', 'RadiometerStream',
    # Errores
    'CalibrationError', 'ConfigurationError', 'DegenerateDesignError',
    'DegenerateResponseError', 'DegeneratePosteriorError', 'NearZeroSlopeError',
    'NumericalError', 'NoViableProposalError', 'MetricError', 'ParseError',
    # Filtro DLM
    'initial_state', 'predict_state', 'one_step_forecast', 'update_posterior',
    'filter_series', 'filter_slope_batch',
    # Calibración estática
    'ols_fit', 'classical_point', 'classical_interval', 'inverse_point', 'inverse_interval',
    'hoadley_posterior', 'hoadley_interval', 'hunter_lamboy_posterior',
    'hunter_lamboy_interval', 'static_estimate', 'calibrate_static',
    # Calibración dinámica
    'sample_variance_priors', 'standardize', 'run_proposal', 'run_proposals',
    'md1_draw', 'md2_draw', 'rescale', 'unscale', 'summarize', 'calibrate_dynamic',
    'sir_resample', 'normalized_weights', 'effective_sample_size',
    # Sistema principal
    'DynamicCalibrator', 'CalibrationConfig', 'CalibrationResult', 'create_calibrator',
]
