"""
Estudio de simulación y flujos de radiómetro.

- generator: Proceso generador de datos y E/S de conjuntos en CSV
- metrics: MSE, cobertura y anchura de intervalo
- schemas: Rejilla experimental (pydantic)
- experiment: Ejecución de la rejilla y tabla de resultados
- radiometer: Flujo de radiómetro, generador sintético y comparación de métodos
- plot_data: Exportación de series para gráficas
"""

from .generator import (
    make_design, gen_theta_path, gain, gain_path, gen_x0_truth, gen_dataset,
    slope_crossing_dataset, write_dataset_csv, read_dataset_csv,
)
from .metrics import mse, coverage, interval_width, series_metrics, aggregate
from .schemas import Cell, ExperimentGrid
from .experiment import ExperimentRunner, run_experiment, write_results
from .radiometer import (
    calibrate_radiometer, compare_radiometer, synthesize_radiometer,
    read_radiometer_csv, write_radiometer_csv,
)
from .plot_data import emit_plot_data, read_plot_data

__all__ = [
    'make_design', 'gen_theta_path', 'gain', 'gain_path', 'gen_x0_truth', 'gen_dataset',
    'slope_crossing_dataset', 'write_dataset_csv', 'read_dataset_csv',
    'mse', 'coverage', 'interval_width', 'series_metrics', 'aggregate',
    'Cell', 'ExperimentGrid', 'ExperimentRunner', 'run_experiment', 'write_results',
    'calibrate_radiometer', 'compare_radiometer', 'synthesize_radiometer',
    'read_radiometer_csv', 'write_radiometer_csv',
    'emit_plot_data', 'read_plot_data',
]
