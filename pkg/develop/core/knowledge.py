"""
Conocimiento del dominio de calibración.

Este módulo contiene las constantes declarativas del sistema:
- Momentos iniciales y tolerancias del filtro DLM
- Parámetros por defecto de la calibración dinámica (M, N, nivel)
- Proceso generador del estudio de simulación (diseños, varianzas, ganancias)
- Temperaturas de referencia del radiómetro
- Presets de escala (desk / full)

Los valores se cargan desde config/knowledge_base.json para poder
ajustarlos sin modificar código.
"""

import json
import os
from typing import Dict, List, Tuple

# Cargar configuración desde JSON
_config_path = os.path.join(os.path.dirname(__file__), '..', 'config', 'knowledge_base.json')
with open(_config_path, 'r', encoding='utf-8') as f:
    _KB_CONFIG = json.load(f)


# ============================================================
# FILTRO DLM
# ============================================================

DEFAULT_M0: float = _KB_CONFIG['filter']['initial_mean']
DEFAULT_C0: float = _KB_CONFIG['filter']['initial_variance']
SINGULAR_CONDITION: float = _KB_CONFIG['filter']['singular_condition']
PSD_TOLERANCE: float = _KB_CONFIG['filter']['psd_tolerance']


# ============================================================
# CALIBRACIÓN
# ============================================================

DEFAULT_LEVEL: float = _KB_CONFIG['calibration']['level']
SLOPE_EPS_RELATIVE: float = _KB_CONFIG['calibration']['slope_eps_relative']
DEFAULT_PROPOSALS: int = _KB_CONFIG['calibration']['n_proposals']
DEFAULT_SAMPLES: int = _KB_CONFIG['calibration']['n_samples']
INSTABILITY_REJECT_FRACTION: float = _KB_CONFIG['calibration']['instability_reject_fraction']
SECOND_STAGE_REPLICATES: int = _KB_CONFIG['calibration']['second_stage_replicates']

# Umbral de pendiente del filtro, relativo a la pendiente típica escalada
DYNAMIC_SLOPE_TOLERANCE: float = _KB_CONFIG['calibration']['dynamic_slope_tolerance']


# ============================================================
# PROPUESTAS DE VARIANZA
# ============================================================

_PROP = _KB_CONFIG['proposals']

PROPOSAL_ROUNDS: int = _PROP['rounds']
PROPOSAL_VARIANCE_FLOOR: float = _PROP['variance_floor']
PROPOSAL_INFLATION: float = _PROP['inflation']
PROPOSAL_SPREAD_FLOOR: float = _PROP['spread_floor']


# ============================================================
# ESTUDIO DE SIMULACIÓN
# ============================================================

_SIM = _KB_CONFIG['simulation']

THETA_MEAN: Tuple[float, float] = tuple(_SIM['theta_mean'])

REFERENCE_POINTS: Dict[str, Tuple[float, ...]] = {
    k: tuple(v) for k, v in _SIM['reference_points'].items()
}

OBS_VARS: List[float] = list(_SIM['obs_vars'])
SYS_VARS: List[float] = list(_SIM['sys_vars'])

# Niveles del escalón; suman cero
STEP_LEVELS: Tuple[float, ...] = tuple(_SIM['step_levels'])
SINE_AMPLITUDE: float = _SIM['sine_amplitude']
SINE_FREQUENCY: float = _SIM['sine_frequency']

INTERPOLATION_TARGET: float = _SIM['interpolation']['target']
INTERPOLATION_BOUNDS: Tuple[float, float] = (
    _SIM['interpolation']['lower'], _SIM['interpolation']['upper']
)
EXTRAPOLATION_START: float = _SIM['extrapolation']['start']
EXTRAPOLATION_BOUNDS: Tuple[float, float] = (
    _SIM['extrapolation']['lower'], _SIM['extrapolation']['upper']
)
WALK_SD: float = _SIM['walk_sd']
DEFAULT_HORIZON: int = _SIM['horizon']
DEFAULT_REPLICATES: int = _SIM['replicates']


def snr_grid() -> List[Tuple[float, float, float]]:
    """
    Combinaciones (sigma2_E, sigma2_W, r) del estudio.

    Returns:
        Lista de tuplas con r = sigma2_E / sigma2_W redondeado
    """
    return [
        (obs_var, sys_var, round(obs_var / sys_var, 6))
        for obs_var in OBS_VARS
        for sys_var in SYS_VARS
    ]


# ============================================================
# RADIÓMETRO
# ============================================================

_RAD = _KB_CONFIG['radiometer']

T_COLD: float = _RAD['t_cold']
T_HOT: float = _RAD['t_hot']
T_SKY: float = _RAD['t_sky']
T_RECEIVER: float = _RAD['t_receiver']
RADIOMETER_GAIN: float = _RAD['gain']
RADIOMETER_DRIFT: float = _RAD['drift']
RADIOMETER_NOISE_SD: float = _RAD['noise_sd']


# ============================================================
# PRESETS Y ENTORNO
# ============================================================

PRESETS: Dict[str, Dict[str, int]] = _KB_CONFIG['presets']
THREADS_VARIABLE: str = _KB_CONFIG['environment']['threads_variable']
