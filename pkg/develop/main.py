"""
Módulo principal del sistema de calibración dinámica.

Este módulo orquesta los seis métodos comparados:
1. MD1: DLM + SIR, pendiente filtrada (determinista)
2. MD2: DLM + SIR, posterior normal con prior N(0, 1)
3. MF1 / MF2: estimadores clásico e inverso sobre un ajuste agrupado
4. MB1 / MB2: posteriores de Hoadley y Hunter-Lamboy

La interfaz común recibe referencias x (r,), respuestas de referencia
(T, r) y la serie del objetivo (T,), y devuelve un resumen por instante.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from .core.errors import ConfigurationError
from .core.knowledge import (
    DEFAULT_C0, DEFAULT_LEVEL, DEFAULT_M0, DEFAULT_PROPOSALS, DEFAULT_SAMPLES,
    DYNAMIC_SLOPE_TOLERANCE, INSTABILITY_REJECT_FRACTION, PROPOSAL_ROUNDS,
)
from .core.models import (
    CalibrationDiagnostics, CalibrationDraws, CalSummarySeries, Centering, Md2Sampling, Method,
)
from .calibration.dynamic import calibrate_dynamic
from .calibration.static import calibrate_static

_log = logging.getLogger(__name__)


@dataclass
class CalibrationConfig:
    """
    Configuración de una calibración.
    """
    n_proposals: int = DEFAULT_PROPOSALS        # M
    n_samples: int = DEFAULT_SAMPLES            # N
    burn_in: int = 0                            # Instantes excluidos del resumen
    level: float = DEFAULT_LEVEL                # Nivel de las bandas
    m0: float = DEFAULT_M0                      # Media inicial de la pendiente
    c0: float = DEFAULT_C0                      # Varianza inicial
    md2_sampling: Md2Sampling = Md2Sampling.PER_SAMPLE
    slope_tolerance: float = DYNAMIC_SLOPE_TOLERANCE
    reject_fraction: float = INSTABILITY_REJECT_FRACTION
    proposal_rounds: int = PROPOSAL_ROUNDS      # 0 = SIR directo desde el prior
    centering: Centering = Centering.REFERENCE
    seed: Optional[int] = None

    def __post_init__(self):
        if self.n_proposals < 1:
            raise ConfigurationError(f"n_proposals must be >= 1, got {self.n_proposals}")
        if self.n_samples < 2:
            raise ConfigurationError(f"n_samples must be >= 2, got {self.n_samples}")
        if self.burn_in < 0:
            raise ConfigurationError(f"burn_in must be >= 0, got {self.burn_in}")
        if not 0.0 < self.level < 1.0:
            raise ConfigurationError(f"level must be in (0, 1), got {self.level}")
        if self.c0 <= 0:
            raise ConfigurationError(f"c0 must be positive, got {self.c0}")
        if self.proposal_rounds < 0:
            raise ConfigurationError(f"proposal_rounds must be >= 0, got {self.proposal_rounds}")
        if self.slope_tolerance < 0:
            raise ConfigurationError(f"slope_tolerance must be >= 0, got {self.slope_tolerance}")
        self.md2_sampling = Md2Sampling(self.md2_sampling)
        self.centering = Centering(self.centering)


@dataclass
class CalibrationResult:
    """
    Resultado de una calibración.
    """
    method: Method
    summary: CalSummarySeries
    processing_time: float
    draws: Optional[CalibrationDraws] = None
    diagnostics: Optional[CalibrationDiagnostics] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def sigma_hat(self) -> float:
        """Desviación típica de la serie calibrada (mediana)."""
        if len(self.summary) < 2:
            return 0.0
        return float(np.std(self.summary.median, ddof=1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "start": self.summary.start,
            "T": len(self.summary),
            "sigma_hat": self.sigma_hat,
            "processing_time": self.processing_time,
            "diagnostics": self.diagnostics.to_dict() if self.diagnostics else None,
            "stats": self.stats,
        }


class DynamicCalibrator:
    """
    Calibrador con interfaz común para los métodos dinámicos y estáticos.

    Los métodos dinámicos derivan su generador del seed de la
    configuración; los estáticos son deterministas.
    """

    def __init__(self, config: Optional[CalibrationConfig] = None):
        """
        Inicializa el calibrador.

        Args:
            config: Configuración opcional
        """
        self.config = config or CalibrationConfig()

    def _rng(self, rng: Optional[np.random.Generator]) -> np.random.Generator:
        if rng is not None:
            return rng
        return np.random.default_rng(self.config.seed)

    def calibrate(self, raw_x, raw_y, raw_y0, method: Union[Method, str],
                  rng: Optional[np.random.Generator] = None) -> CalibrationResult:
        """
        Calibra la serie y0_t con el método indicado.

        Args:
            raw_x: Referencias (r,)
            raw_y: Respuestas de las referencias (T, r)
            raw_y0: Respuestas del objetivo (T,)
            method: Método (Method o su nombre)
            rng: Generador opcional; por defecto se crea desde config.seed

        Returns:
            CalibrationResult con el resumen recortado por burn_in
        """
        method = Method(method) if isinstance(method, str) else method
        cfg = self.config
        start_time = time.perf_counter()

        if method.is_dynamic:
            draws, summary, diagnostics = calibrate_dynamic(
                raw_x, raw_y, raw_y0, method,
                M=cfg.n_proposals, N=cfg.n_samples, burn_in=cfg.burn_in,
                rng=self._rng(rng), level=cfg.level, m0=cfg.m0, c0=cfg.c0,
                md2_sampling=cfg.md2_sampling, slope_tolerance=cfg.slope_tolerance,
                reject_fraction=cfg.reject_fraction, rounds=cfg.proposal_rounds,
                centering=cfg.centering,
            )
            stats = {"n_proposals": cfg.n_proposals, "n_samples": cfg.n_samples,
                     "md2_sampling": cfg.md2_sampling.value,
                     "proposal_rounds": cfg.proposal_rounds,
                     "centering": cfg.centering.value}
        else:
            T = np.atleast_2d(np.asarray(raw_y)).shape[0]
            if not 0 <= cfg.burn_in < T:
                raise ConfigurationError(
                    f"burn_in must satisfy 0 <= burn_in < T={T}, got {cfg.burn_in}"
                )
            summary = calibrate_static(raw_x, raw_y, raw_y0, method, level=cfg.level)
            summary = summary.trimmed(cfg.burn_in)
            draws, diagnostics, stats = None, None, {}

        elapsed = time.perf_counter() - start_time
        _log.debug("%s calibrated %d steps in %.3fs", method.value, len(summary), elapsed)
        return CalibrationResult(
            method=method, summary=summary, processing_time=elapsed,
            draws=draws, diagnostics=diagnostics, stats=stats,
        )

    def calibrate_many(self, raw_x, raw_y, raw_y0, methods: Sequence[Union[Method, str]],
                       rng: Optional[np.random.Generator] = None) -> Dict[Method, CalibrationResult]:
        """
        Calibra la misma serie con varios métodos.

        Cada método dinámico recibe su propia subsecuencia del generador.
        """
        rng = self._rng(rng)
        results = {}
        for method, child in zip(methods, rng.spawn(len(methods))):
            result = self.calibrate(raw_x, raw_y, raw_y0, method, rng=child)
            results[result.method] = result
        return results


def create_calibrator(seed: Optional[int] = None, **overrides) -> DynamicCalibrator:
    """
    Función de conveniencia para crear un calibrador.

    Args:
        seed: Semilla maestra
        **overrides: Campos de CalibrationConfig

    Returns:
        Instancia configurada del calibrador
    """
    return DynamicCalibrator(CalibrationConfig(seed=seed, **overrides))
