"""
Modelos de datos para la calibración estadística dinámica.

Este módulo define las estructuras de datos fundamentales:
- DlmSpec / DlmState / ForecastMoments: el modelo lineal dinámico y sus momentos
- RegressionFit / CalEstimate: el ajuste OLS y las estimaciones estáticas
- VariancePair / ScaledCalibration / CalibrationDraws / CalSummarySeries:
  las piezas del algoritmo de calibración dinámica (SIR sobre varianzas)
- SimConfig / SimDataset: el proceso generador del estudio de simulación
- SeriesMetrics / AggregateMetrics: las medidas de evaluación
- RadiometerStream: una serie de voltajes de un radiómetro con dos referencias

Los arrays son numpy; los tipos que se reportan exponen to_dict().
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import ConfigurationError, DegenerateDesignError
from .knowledge import (
    DEFAULT_HORIZON, DEFAULT_LEVEL, DEFAULT_REPLICATES, STEP_LEVELS, THETA_MEAN,
    T_COLD, T_HOT, WALK_SD,
)


class Method(Enum):
    """Métodos de calibración comparados"""
    MD1 = "MD1"    # Dinámico, pendiente filtrada (determinista)
    MD2 = "MD2"    # Dinámico, posterior normal con prior N(0, 1)
    MF1 = "MF1"    # Clásico (Eisenhart)
    MF2 = "MF2"    # Inverso (Krutchkoff)
    MB1 = "MB1"    # Bayesiano de Hoadley
    MB2 = "MB2"    # Bayesiano de Hunter-Lamboy

    @property
    def is_dynamic(self) -> bool:
        return self in (Method.MD1, Method.MD2)

    @property
    def static_method(self) -> "StaticMethod":
        if self.is_dynamic:
            raise ConfigurationError(f"{self.value} is not a static method")
        return _STATIC_BY_METHOD[self]


class StaticMethod(Enum):
    """Estimadores estáticos de primera etapa"""
    CLASSICAL = "classical"
    INVERSE = "inverse"
    HOADLEY = "hoadley"
    HUNTER_LAMBOY = "hunter_lamboy"


_STATIC_BY_METHOD = {
    Method.MF1: StaticMethod.CLASSICAL,
    Method.MF2: StaticMethod.INVERSE,
    Method.MB1: StaticMethod.HOADLEY,
    Method.MB2: StaticMethod.HUNTER_LAMBOY,
}


class RefSet(Enum):
    """Conjuntos de referencias del estudio"""
    TWO = "two"
    FIVE = "five"


class GainKind(Enum):
    """Regímenes de fluctuación de la ganancia"""
    CONSTANT_ZERO = "constant_zero"
    STEPPED = "stepped"
    SINUSOIDAL = "sinusoidal"


class TruthCase(Enum):
    """Caso de la trayectoria verdadera de x0"""
    INTERPOLATION = "interpolation"
    EXTRAPOLATION = "extrapolation"


class ThetaProcess(Enum):
    """Evolución de los coeficientes verdaderos"""
    IID = "iid"
    RANDOM_WALK = "random_walk"


class Md2Sampling(Enum):
    """Momento en que se extrae la perturbación normal de MD2"""
    PER_PROPOSAL = "per_proposal"
    PER_SAMPLE = "per_sample"


class Centering(Enum):
    """Centrado de las respuestas antes del filtro"""
    REFERENCE = "reference"      # media por instante de las r referencias
    CUMULATIVE = "cumulative"    # media acumulada hasta t


# ============================================================
# MODELO LINEAL DINÁMICO
# ============================================================

@dataclass
class DlmSpec:
    """
    Matrices del sistema DLM.

    Y_t = X theta_t + eps_t,  eps_t ~ N(0, E)
    theta_t = G theta_{t-1} + w_t,  w_t ~ N(0, W)
    """
    design: np.ndarray       # X (r x d)
    system: np.ndarray       # G (d x d)
    obs_var: float           # sigma2_E
    sys_var: float           # sigma2_W
    obs_cov: np.ndarray      # E = sigma2_E I (r x r)
    sys_cov: np.ndarray      # W = sigma2_W (X'X)^-1 (d x d)

    def __post_init__(self):
        self.design = np.atleast_2d(np.asarray(self.design, dtype=float))
        r, d = self.design.shape
        if self.system.shape != (d, d):
            raise ConfigurationError(f"system must be {d}x{d}, got {self.system.shape}")
        if self.obs_cov.shape != (r, r):
            raise ConfigurationError(f"obs_cov must be {r}x{r}, got {self.obs_cov.shape}")
        if self.sys_cov.shape != (d, d):
            raise ConfigurationError(f"sys_cov must be {d}x{d}, got {self.sys_cov.shape}")
        if self.obs_var < 0 or self.sys_var < 0:
            raise ConfigurationError("variances must be non-negative")

    @classmethod
    def from_variances(cls, design: np.ndarray, obs_var: float, sys_var: float,
                       system: Optional[np.ndarray] = None) -> "DlmSpec":
        """
        Construye E = sigma2_E I y W = sigma2_W (X'X)^-1.

        Args:
            design: Matriz de diseño X (r x d)
            obs_var: Varianza de observación sigma2_E
            sys_var: Varianza del sistema sigma2_W
            system: Matriz G (identidad por defecto)
        """
        design = np.atleast_2d(np.asarray(design, dtype=float))
        r, d = design.shape
        xtx = design.T @ design
        if np.linalg.matrix_rank(xtx) < d:
            raise DegenerateDesignError("design is rank deficient; X'X is not invertible")
        xtx_inv = np.linalg.inv(xtx)
        xtx_inv = 0.5 * (xtx_inv + xtx_inv.T)
        return cls(
            design=design,
            system=np.eye(d) if system is None else np.asarray(system, dtype=float),
            obs_var=float(obs_var),
            sys_var=float(sys_var),
            obs_cov=float(obs_var) * np.eye(r),
            sys_cov=float(sys_var) * xtx_inv,
        )

    @property
    def r(self) -> int:
        return self.design.shape[0]

    @property
    def d(self) -> int:
        return self.design.shape[1]


@dataclass
class DlmState:
    """Momentos posteriores (m_t, C_t) en el instante t."""
    mean: np.ndarray
    cov: np.ndarray
    time: int = 0

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.cov = np.atleast_2d(np.asarray(self.cov, dtype=float))


@dataclass
class ForecastMoments:
    """Priori (a_t, R_t) y predicción a un paso (f_t, Q_t)."""
    prior_mean: np.ndarray
    prior_cov: np.ndarray
    forecast_mean: np.ndarray
    forecast_cov: np.ndarray


@dataclass
class FilterOutput:
    """Resultado del filtrado hacia delante de una serie completa."""
    means: np.ndarray            # (T, d)
    covs: np.ndarray             # (T, d, d)
    prior_means: np.ndarray      # (T, d)
    prior_covs: np.ndarray       # (T, d, d)
    forecast_means: np.ndarray   # (T, r)
    forecast_covs: np.ndarray    # (T, r, r)
    loglik_terms: np.ndarray     # (T,)
    loglik: float = 0.0

    def __len__(self) -> int:
        return self.means.shape[0]

    def moments(self, t: int) -> ForecastMoments:
        return ForecastMoments(
            prior_mean=self.prior_means[t],
            prior_cov=self.prior_covs[t],
            forecast_mean=self.forecast_means[t],
            forecast_cov=self.forecast_covs[t],
        )


@dataclass
class SlopeFilterBatch:
    """
    Filtro de pendiente (d=1) evaluado para M pares de varianzas a la vez.

    singular_step vale -1 si la propuesta nunca tuvo Q_t singular.
    """
    means: np.ndarray            # (T, M) pendiente filtrada m_t
    covs: np.ndarray             # (T, M) C_t
    trace_q: np.ndarray          # (T, M) tr(Q_t)
    loglik: np.ndarray           # (M,)
    singular_step: np.ndarray    # (M,) int


# ============================================================
# CALIBRACIÓN ESTÁTICA
# ============================================================

@dataclass
class RegressionFit:
    """
    Ajuste OLS directo (y sobre x) e inverso (x sobre y).
    """
    b0: float
    b1: float
    sigma_hat: float
    sxx: float
    syy: float
    x_mean: float
    y_mean: float
    n: int
    phi: float
    delta: float
    sigma_hat_inverse: float = 0.0

    @property
    def sum_x2(self) -> float:
        return self.sxx + self.n * self.x_mean ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "b0": self.b0, "b1": self.b1, "sigma_hat": self.sigma_hat,
            "sxx": self.sxx, "syy": self.syy, "x_mean": self.x_mean,
            "y_mean": self.y_mean, "n": self.n, "phi": self.phi,
            "delta": self.delta, "sigma_hat_inverse": self.sigma_hat_inverse,
        }


@dataclass
class CalEstimate:
    """Estimación puntual e intervalo de un método estático."""
    point: float
    lower: float
    upper: float
    method: StaticMethod
    level: float = DEFAULT_LEVEL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method.value,
            "level": self.level,
        }


# ============================================================
# CALIBRACIÓN DINÁMICA
# ============================================================

@dataclass
class VariancePair:
    """Propuesta Gamma = (sigma2_E, sigma2_W)."""
    obs_var: float
    sys_var: float

    def __post_init__(self):
        if not self.obs_var > 0 or self.sys_var < 0:
            raise ConfigurationError(
                f"invalid variance pair ({self.obs_var}, {self.sys_var})"
            )

    @property
    def in_prior_support(self) -> bool:
        return 0.0 < self.sys_var < self.obs_var < 1.0


@dataclass
class ScaledCalibration:
    """
    Datos escalados y centrados.

    cum_means guarda el centro restado en cada t (media por instante o
    acumulada según centering); y_star e y0_star están divididos por y_scale.
    """
    x_scaled: np.ndarray     # (r,)
    x_mean: float
    x_sd: float
    y_star: np.ndarray       # (T, r)
    y0_star: np.ndarray      # (T,)
    cum_means: np.ndarray    # (T,)
    y_scale: float = 1.0
    centering: Centering = Centering.REFERENCE

    @property
    def T(self) -> int:
        return self.y_star.shape[0]

    @property
    def r(self) -> int:
        return self.x_scaled.shape[0]


@dataclass
class CalibrationDraws:
    """Muestras posteriores de x0t en escala original (N x T)."""
    draws: np.ndarray
    method: Method
    burn_in: int = 0

    @property
    def n_samples(self) -> int:
        return self.draws.shape[0]

    @property
    def T(self) -> int:
        return self.draws.shape[1]


@dataclass
class CalSummarySeries:
    """
    Mediana y bandas por instante.

    start indica el primer t resumido (tras el burn-in).
    """
    median: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float = DEFAULT_LEVEL
    start: int = 0

    def __len__(self) -> int:
        return self.median.shape[0]

    @property
    def t_index(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self))

    def trimmed(self, burn_in: int) -> "CalSummarySeries":
        """Descarta los primeros burn_in instantes."""
        return CalSummarySeries(
            median=self.median[burn_in:],
            lower=self.lower[burn_in:],
            upper=self.upper[burn_in:],
            level=self.level,
            start=self.start + burn_in,
        )


@dataclass
class CalibrationDiagnostics:
    """Diagnósticos del remuestreo SIR y de la inestabilidad de pendiente."""
    acceptance_mass: np.ndarray          # (M,) pesos normalizados
    ess: float
    instability_flags: int               # instantes marcados en todas las propuestas
    rejected_proposals: int              # > fracción máxima de instantes marcados
    singular_proposals: int              # Q_t singular en algún t
    obs_var_mean: float
    sys_var_mean: float
    best_proposal: int
    unique_accepted: int = 0
    proposal_rounds: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_proposals": int(self.acceptance_mass.shape[0]),
            "ess": self.ess,
            "instability_flags": self.instability_flags,
            "rejected_proposals": self.rejected_proposals,
            "singular_proposals": self.singular_proposals,
            "obs_var_mean": self.obs_var_mean,
            "sys_var_mean": self.sys_var_mean,
            "best_proposal": self.best_proposal,
            "best_mass": float(self.acceptance_mass[self.best_proposal]),
            "unique_accepted": self.unique_accepted,
            "proposal_rounds": self.proposal_rounds,
        }


# ============================================================
# ESTUDIO DE SIMULACIÓN
# ============================================================

@dataclass
class SimConfig:
    """
    Configuración de un conjunto de datos simulado.
    """
    refs: RefSet = RefSet.TWO
    T: int = DEFAULT_HORIZON
    obs_var: float = 0.0001
    sys_var: float = 0.00001
    gain: GainKind = GainKind.CONSTANT_ZERO
    truth: TruthCase = TruthCase.INTERPOLATION
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    theta_process: ThetaProcess = ThetaProcess.IID
    interpolation_walk: bool = False
    step_levels: Tuple[float, ...] = STEP_LEVELS
    walk_sd: float = WALK_SD
    theta_mean: Tuple[float, float] = THETA_MEAN

    def __post_init__(self):
        self.refs = RefSet(self.refs)
        self.gain = GainKind(self.gain)
        self.truth = TruthCase(self.truth)
        self.theta_process = ThetaProcess(self.theta_process)

    @property
    def snr(self) -> float:
        return self.obs_var / self.sys_var if self.sys_var > 0 else float("inf")


@dataclass
class SimDataset:
    """Un conjunto de datos del estudio de simulación."""
    design: np.ndarray        # (r, 2)
    theta_path: np.ndarray    # (T, 2) (beta0_t, beta1_t)
    gain_path: np.ndarray     # (T,)
    y_refs: np.ndarray        # (T, r)
    x0_truth: np.ndarray      # (T,)
    y0_obs: np.ndarray        # (T,)

    @property
    def T(self) -> int:
        return self.y_refs.shape[0]

    @property
    def ref_points(self) -> np.ndarray:
        return self.design[:, 1]


# ============================================================
# MÉTRICAS
# ============================================================

@dataclass
class SeriesMetrics:
    """MSE, cobertura y anchura media de una serie calibrada."""
    mse: float
    cp: float
    iw: float
    t_used: int

    def to_dict(self) -> Dict[str, Any]:
        return {"mse": self.mse, "cp": self.cp, "iw": self.iw, "t_used": self.t_used}


@dataclass
class AggregateMetrics:
    """Promedios de las métricas a través de réplicas."""
    av_mse: float
    av_cp: float
    av_iw: float
    replicates: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "av_mse": self.av_mse, "av_cp": self.av_cp,
            "av_iw": self.av_iw, "replicates": self.replicates,
        }


# ============================================================
# RADIÓMETRO
# ============================================================

@dataclass
class RadiometerStream:
    """Serie de voltajes de las cargas fría/caliente y de la escena."""
    t: np.ndarray
    v_cold: np.ndarray
    v_hot: np.ndarray
    v_unknown: np.ndarray
    t_cold: float = T_COLD
    t_hot: float = T_HOT
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.t), len(self.v_cold), len(self.v_hot), len(self.v_unknown)}
        if len(lengths) != 1:
            raise ConfigurationError(f"radiometer channels differ in length: {sorted(lengths)}")
        if not (np.isfinite(self.t_cold) and np.isfinite(self.t_hot)):
            raise ConfigurationError("reference temperatures must be finite")
        if not self.t_cold < self.t_hot:
            raise ConfigurationError(
                f"t_cold ({self.t_cold}) must be below t_hot ({self.t_hot})"
            )

    def __len__(self) -> int:
        return len(self.t)

    @property
    def references(self) -> np.ndarray:
        return np.array([self.t_cold, self.t_hot])

    @property
    def responses(self) -> np.ndarray:
        return np.column_stack([self.v_cold, self.v_hot])
