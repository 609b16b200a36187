"""
Calibración dinámica por SIR sobre las varianzas del DLM.

Fases del algoritmo:
1. ESCALADO: x estandarizado; respuestas centradas por la media de las
   referencias en cada t y divididas por su RMS
2. PROPUESTAS: M pares Gamma = (sigma2_E, sigma2_W) del soporte
   0 < sigma2_W < sigma2_E < 1, por rondas adaptativas (proposals.py)
   o directamente del prior uniforme jerárquico
3. FILTRADO: para cada propuesta, filtro de pendiente (d=1) sobre los
   datos escalados; peso = log-verosimilitud predictiva corregida por la
   densidad de la propuesta
4. DIBUJO: MD1 divide y0* por la pendiente filtrada; MD2 extrae de
   N(xi / (1 + sigma2_Y), 1 / (1 + sigma2_Y)) con sigma2_Y = tr(Q_t)
5. REMUESTREO: N series con probabilidad proporcional a exp(w)
6. RESUMEN: reescalado a x = X_mean + z sigma_X, mediana y bandas
"""

import logging
from dataclasses import dataclass, fields
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.preprocessing import StandardScaler

from ..core.dlm import filter_slope_batch
from ..core.errors import ConfigurationError, DegenerateDesignError, NearZeroSlopeError
from ..core.knowledge import (
    DEFAULT_C0, DEFAULT_LEVEL, DEFAULT_M0, DEFAULT_PROPOSALS, DEFAULT_SAMPLES,
    DYNAMIC_SLOPE_TOLERANCE, INSTABILITY_REJECT_FRACTION, PROPOSAL_ROUNDS,
)
from ..core.models import (
    CalibrationDiagnostics, CalibrationDraws, CalSummarySeries, Centering, Md2Sampling,
    Method, ScaledCalibration, VariancePair,
)
from .proposals import AdaptiveProposal, log_prior_density, round_sizes
from .resampling import effective_sample_size, normalized_weights, sir_resample

_log = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny
_LOG_2PI = np.log(2.0 * np.pi)

# Varianzas de relleno para propuestas fuera del soporte (peso -inf)
_FILLER_VARIANCES = (0.5, 0.25)


# ============================================================
# PRIORIS Y ESCALADO
# ============================================================

def _sample_variance_arrays(count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    if count < 1:
        raise ConfigurationError(f"proposal count must be >= 1, got {count}")
    obs_var = rng.uniform(_TINY, 1.0, size=count)
    sys_var = obs_var * rng.uniform(_TINY, 1.0, size=count)
    return obs_var, sys_var


def sample_variance_priors(count: int, rng: np.random.Generator) -> List[VariancePair]:
    """
    Extrae M propuestas del prior jerárquico uniforme.

    Cada par cumple 0 < sigma2_W < sigma2_E < 1.
    """
    obs_var, sys_var = _sample_variance_arrays(count, rng)
    return [VariancePair(float(e), float(w)) for e, w in zip(obs_var, sys_var)]


def standardize(raw_x, raw_y, raw_y0,
                centering: Centering = Centering.REFERENCE) -> ScaledCalibration:
    """
    Escala las referencias, centra las respuestas y las lleva a RMS unidad.

    x <- (x - X_mean) / sigma_X con la desviación típica poblacional.
    El centro de cada t es la media de las r respuestas de referencia en t
    (REFERENCE) o de todas las respuestas de referencia hasta t
    (CUMULATIVE). Tras centrar, y* e y0* se dividen por y_scale, la raíz
    de la media de y*^2; y_scale = 1 si las respuestas centradas son nulas.

    Args:
        raw_x: Referencias (r,)
        raw_y: Respuestas de las referencias (T, r)
        raw_y0: Respuestas del objetivo (T,)
        centering: Centro restado a las respuestas
    """
    raw_x = np.asarray(raw_x, dtype=float).reshape(-1)
    raw_y = np.atleast_2d(np.asarray(raw_y, dtype=float))
    raw_y0 = np.asarray(raw_y0, dtype=float).reshape(-1)
    centering = Centering(centering)
    if raw_y.shape[1] != raw_x.size:
        raise ConfigurationError(f"responses have {raw_y.shape[1]} columns for {raw_x.size} references")
    if raw_y.shape[0] != raw_y0.size:
        raise ConfigurationError(f"{raw_y.shape[0]} reference rows but {raw_y0.size} target values")
    if np.unique(raw_x).size < 2:
        raise DegenerateDesignError("at least two distinct reference values are required")

    scaler = StandardScaler().fit(raw_x.reshape(-1, 1))
    x_scaled = scaler.transform(raw_x.reshape(-1, 1)).reshape(-1)

    T, r = raw_y.shape
    if centering is Centering.REFERENCE:
        centers = raw_y.mean(axis=1)
    else:
        centers = np.cumsum(raw_y.sum(axis=1)) / (np.arange(1, T + 1) * r)

    y_star = raw_y - centers[:, None]
    y_scale = float(np.sqrt(np.mean(y_star ** 2))) if T else 0.0
    if not (np.isfinite(y_scale) and y_scale > 0):
        y_scale = 1.0

    return ScaledCalibration(
        x_scaled=x_scaled,
        x_mean=float(scaler.mean_[0]),
        x_sd=float(scaler.scale_[0]),
        y_star=y_star / y_scale,
        y0_star=(raw_y0 - centers) / y_scale,
        cum_means=centers,
        y_scale=y_scale,
        centering=centering,
    )


def rescale(z_series, x_mean: float, x_sd: float) -> np.ndarray:
    """x = X_mean + z sigma_X."""
    if not x_sd > 0:
        raise ConfigurationError(f"x_sd must be positive, got {x_sd}")
    return x_mean + np.asarray(z_series, dtype=float) * x_sd


def unscale(x_series, x_mean: float, x_sd: float) -> np.ndarray:
    """Inversa de rescale."""
    if not x_sd > 0:
        raise ConfigurationError(f"x_sd must be positive, got {x_sd}")
    return (np.asarray(x_series, dtype=float) - x_mean) / x_sd


# ============================================================
# DIBUJOS MD1 / MD2
# ============================================================

def dynamic_slope_eps(scaled: ScaledCalibration, tolerance: float = DYNAMIC_SLOPE_TOLERANCE) -> float:
    """
    Umbral de pendiente casi nula en coordenadas escaladas.

    tolerance * sqrt(mean(y*^2) / mean(x^2)); con los datos de standardize
    ambas medias valen 1 y el umbral es la propia tolerancia.
    """
    spread = np.mean(scaled.y_star ** 2) / np.mean(scaled.x_scaled ** 2)
    return tolerance * float(np.sqrt(spread))


def slope_instability_flags(theta, eps: float) -> np.ndarray:
    """Marca los instantes con |theta_t| <= eps."""
    return ~(np.abs(np.asarray(theta, dtype=float)) > eps)


def md1_draw(theta_t: float, y0_star_t: float, eps: float = 0.0) -> float:
    """
    x0t = y0*_t / theta_t.

    Raises:
        NearZeroSlopeError: si |theta_t| <= eps
    """
    if not abs(theta_t) > eps:
        raise NearZeroSlopeError(theta_t, eps)
    return y0_star_t / theta_t


def md2_moments(xi, sigma2_y) -> Tuple[np.ndarray, np.ndarray]:
    """Media xi / (1 + sigma2_Y) y varianza 1 / (1 + sigma2_Y)."""
    sigma2_y = np.asarray(sigma2_y, dtype=float)
    if np.any(sigma2_y < 0):
        raise ConfigurationError("sigma2_Y must be non-negative")
    shrink = 1.0 / (1.0 + sigma2_y)
    return np.asarray(xi, dtype=float) * shrink, shrink


def md2_draw(xi_t: float, sigma2_y: float, rng: np.random.Generator) -> float:
    """z0t ~ N(xi / (1 + sigma2_Y), 1 / (1 + sigma2_Y))."""
    mean, variance = md2_moments(xi_t, sigma2_y)
    return float(mean + np.sqrt(variance) * rng.standard_normal())


def carry_forward(values: np.ndarray, flags: np.ndarray) -> np.ndarray:
    """
    Sustituye los instantes marcados por el último valor no marcado.

    Un instante marcado sin predecesor válido toma 0.
    """
    values = np.atleast_2d(values)
    flags = np.atleast_2d(flags)
    if not flags.any():
        return values
    K, T = values.shape
    padded = np.concatenate([np.zeros((K, 1)), values], axis=1)
    position = np.where(flags, 0, np.arange(1, T + 1)[None, :])
    position = np.maximum.accumulate(position, axis=1)
    return np.take_along_axis(padded, position, axis=1)



# ============================================================
# PROPUESTAS
# ============================================================

@dataclass
class ProposalBatch:
    """Series escaladas y pesos de M propuestas."""
    z: np.ndarray                 # (M, T)
    log_weights: np.ndarray       # (M,)
    flags: np.ndarray             # (M, T)
    rejected: np.ndarray          # (M,) bool
    singular: np.ndarray          # (M,) bool
    obs_var: np.ndarray           # (M,)
    sys_var: np.ndarray           # (M,)
    md2_mean: Optional[np.ndarray] = None
    md2_var: Optional[np.ndarray] = None
    rounds: int = 0

    def __len__(self) -> int:
        return self.log_weights.shape[0]

    @classmethod
    def concatenate(cls, batches: Sequence["ProposalBatch"]) -> "ProposalBatch":
        """Une lotes sobre el eje de propuestas."""
        if not batches:
            raise ConfigurationError("no proposal batches to concatenate")
        if len(batches) == 1:
            return batches[0]
        joined = {}
        for spec in fields(cls):
            parts = [getattr(batch, spec.name) for batch in batches]
            if spec.name == "rounds":
                joined[spec.name] = max(parts)
            elif any(part is None for part in parts):
                joined[spec.name] = None
            else:
                joined[spec.name] = np.concatenate(parts, axis=0)
        return cls(**joined)


def run_proposals(obs_var, sys_var, scaled: ScaledCalibration, method: Method,
                  noise: Optional[np.ndarray] = None,
                  m0: float = DEFAULT_M0, c0: float = DEFAULT_C0,
                  slope_tolerance: float = DYNAMIC_SLOPE_TOLERANCE,
                  reject_fraction: float = INSTABILITY_REJECT_FRACTION) -> ProposalBatch:
    """
    Filtra y dibuja x0t (escalado) para un lote de propuestas.

    Con centrado por referencias y r > 1, cada fila de y* suma cero y la
    dirección (1, ..., 1) no lleva información; su término gaussiano se
    descuenta de la log-verosimilitud.

    Args:
        obs_var, sys_var: Varianzas de las M propuestas
        scaled: Datos escalados
        method: MD1 o MD2
        noise: Normales estándar (M, T) para MD2; None omite la extracción
            y deja z con las medias posteriores
    """
    if not method.is_dynamic:
        raise ConfigurationError(f"{method.value} is not a dynamic method")
    obs_var = np.asarray(obs_var, dtype=float).reshape(-1)
    sys_var = np.asarray(sys_var, dtype=float).reshape(-1)

    batch = filter_slope_batch(scaled.x_scaled, scaled.y_star, obs_var, sys_var, m0=m0, c0=c0)
    theta = batch.means.T
    eps = dynamic_slope_eps(scaled, slope_tolerance)
    flags = slope_instability_flags(theta, eps)
    safe_theta = np.where(flags, 1.0, theta)
    xi = scaled.y0_star[None, :] / safe_theta

    md2_mean = md2_var = None
    if method is Method.MD1:
        z = xi
    else:
        md2_mean, md2_var = md2_moments(xi, batch.trace_q.T)
        z = md2_mean if noise is None else md2_mean + np.sqrt(md2_var) * noise
    z = carry_forward(z, flags)

    log_weights = batch.loglik.copy()
    if scaled.centering is Centering.REFERENCE and scaled.r > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            null_term = 0.5 * scaled.T * (_LOG_2PI + np.log(obs_var))
        viable = np.isfinite(log_weights)
        log_weights[viable] += null_term[viable]

    rejected = flags.mean(axis=1) > reject_fraction
    log_weights[rejected] = -np.inf
    if rejected.any():
        _log.info("%d proposals rejected for slope instability", int(rejected.sum()))

    return ProposalBatch(
        z=z, log_weights=log_weights, flags=flags, rejected=rejected,
        singular=batch.singular_step >= 0, obs_var=obs_var, sys_var=sys_var,
        md2_mean=md2_mean, md2_var=md2_var,
    )


def run_proposal(pair: VariancePair, scaled: ScaledCalibration, method: Method,
                 rng: Optional[np.random.Generator] = None,
                 **kwargs) -> Tuple[np.ndarray, float]:
    """
    Ejecuta una sola propuesta Gamma.

    Returns:
        Tupla (serie x0t escalada de longitud T, log-peso)
    """
    noise = None
    if method is Method.MD2:
        if rng is None:
            raise ConfigurationError("MD2 requires a random generator")
        noise = rng.standard_normal((1, scaled.T))
    batch = run_proposals([pair.obs_var], [pair.sys_var], scaled, method, noise=noise, **kwargs)
    return batch.z[0], float(batch.log_weights[0])


def _proposal_noise(count: int, T: int, rng: np.random.Generator) -> np.ndarray:
    return np.stack([child.standard_normal(T) for child in rng.spawn(count)])


def sample_proposals(scaled: ScaledCalibration, method: Method, M: int,
                     rng: np.random.Generator, rounds: int = PROPOSAL_ROUNDS,
                     per_proposal_noise: bool = False, **kwargs) -> ProposalBatch:
    """
    Genera y pondera M propuestas.

    Con rounds = 0 las propuestas salen del prior uniforme y el peso es la
    log-verosimilitud. Con rounds >= 1 se reparten entre una ronda
    log-uniforme y rounds rondas normales ajustadas a las anteriores; el
    peso final corrige por la densidad de la mezcla.

    Args:
        scaled: Datos escalados
        method: MD1 o MD2
        M: Número total de propuestas
        rng: Generador maestro
        rounds: Rondas adaptativas
        per_proposal_noise: Extrae una serie de normales por propuesta (MD2)
        **kwargs: Se pasan a run_proposals
    """
    if rounds == 0:
        obs_var, sys_var = _sample_variance_arrays(M, rng)
        noise = _proposal_noise(M, scaled.T, rng) if per_proposal_noise else None
        return run_proposals(obs_var, sys_var, scaled, method, noise=noise, **kwargs)

    proposal = AdaptiveProposal()
    batches: List[ProposalBatch] = []
    u = log_weights = None
    for size in round_sizes(M, rounds):
        drawn = proposal.draw(size, rng, u, log_weights)
        inside = np.isfinite(log_prior_density(drawn))
        with np.errstate(over="ignore"):
            obs_var = np.where(inside, np.exp(drawn[:, 0]), _FILLER_VARIANCES[0])
            sys_var = np.where(inside, np.exp(drawn[:, 1]), _FILLER_VARIANCES[1])
        noise = _proposal_noise(size, scaled.T, rng) if per_proposal_noise else None
        batch = run_proposals(obs_var, sys_var, scaled, method, noise=noise, **kwargs)
        batch.log_weights[~inside] = -np.inf
        batches.append(batch)

        u = np.concatenate([u, drawn]) if u is not None else drawn
        loglik = np.concatenate([b.log_weights for b in batches])
        log_weights = proposal.importance_log_weights(u, loglik)

    combined = ProposalBatch.concatenate(batches)
    combined.log_weights = log_weights
    combined.rounds = proposal.rounds
    _log.debug("%d proposals in %d rounds (%d adaptive)", M, len(batches), proposal.rounds)
    return combined


# ============================================================
# RESUMEN
# ============================================================

def summarize(draws: CalibrationDraws, level: float = DEFAULT_LEVEL) -> CalSummarySeries:
    """
    Mediana y cuantiles (alpha/2, 1 - alpha/2) por instante.

    Usa interpolación lineal entre estadísticos de orden (tipo 7).
    """
    if draws.n_samples < 2:
        raise ConfigurationError(f"at least 2 draws are required, got {draws.n_samples}")
    if not 0.0 < level < 1.0:
        raise ConfigurationError(f"level must be in (0, 1), got {level}")
    alpha = 1.0 - level
    lower, median, upper = np.quantile(
        draws.draws, [alpha / 2.0, 0.5, 1.0 - alpha / 2.0], axis=0, method="linear"
    )
    return CalSummarySeries(median=median, lower=lower, upper=upper, level=level)


def calibrate_dynamic(raw_x, raw_y, raw_y0, method: Method,
                      M: int = DEFAULT_PROPOSALS, N: int = DEFAULT_SAMPLES,
                      burn_in: int = 0, rng: Optional[np.random.Generator] = None,
                      level: float = DEFAULT_LEVEL,
                      m0: float = DEFAULT_M0, c0: float = DEFAULT_C0,
                      md2_sampling: Md2Sampling = Md2Sampling.PER_SAMPLE,
                      slope_tolerance: float = DYNAMIC_SLOPE_TOLERANCE,
                      reject_fraction: float = INSTABILITY_REJECT_FRACTION,
                      rounds: int = PROPOSAL_ROUNDS,
                      centering: Centering = Centering.REFERENCE,
                      ) -> Tuple[CalibrationDraws, CalSummarySeries, CalibrationDiagnostics]:
    """
    Calibración dinámica completa.

    Args:
        raw_x: Referencias (r,)
        raw_y: Respuestas de las referencias (T, r)
        raw_y0: Respuestas del objetivo (T,)
        method: MD1 o MD2
        M: Número de propuestas
        N: Número de series remuestreadas
        burn_in: Instantes iniciales excluidos del resumen
        rng: Generador maestro; de él derivan las subsecuencias por propuesta
        md2_sampling: Perturbación de MD2 por propuesta o por serie remuestreada
        rounds: Rondas adaptativas de propuestas (0 = prior uniforme)
        centering: Centro restado a las respuestas

    Returns:
        Tupla (draws, resumen recortado por burn_in, diagnósticos)
    """
    if not method.is_dynamic:
        raise ConfigurationError(f"{method.value} is not a dynamic method")
    rng = rng if rng is not None else np.random.default_rng()
    md2_sampling = Md2Sampling(md2_sampling)
    scaled = standardize(raw_x, raw_y, raw_y0, centering=centering)
    T = scaled.T
    if not 0 <= burn_in < T:
        raise ConfigurationError(f"burn_in must satisfy 0 <= burn_in < T={T}, got {burn_in}")
    if M < 1 or N < 2:
        raise ConfigurationError(f"need M >= 1 and N >= 2, got M={M}, N={N}")

    per_proposal = method is Method.MD2 and md2_sampling is Md2Sampling.PER_PROPOSAL
    batch = sample_proposals(scaled, method, M, rng, rounds=rounds,
                             per_proposal_noise=per_proposal, m0=m0, c0=c0,
                             slope_tolerance=slope_tolerance, reject_fraction=reject_fraction)
    p = normalized_weights(batch.log_weights)
    indices = sir_resample(batch.log_weights, N, rng)

    if method is Method.MD2 and md2_sampling is Md2Sampling.PER_SAMPLE:
        sample_noise = _proposal_noise(N, T, rng)
        z = batch.md2_mean[indices] + np.sqrt(batch.md2_var[indices]) * sample_noise
        z = carry_forward(z, batch.flags[indices])
    else:
        z = batch.z[indices]

    draws = CalibrationDraws(draws=rescale(z, scaled.x_mean, scaled.x_sd),
                             method=method, burn_in=burn_in)
    summary = summarize(draws, level).trimmed(burn_in)

    best = int(np.argmax(p))
    diagnostics = CalibrationDiagnostics(
        acceptance_mass=p,
        ess=effective_sample_size(p),
        instability_flags=int(batch.flags.sum()),
        rejected_proposals=int(batch.rejected.sum()),
        singular_proposals=int(batch.singular.sum()),
        obs_var_mean=float(p @ batch.obs_var),
        sys_var_mean=float(p @ batch.sys_var),
        best_proposal=best,
        unique_accepted=int(np.unique(indices).size),
        proposal_rounds=batch.rounds,
    )
    _log.info("%s: T=%d M=%d N=%d ESS=%.2f best Gamma=(%.3g, %.3g) y_scale=%.4g",
              method.value, T, M, N, diagnostics.ess, batch.obs_var[best],
              batch.sys_var[best], scaled.y_scale)
    return draws, summary, diagnostics
