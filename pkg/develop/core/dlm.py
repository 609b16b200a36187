"""
Filtro hacia delante del Modelo Lineal Dinámico (DLM).

Implementa los pasos del filtro de West & Harrison con G = I:
- predict_state: priori a_t = G m_{t-1}, R_t = G C_{t-1} G' + W
- one_step_forecast: f_t = X a_t, Q_t = X R_t X' + E
- update_posterior: m_t = a_t + A_t e_t, C_t = R_t - A_t Q_t A_t'
  con la ganancia estándar A_t = R_t X' Q_t^-1
- filter_series: aplicación secuencial y log-verosimilitud predictiva

Además incluye filter_slope_batch, la versión cerrada para d=1 que
evalúa M pares de varianzas en una sola pasada.
"""

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import ConfigurationError, NumericalError
from .knowledge import DEFAULT_C0, DEFAULT_M0, SINGULAR_CONDITION
from .models import DlmSpec, DlmState, FilterOutput, SlopeFilterBatch

_log = logging.getLogger(__name__)

_LOG_2PI = np.log(2.0 * np.pi)

Moments = Tuple[np.ndarray, np.ndarray]


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def initial_state(d: int, m0: float = DEFAULT_M0, c0: float = DEFAULT_C0) -> DlmState:
    """
    Momentos iniciales m_0 = m0 * 1_d, C_0 = c0 * I.
    """
    return DlmState(mean=np.full(d, float(m0)), cov=float(c0) * np.eye(d), time=0)


def predict_state(state: DlmState, spec: DlmSpec) -> Moments:
    """
    Propaga la posterior de t-1 a la priori de t.

    Args:
        state: Posterior (m_{t-1}, C_{t-1})
        spec: Matrices del sistema

    Returns:
        Tupla (a_t, R_t)
    """
    d = spec.d
    if state.mean.shape != (d,) or state.cov.shape != (d, d):
        raise ConfigurationError(
            f"state of dimension {state.mean.shape}/{state.cov.shape} "
            f"does not match spec with d={d}"
        )
    a = spec.system @ state.mean
    R = _symmetrize(spec.system @ state.cov @ spec.system.T + spec.sys_cov)
    return a, R


def one_step_forecast(prior: Moments, spec: DlmSpec) -> Moments:
    """
    Predicción a un paso de la observación.

    Returns:
        Tupla (f_t, Q_t)
    """
    a, R = prior
    d = spec.d
    if np.shape(a) != (d,) or np.shape(R) != (d, d):
        raise ConfigurationError(f"prior moments do not match spec with d={d}")
    f = spec.design @ a
    Q = _symmetrize(spec.design @ R @ spec.design.T + spec.obs_cov)
    return f, Q


def _factor_forecast_cov(Q: np.ndarray, t: int):
    """Cholesky de Q_t; error numérico si es singular o mal condicionada."""
    with np.errstate(all="ignore"):
        condition = np.linalg.cond(Q)
    if not np.isfinite(condition) or condition > SINGULAR_CONDITION:
        raise NumericalError(
            f"one-step forecast covariance is singular (cond={condition:.3e})", t=t
        )
    try:
        return cho_factor(Q, lower=True)
    except LinAlgError as exc:
        raise NumericalError(f"one-step forecast covariance is not positive definite: {exc}",
                             t=t) from exc


def _gaussian_logpdf(error: np.ndarray, factor) -> float:
    chol, _ = factor
    log_det = 2.0 * np.sum(np.log(np.abs(np.diag(chol))))
    quad = float(error @ cho_solve(factor, error))
    return -0.5 * (error.size * _LOG_2PI + log_det + quad)


def _posterior(prior: Moments, forecast: Moments, obs: np.ndarray,
               spec: DlmSpec, t: int):
    a, R = prior
    f, Q = forecast
    obs = np.asarray(obs, dtype=float).reshape(-1)
    if obs.shape != (spec.r,):
        raise ConfigurationError(f"observation of length {obs.size}, expected r={spec.r}")

    factor = _factor_forecast_cov(Q, t)
    error = obs - f
    # A_t' = Q^-1 X R  (R simétrica)
    gain = cho_solve(factor, spec.design @ R).T
    mean = a + gain @ error
    cov = _symmetrize(R - gain @ Q @ gain.T)
    return DlmState(mean=mean, cov=cov, time=t), _gaussian_logpdf(error, factor)


def update_posterior(prior: Moments, forecast: Moments, obs: Union[np.ndarray, Sequence[float]],
                     spec: DlmSpec, t: int = 1) -> DlmState:
    """
    Actualiza la priori con la observación Y_t.

    Args:
        prior: (a_t, R_t)
        forecast: (f_t, Q_t)
        obs: Observación Y_t (longitud r)
        spec: Matrices del sistema
        t: Índice temporal (se reporta si Q_t es singular)

    Returns:
        Posterior (m_t, C_t) en el instante t
    """
    state, _ = _posterior(prior, forecast, obs, spec, t)
    return state


def filter_series(spec: DlmSpec, observations, init: Optional[DlmState] = None) -> FilterOutput:
    """
    Filtra una serie completa y acumula la log-verosimilitud predictiva.

    Args:
        spec: Matrices del sistema
        observations: Secuencia de T observaciones de longitud r
        init: Estado inicial (m_0, C_0) con time=0

    Returns:
        FilterOutput con momentos por instante y log-verosimilitud total
    """
    state = init if init is not None else initial_state(spec.d)
    if state.time != 0:
        raise ConfigurationError(f"initial state must have time=0, got {state.time}")

    obs = np.asarray(observations, dtype=float)
    if obs.size == 0:
        obs = obs.reshape(0, spec.r)
    elif obs.ndim == 1:
        obs = obs.reshape(-1, spec.r) if spec.r > 1 else obs.reshape(-1, 1)
    if obs.ndim != 2 or obs.shape[1] != spec.r:
        raise ConfigurationError(f"observations must be T x {spec.r}, got {obs.shape}")

    T, r, d = obs.shape[0], spec.r, spec.d
    out = FilterOutput(
        means=np.empty((T, d)), covs=np.empty((T, d, d)),
        prior_means=np.empty((T, d)), prior_covs=np.empty((T, d, d)),
        forecast_means=np.empty((T, r)), forecast_covs=np.empty((T, r, r)),
        loglik_terms=np.empty(T),
    )

    for i in range(T):
        prior = predict_state(state, spec)
        forecast = one_step_forecast(prior, spec)
        state, loglik = _posterior(prior, forecast, obs[i], spec, t=i + 1)
        out.prior_means[i], out.prior_covs[i] = prior
        out.forecast_means[i], out.forecast_covs[i] = forecast
        out.means[i], out.covs[i] = state.mean, state.cov
        out.loglik_terms[i] = loglik

    out.loglik = float(np.sum(out.loglik_terms))
    _log.debug("filtered %d steps (r=%d, d=%d), loglik=%.6g", T, r, d, out.loglik)
    return out


def filter_slope_batch(x_scaled: np.ndarray, y_star: np.ndarray,
                       obs_var: np.ndarray, sys_var: np.ndarray,
                       m0: float = DEFAULT_M0, c0: float = DEFAULT_C0) -> SlopeFilterBatch:
    """
    Filtro de pendiente (d=1, X = x_scaled) para M propuestas a la vez.

    Con s = x'x y W = sigma2_W / s, Q_t = sigma2_E I + R_t x x' es de rango
    uno sobre la identidad y admite forma cerrada:
        m_t = a_t + R_t x'e / (sigma2_E + R_t s)
        C_t = R_t sigma2_E / (sigma2_E + R_t s)

    Una propuesta con Q_t singular deja de acumular verosimilitud y
    termina con log-verosimilitud -inf.

    Args:
        x_scaled: Referencias escaladas (r,)
        y_star: Respuestas centradas (T, r)
        obs_var: sigma2_E por propuesta (M,)
        sys_var: sigma2_W por propuesta (M,)

    Returns:
        SlopeFilterBatch con momentos (T, M) y log-verosimilitudes (M,)
    """
    x = np.asarray(x_scaled, dtype=float).reshape(-1)
    y_star = np.atleast_2d(np.asarray(y_star, dtype=float))
    obs_var = np.asarray(obs_var, dtype=float).reshape(-1)
    sys_var = np.asarray(sys_var, dtype=float).reshape(-1)
    if y_star.shape[1] != x.size:
        raise ConfigurationError(f"y_star has {y_star.shape[1]} columns, expected {x.size}")
    if obs_var.shape != sys_var.shape:
        raise ConfigurationError("obs_var and sys_var must have the same length")

    T, r, M = y_star.shape[0], x.size, obs_var.size
    s = float(x @ x)
    if s <= 0:
        raise ConfigurationError("x_scaled must not be identically zero")

    W = sys_var / s
    m = np.full(M, float(m0))
    C = np.full(M, float(c0))
    loglik = np.zeros(M)
    singular_step = np.full(M, -1, dtype=int)
    means = np.empty((T, M))
    covs = np.empty((T, M))
    trace_q = np.empty((T, M))

    with np.errstate(divide="ignore", invalid="ignore"):
        log_obs_var = np.log(obs_var)
        for i in range(T):
            R = C + W
            error = y_star[i][None, :] - m[:, None] * x[None, :]
            xe = error @ x
            ee = np.einsum("ij,ij->i", error, error)
            denom = obs_var + R * s

            if r > 1:
                bad = ~(obs_var > 0) | ~(denom / obs_var <= SINGULAR_CONDITION)
            else:
                bad = ~(denom > 0)
            newly = bad & (singular_step < 0)
            singular_step[newly] = i + 1

            quad = (ee - R * xe ** 2 / denom) / obs_var
            terms = -0.5 * (r * _LOG_2PI + (r - 1) * log_obs_var + np.log(denom) + quad)
            loglik += np.where(singular_step < 0, terms, 0.0)

            m = np.where(bad, m, m + R * xe / denom)
            C = np.where(bad, R, R * obs_var / denom)
            means[i], covs[i] = m, C
            trace_q[i] = r * obs_var + R * s

    loglik[singular_step >= 0] = -np.inf
    n_singular = int(np.count_nonzero(singular_step >= 0))
    if n_singular:
        _log.warning("%d of %d proposals hit a singular forecast covariance", n_singular, M)
    return SlopeFilterBatch(means=means, covs=covs, trace_q=trace_q,
                            loglik=loglik, singular_step=singular_step)
