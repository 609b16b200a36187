"""
Calibración estática: los cuatro métodos de referencia.

- MF1 clásico (Eisenhart): x0 = (y0 - b0) / b1, intervalo de Brown
- MF2 inverso (Krutchkoff): x0 = phi + delta y0, intervalo para E(x0 | y0)
- MB1 Hoadley: posterior t_{n-2} centrada en el estimador inverso
- MB2 Hunter-Lamboy: aproximación normal centrada en el clásico

Todas las funciones aceptan y0 escalar o array (se evalúa elemento a
elemento), lo que permite calibrar una serie completa de una vez.
"""

import logging
from typing import Tuple, Union

import numpy as np
from scipy import stats

from ..core.errors import (
    ConfigurationError, DegenerateDesignError, DegeneratePosteriorError,
    DegenerateResponseError, NearZeroSlopeError,
)
from ..core.knowledge import DEFAULT_LEVEL, SECOND_STAGE_REPLICATES, SLOPE_EPS_RELATIVE
from ..core.models import CalEstimate, CalSummarySeries, Method, RegressionFit, StaticMethod

_log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def ols_fit(x, y) -> RegressionFit:
    """
    Ajusta simultáneamente la recta directa (y sobre x) y la inversa (x sobre y).

    Args:
        x: Valores de referencia (n,)
        y: Respuestas observadas (n,)

    Returns:
        RegressionFit con coeficientes, sumas de cuadrados y sigma_hat
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise ConfigurationError(f"x has {x.size} values but y has {y.size}")
    n = x.size
    if n < 3:
        raise DegenerateDesignError(f"n >= 3 pairs are required for sigma_hat, got {n}")

    x_mean = float(np.mean(x))
    y_mean = float(np.mean(y))
    dx = x - x_mean
    dy = y - y_mean
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateDesignError("reference values are all equal (Sxx = 0)")
    syy = float(dy @ dy)
    sxy = float(dx @ dy)

    b1 = sxy / sxx
    b0 = y_mean - b1 * x_mean
    residuals = y - b0 - b1 * x
    sigma_hat = float(np.sqrt(residuals @ residuals / (n - 2)))

    delta = sxy / syy if syy > 0 else 0.0
    phi = x_mean - delta * y_mean
    inverse_residuals = x - phi - delta * y
    sigma_hat_inverse = float(np.sqrt(inverse_residuals @ inverse_residuals / (n - 2)))

    return RegressionFit(
        b0=b0, b1=b1, sigma_hat=sigma_hat, sxx=sxx, syy=syy,
        x_mean=x_mean, y_mean=y_mean, n=n, phi=phi, delta=delta,
        sigma_hat_inverse=sigma_hat_inverse,
    )


def slope_eps(fit: RegressionFit) -> float:
    """Umbral de pendiente casi nula, relativo a la escala de los datos."""
    return SLOPE_EPS_RELATIVE * float(np.sqrt(fit.syy / fit.sxx))


def _check_slope(fit: RegressionFit) -> None:
    eps = slope_eps(fit)
    if not abs(fit.b1) > eps:
        raise NearZeroSlopeError(fit.b1, eps)


def _t_quantile(level: float, df: int) -> float:
    if not 0.0 < level < 1.0:
        raise ConfigurationError(f"level must be in (0, 1), got {level}")
    return float(stats.t.ppf(0.5 + level / 2.0, df))


def _normal_quantile(level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ConfigurationError(f"level must be in (0, 1), got {level}")
    return float(stats.norm.ppf(0.5 + level / 2.0))


# ============================================================
# MF1 - CLÁSICO
# ============================================================

def classical_point(fit: RegressionFit, y0: ArrayLike) -> ArrayLike:
    """x0 = (y0 - b0) / b1."""
    _check_slope(fit)
    return (np.asarray(y0, dtype=float) - fit.b0) / fit.b1


def classical_interval(fit: RegressionFit, y0: ArrayLike,
                       level: float = DEFAULT_LEVEL) -> Tuple[ArrayLike, ArrayLike]:
    """
    Intervalo de Brown para el estimador clásico.

    Centro x0 (1 + s^2 t^2 / (b1^2 Sxx)) y semianchura
    (s t / |b1|) (1 + 1/(2n) + ((y0 - b0)^2 + s^2 t^2) / (2 b1^2 Sxx)),
    con t el cuantil de Student con n - 2 grados de libertad.
    """
    point = classical_point(fit, y0)
    t = _t_quantile(level, fit.n - 2)
    s2t2 = fit.sigma_hat ** 2 * t ** 2
    b1_sq_sxx = fit.b1 ** 2 * fit.sxx
    center = point * (1.0 + s2t2 / b1_sq_sxx)
    deviation = np.asarray(y0, dtype=float) - fit.b0
    half = abs(fit.sigma_hat * t / fit.b1) * (
        1.0 + 1.0 / (2 * fit.n) + (deviation ** 2 + s2t2) / (2.0 * b1_sq_sxx)
    )
    return center - half, center + half


# ============================================================
# MF2 - INVERSO
# ============================================================

def inverse_point(fit: RegressionFit, y0: ArrayLike) -> ArrayLike:
    """x0 = phi + delta y0."""
    return fit.phi + fit.delta * np.asarray(y0, dtype=float)


def inverse_interval(fit: RegressionFit, y0: ArrayLike,
                     level: float = DEFAULT_LEVEL) -> Tuple[ArrayLike, ArrayLike]:
    """
    Intervalo de predicción de x0 con la regresión inversa.

    La semianchura t s_I sqrt(1 + 1/n + (y0 - y_mean)^2 / Syy) usa la
    desviación residual de la regresión de x sobre y.
    """
    if fit.syy == 0.0:
        raise DegenerateResponseError("responses are constant (Syy = 0)")
    point = inverse_point(fit, y0)
    t = _t_quantile(level, fit.n - 2)
    deviation = np.asarray(y0, dtype=float) - fit.y_mean
    half = t * fit.sigma_hat_inverse * np.sqrt(1.0 + 1.0 / fit.n + deviation ** 2 / fit.syy)
    return point - half, point + half


# ============================================================
# MB1 - HOADLEY
# ============================================================

def hoadley_posterior(fit: RegressionFit, y0: ArrayLike,
                      m: int = SECOND_STAGE_REPLICATES) -> Tuple[ArrayLike, ArrayLike, int]:
    """
    Posterior t_{n-2} de Hoadley (sólo m = 1).

    Localización: estimador inverso. Escala al cuadrado:
    (n + 1 + x0_I^2 / R) / (F + n - 2), con R = F / (F + n - 2) y
    F = b1^2 Sxx / s^2.

    Returns:
        Tupla (localización, escala, grados de libertad)
    """
    if m != 1:
        raise ConfigurationError(f"Hoadley posterior is defined for m = 1 only, got m = {m}")
    if fit.n < 4:
        raise DegenerateDesignError(f"Hoadley posterior needs n >= 4, got {fit.n}")
    if fit.sigma_hat == 0.0:
        raise DegeneratePosteriorError("sigma_hat = 0 makes F infinite")

    F = fit.b1 ** 2 * fit.sxx / fit.sigma_hat ** 2
    R = F / (F + fit.n - 2)
    location = inverse_point(fit, y0)
    scale_sq = (fit.n + 1 + location ** 2 / R) / (F + fit.n - 2)
    return location, np.sqrt(scale_sq), fit.n - 2


def hoadley_interval(fit: RegressionFit, y0: ArrayLike,
                     level: float = DEFAULT_LEVEL) -> Tuple[ArrayLike, ArrayLike]:
    location, scale, df = hoadley_posterior(fit, y0)
    half = _t_quantile(level, df) * scale
    return location - half, location + half


# ============================================================
# MB2 - HUNTER-LAMBOY
# ============================================================

def hunter_lamboy_posterior(fit: RegressionFit, y0: ArrayLike,
                            m: int = SECOND_STAGE_REPLICATES) -> Tuple[ArrayLike, float]:
    """
    Aproximación normal de Hunter-Lamboy.

    Media: estimador clásico. Varianza ((s11 + s33) s22 - s12^2) / (s22 b1^2)
    con S = diag((X'X)^-1 s^2, s^2 / m).

    Returns:
        Tupla (media, varianza)
    """
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m}")
    mean = classical_point(fit, y0)
    s2 = fit.sigma_hat ** 2
    if s2 == 0.0:
        return mean, 0.0

    # (X'X)^-1 = [[sum x^2, -sum x], [-sum x, n]] / (n Sxx)
    s11 = s2 * fit.sum_x2 / (fit.n * fit.sxx)
    s12 = -s2 * fit.x_mean / fit.sxx
    s22 = s2 / fit.sxx
    s33 = s2 / m
    variance = ((s11 + s33) * s22 - s12 ** 2) / (s22 * fit.b1 ** 2)
    return mean, float(variance)


def hunter_lamboy_interval(fit: RegressionFit, y0: ArrayLike, level: float = DEFAULT_LEVEL,
                           m: int = SECOND_STAGE_REPLICATES) -> Tuple[ArrayLike, ArrayLike]:
    mean, variance = hunter_lamboy_posterior(fit, y0, m)
    half = _normal_quantile(level) * np.sqrt(variance)
    return mean - half, mean + half


# ============================================================
# DESPACHO
# ============================================================

def static_estimate(fit: RegressionFit, y0: float, method: StaticMethod,
                    level: float = DEFAULT_LEVEL,
                    m: int = SECOND_STAGE_REPLICATES) -> CalEstimate:
    """
    Estimación puntual e intervalo para un método estático.
    """
    if method is StaticMethod.CLASSICAL:
        point = classical_point(fit, y0)
        lower, upper = classical_interval(fit, y0, level)
    elif method is StaticMethod.INVERSE:
        point = inverse_point(fit, y0)
        lower, upper = inverse_interval(fit, y0, level)
    elif method is StaticMethod.HOADLEY:
        point, _, _ = hoadley_posterior(fit, y0, m)
        lower, upper = hoadley_interval(fit, y0, level)
    else:
        point, _ = hunter_lamboy_posterior(fit, y0, m)
        lower, upper = hunter_lamboy_interval(fit, y0, level, m)
    return CalEstimate(point=float(point), lower=float(lower), upper=float(upper),
                       method=method, level=level)


def calibrate_static(raw_x, raw_y, raw_y0, method: Union[Method, StaticMethod],
                     level: float = DEFAULT_LEVEL) -> CalSummarySeries:
    """
    Calibra una serie y0_t con una única regresión agrupada.

    Todas las parejas (x_j, y_jt) de la serie forman la primera etapa;
    Hoadley se evalúa con x centrado en su media y se desplaza de vuelta.

    Args:
        raw_x: Referencias (r,)
        raw_y: Respuestas de las referencias (T, r)
        raw_y0: Respuestas del objetivo desconocido (T,)
        method: Método estático (Method.MF* / MB* o StaticMethod)
        level: Nivel de los intervalos

    Returns:
        CalSummarySeries con la estimación puntual en median
    """
    if isinstance(method, Method):
        method = method.static_method
    raw_x = np.asarray(raw_x, dtype=float).reshape(-1)
    raw_y = np.atleast_2d(np.asarray(raw_y, dtype=float))
    y0 = np.asarray(raw_y0, dtype=float).reshape(-1)
    if raw_y.shape[1] != raw_x.size or raw_y.shape[0] != y0.size:
        raise ConfigurationError(
            f"responses {raw_y.shape} do not match {raw_x.size} references and {y0.size} targets"
        )

    pooled_x = np.tile(raw_x, raw_y.shape[0])
    pooled_y = raw_y.reshape(-1)

    if method is StaticMethod.HOADLEY:
        # Posterior en x estandarizado: sum x = 0, sum x^2 = n
        x_center, x_sd = float(np.mean(pooled_x)), float(np.std(pooled_x))
        if not x_sd > 0:
            raise DegenerateDesignError("reference values are all equal (Sxx = 0)")
        fit = ols_fit((pooled_x - x_center) / x_sd, pooled_y)
        location, _, _ = hoadley_posterior(fit, y0)
        lower, upper = hoadley_interval(fit, y0, level)
        point = x_center + x_sd * np.asarray(location)
        lower = x_center + x_sd * np.asarray(lower)
        upper = x_center + x_sd * np.asarray(upper)
    else:
        fit = ols_fit(pooled_x, pooled_y)
        if method is StaticMethod.CLASSICAL:
            point = classical_point(fit, y0)
            lower, upper = classical_interval(fit, y0, level)
        elif method is StaticMethod.INVERSE:
            point = inverse_point(fit, y0)
            lower, upper = inverse_interval(fit, y0, level)
        else:
            point, _ = hunter_lamboy_posterior(fit, y0)
            lower, upper = hunter_lamboy_interval(fit, y0, level)

    _log.debug("%s pooled fit: b0=%.6g b1=%.6g sigma=%.3g n=%d",
               method.value, fit.b0, fit.b1, fit.sigma_hat, fit.n)
    return CalSummarySeries(
        median=np.asarray(point, dtype=float).reshape(-1),
        lower=np.asarray(lower, dtype=float).reshape(-1),
        upper=np.asarray(upper, dtype=float).reshape(-1),
        level=level,
    )
