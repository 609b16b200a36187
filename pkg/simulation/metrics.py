"""
Medidas de evaluación: MSE, cobertura (CP) y anchura media (IW).

Las funciones son puras; el recorte del burn-in se hace antes de medir
(series_metrics lo aplica sobre un CalSummarySeries).
"""

from typing import Optional, Sequence

import numpy as np

from develop.core.errors import MetricError
from develop.core.models import AggregateMetrics, CalSummarySeries, SeriesMetrics


def _pair(a, b, names: str):
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise MetricError(f"{names}: length mismatch {a.size} vs {b.size}")
    return a, b


def mse(estimates, truth) -> float:
    """(1/T) sum (x_hat - x)^2."""
    estimates, truth = _pair(estimates, truth, "mse")
    if estimates.size == 0:
        raise MetricError("mse needs at least one value")
    return float(np.mean((estimates - truth) ** 2))


def _check_bounds(lower: np.ndarray, upper: np.ndarray) -> None:
    if np.any(lower > upper):
        index = int(np.argmax(lower > upper))
        raise MetricError(f"lower bound exceeds upper bound at index {index}")


def coverage(lower, upper, truth) -> float:
    """Fracción de instantes con L_t < x_t < U_t (desigualdad estricta)."""
    lower, upper = _pair(lower, upper, "coverage")
    lower, truth = _pair(lower, truth, "coverage")
    if lower.size == 0:
        raise MetricError("coverage needs at least one value")
    _check_bounds(lower, upper)
    return float(np.mean((lower < truth) & (truth < upper)))


def interval_width(lower, upper) -> float:
    """(1/T) sum (U_t - L_t)."""
    lower, upper = _pair(lower, upper, "interval_width")
    if lower.size == 0:
        raise MetricError("interval_width needs at least one value")
    _check_bounds(lower, upper)
    return float(np.mean(upper - lower))


def series_metrics(summary: CalSummarySeries, truth, burn_in: int = 0,
                   center: Optional[float] = None, scale: Optional[float] = None) -> SeriesMetrics:
    """
    Métricas de una serie calibrada frente a la verdad.

    Args:
        summary: Resumen; si ya viene recortado (start > 0) se alinea con truth
        truth: Trayectoria verdadera completa (T,)
        burn_in: Instantes iniciales a excluir
        center, scale: Si se dan, todo se mide en z = (x - center) / scale
    """
    truth = np.asarray(truth, dtype=float).reshape(-1)
    first = max(burn_in, summary.start)
    offset = first - summary.start
    median = summary.median[offset:]
    lower = summary.lower[offset:]
    upper = summary.upper[offset:]
    truth = truth[first:first + len(median)]

    if scale is not None:
        if not scale > 0:
            raise MetricError(f"scale must be positive, got {scale}")
        center = 0.0 if center is None else center
        median, lower, upper, truth = ((v - center) / scale for v in (median, lower, upper, truth))

    return SeriesMetrics(
        mse=mse(median, truth),
        cp=coverage(lower, upper, truth),
        iw=interval_width(lower, upper),
        t_used=len(truth),
    )


def aggregate(per_replicate: Sequence[SeriesMetrics]) -> AggregateMetrics:
    """Medias aritméticas a través de réplicas."""
    if len(per_replicate) == 0:
        raise MetricError("aggregate needs at least one replicate")
    return AggregateMetrics(
        av_mse=float(np.mean([m.mse for m in per_replicate])),
        av_cp=float(np.mean([m.cp for m in per_replicate])),
        av_iw=float(np.mean([m.iw for m in per_replicate])),
        replicates=len(per_replicate),
    )
