"""
Remuestreo por importancia (SIR) sobre las propuestas de varianza.
"""

import numpy as np
from scipy.special import logsumexp

from ..core.errors import ConfigurationError, NoViableProposalError


def normalized_weights(log_weights) -> np.ndarray:
    """
    p_m = exp(w_m) / sum exp(w), calculado de forma estable.

    Raises:
        NoViableProposalError: si ningún peso es finito
    """
    log_weights = np.asarray(log_weights, dtype=float).reshape(-1)
    if log_weights.size == 0 or not np.any(np.isfinite(log_weights)):
        raise NoViableProposalError("every proposal has log weight -inf")
    if np.any(np.isnan(log_weights)) or np.any(log_weights == np.inf):
        raise ConfigurationError("log weights must be finite or -inf")
    return np.exp(log_weights - logsumexp(log_weights))


def effective_sample_size(probabilities) -> float:
    """ESS = 1 / sum p^2."""
    p = np.asarray(probabilities, dtype=float)
    return float(1.0 / np.sum(p ** 2))


def sir_resample(log_weights, N: int, rng: np.random.Generator) -> np.ndarray:
    """
    Selecciona N índices con reemplazo, con probabilidad proporcional a exp(w).

    Args:
        log_weights: Log-pesos de las M propuestas
        N: Número de series aceptadas
        rng: Generador aleatorio

    Returns:
        Array de N índices en [0, M)
    """
    if N < 1:
        raise ConfigurationError(f"N must be >= 1, got {N}")
    p = normalized_weights(log_weights)
    return rng.choice(p.size, size=N, replace=True, p=p)
