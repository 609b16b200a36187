"""
Propuestas adaptativas de las varianzas del DLM.

Las propuestas Gamma = (sigma2_E, sigma2_W) se trabajan en coordenadas
logarítmicas u = (log sigma2_E, log sigma2_W). El prior jerárquico uniforme
(sigma2_E ~ U(0, 1), sigma2_W | sigma2_E ~ U(0, sigma2_E)) tiene allí
densidad exp(u_W) sobre el soporte u_W < u_E < 0.

Rondas:
1. Ronda 0: log-uniforme en log sigma2_E y en log(sigma2_W / sigma2_E)
2. Ronda k >= 1: normal ajustada a todas las propuestas ponderadas hasta
   el momento, con la covarianza inflada y un suelo de dispersión que se
   reduce a la mitad en cada ronda
3. Pesos finales: log-verosimilitud + log prior - log de la mezcla
   determinista de todas las componentes, ponderadas por su tamaño
"""

import logging
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
from scipy.special import logsumexp
from scipy.stats import multivariate_normal

from ..core.errors import ConfigurationError
from ..core.knowledge import PROPOSAL_INFLATION, PROPOSAL_SPREAD_FLOOR, PROPOSAL_VARIANCE_FLOOR
from .resampling import normalized_weights

_log = logging.getLogger(__name__)


def round_sizes(M: int, rounds: int) -> List[int]:
    """
    Reparte M propuestas entre rounds + 1 rondas lo más igualado posible.

    Las rondas que quedarían vacías (M < rounds + 1) se omiten.
    """
    if M < 1:
        raise ConfigurationError(f"proposal count must be >= 1, got {M}")
    if rounds < 0:
        raise ConfigurationError(f"rounds must be >= 0, got {rounds}")
    base, extra = divmod(M, rounds + 1)
    sizes = [base + (1 if k < extra else 0) for k in range(rounds + 1)]
    return [size for size in sizes if size > 0]


def log_prior_density(u: np.ndarray) -> np.ndarray:
    """Log-densidad del prior uniforme jerárquico en coordenadas u."""
    u = np.atleast_2d(u)
    inside = (u[:, 1] < u[:, 0]) & (u[:, 0] < 0.0)
    return np.where(inside, u[:, 1], -np.inf)


@dataclass
class LogUniformComponent:
    """Ronda 0: log sigma2_E y log(sigma2_W / sigma2_E) uniformes en (log floor, 0)."""
    floor: float = PROPOSAL_VARIANCE_FLOOR

    def __post_init__(self):
        if not 0.0 < self.floor < 1.0:
            raise ConfigurationError(f"variance floor must be in (0, 1), got {self.floor}")

    @property
    def span(self) -> float:
        return -float(np.log(self.floor))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        log_obs = rng.uniform(-self.span, 0.0, size=size)
        log_ratio = rng.uniform(-self.span, 0.0, size=size)
        return np.column_stack([log_obs, log_obs + log_ratio])

    def logpdf(self, u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(u)
        ratio = u[:, 1] - u[:, 0]
        inside = ((u[:, 0] > -self.span) & (u[:, 0] < 0.0)
                  & (ratio > -self.span) & (ratio < 0.0))
        return np.where(inside, -2.0 * np.log(self.span), -np.inf)


@dataclass
class GaussianComponent:
    """Ronda k >= 1: normal bivariante en coordenadas u."""
    mean: np.ndarray
    cov: np.ndarray

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return rng.multivariate_normal(self.mean, self.cov, size=size, method="cholesky")

    def logpdf(self, u: np.ndarray) -> np.ndarray:
        return np.atleast_1d(multivariate_normal(self.mean, self.cov).logpdf(np.atleast_2d(u)))


Component = Union[LogUniformComponent, GaussianComponent]


def fit_gaussian(u: np.ndarray, log_weights: np.ndarray, round_index: int,
                 inflation: float = PROPOSAL_INFLATION,
                 spread_floor: float = PROPOSAL_SPREAD_FLOOR) -> GaussianComponent:
    """
    Normal ponderada con covarianza inflation^2 * S + (spread_floor / 2^(k-1))^2 I.

    Raises:
        NoViableProposalError: si ninguna propuesta tiene peso positivo
    """
    if round_index < 1:
        raise ConfigurationError(f"gaussian rounds start at 1, got {round_index}")
    p = normalized_weights(log_weights)
    mean = p @ u
    centred = u - mean
    cov = (centred * p[:, None]).T @ centred
    spread = spread_floor / 2.0 ** (round_index - 1)
    cov = inflation ** 2 * cov + spread ** 2 * np.eye(u.shape[1])
    return GaussianComponent(mean=mean, cov=0.5 * (cov + cov.T))


@dataclass
class AdaptiveProposal:
    """Mezcla determinista de las componentes usadas hasta ahora."""
    floor: float = PROPOSAL_VARIANCE_FLOOR
    inflation: float = PROPOSAL_INFLATION
    spread_floor: float = PROPOSAL_SPREAD_FLOOR
    components: List[Component] = field(default_factory=list)
    counts: List[int] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        """Rondas gaussianas completadas."""
        return max(len(self.components) - 1, 0)

    def draw(self, size: int, rng: np.random.Generator,
             u: np.ndarray = None, log_weights: np.ndarray = None) -> np.ndarray:
        """
        Extrae una nueva ronda.

        La primera ronda es log-uniforme; las siguientes se ajustan a (u, log_weights).
        """
        if not self.components:
            component = LogUniformComponent(self.floor)
        else:
            if u is None or log_weights is None:
                raise ConfigurationError("adaptive rounds need the weighted draws so far")
            component = fit_gaussian(u, log_weights, len(self.components),
                                     self.inflation, self.spread_floor)
            _log.debug("round %d proposal mean=(%.3f, %.3f)", len(self.components),
                       component.mean[0], component.mean[1])
        self.components.append(component)
        self.counts.append(int(size))
        return component.sample(size, rng)

    def mixture_logpdf(self, u: np.ndarray) -> np.ndarray:
        """log sum_j (n_j / n) g_j(u)."""
        if not self.components:
            raise ConfigurationError("no proposal components drawn yet")
        total = float(sum(self.counts))
        terms = np.stack([np.log(count / total) + component.logpdf(u)
                          for component, count in zip(self.components, self.counts)])
        return logsumexp(terms, axis=0)

    def importance_log_weights(self, u: np.ndarray, loglik: np.ndarray) -> np.ndarray:
        """log-verosimilitud + log prior - log mezcla."""
        target = np.asarray(loglik, dtype=float) + log_prior_density(u)
        weights = np.full(target.shape, -np.inf)
        viable = np.isfinite(target)
        if viable.any():
            weights[viable] = target[viable] - self.mixture_logpdf(u[viable])
        return weights
