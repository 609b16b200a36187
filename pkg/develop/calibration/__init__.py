"""
Calibration: Métodos de calibración.

- static: Los cuatro métodos estáticos de referencia (MF1, MF2, MB1, MB2)
- dynamic: Calibración dinámica por SIR sobre las varianzas (MD1, MD2)
- proposals: Propuestas adaptativas de las varianzas por muestreo de importancia
- resampling: Pesos normalizados, ESS y remuestreo
"""

from .static import (
    ols_fit, static_estimate, calibrate_static,
    classical_point, classical_interval, inverse_point, inverse_interval,
    hoadley_posterior, hoadley_interval, hunter_lamboy_posterior, hunter_lamboy_interval,
)
from .dynamic import (
    sample_variance_priors, standardize, rescale, unscale,
    md1_draw, md2_draw, md2_moments, run_proposal, run_proposals,
    sample_proposals, summarize, calibrate_dynamic, carry_forward, ProposalBatch,
)
from .proposals import AdaptiveProposal, round_sizes, log_prior_density
from .resampling import normalized_weights, effective_sample_size, sir_resample

__all__ = [
    'ols_fit', 'static_estimate', 'calibrate_static',
    'classical_point', 'classical_interval', 'inverse_point', 'inverse_interval',
    'hoadley_posterior', 'hoadley_interval', 'hunter_lamboy_posterior', 'hunter_lamboy_interval',
    'sample_variance_priors', 'standardize', 'rescale', 'unscale',
    'md1_draw', 'md2_draw', 'md2_moments', 'run_proposal', 'run_proposals',
    'sample_proposals', 'summarize', 'calibrate_dynamic', 'carry_forward', 'ProposalBatch',
    'AdaptiveProposal', 'round_sizes', 'log_prior_density',
    'normalized_weights', 'effective_sample_size', 'sir_resample',
]
