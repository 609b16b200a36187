"""
Test: Adaptive Variance Proposals
=================================

Round sizes, the prior density in log-variance coordinates, the
log-uniform and Gaussian proposal components, the deterministic mixture
weights and the plain-prior path of sample_proposals.

Run with: pytest tests/cases/test_proposals.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from develop.calibration.dynamic import (
    _sample_variance_arrays, run_proposals, sample_proposals, standardize,
)
from develop.calibration.proposals import (
    AdaptiveProposal, GaussianComponent, LogUniformComponent, fit_gaussian,
    log_prior_density, round_sizes,
)
from develop.core.errors import ConfigurationError, NoViableProposalError
from develop.core.models import GainKind, Method, RefSet, SimConfig
from simulation.generator import gen_dataset


@pytest.fixture(scope="module")
def scaled_data():
    config = SimConfig(refs=RefSet.TWO, T=120, obs_var=1e-4, sys_var=1e-5,
                       gain=GainKind.CONSTANT_ZERO)
    data = gen_dataset(config, rng=np.random.default_rng(77))
    return standardize(data.ref_points, data.y_refs, data.y0_obs)


# ============================================================
# RONDAS Y PRIOR
# ============================================================

class TestRoundSizes:

    def test_even_split(self):
        assert round_sizes(2000, 3) == [500, 500, 500, 500]

    def test_remainder_goes_first(self):
        assert round_sizes(10, 3) == [3, 3, 2, 2]
        assert sum(round_sizes(4999, 3)) == 4999

    def test_fewer_proposals_than_rounds(self):
        assert round_sizes(2, 3) == [1, 1]

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            round_sizes(0, 3)
        with pytest.raises(ConfigurationError):
            round_sizes(10, -1)


class TestPriorDensity:

    def test_support(self):
        u = np.array([[-1.0, -2.0], [-2.0, -1.0], [0.5, -1.0], [-1.0, -1.0]])
        density = log_prior_density(u)
        assert density[0] == -2.0
        assert np.all(np.isneginf(density[1:]))

    def test_matches_uniform_prior_histogram(self):
        # exp(u_W) es la densidad de (log E, log W) bajo E ~ U(0, 1), W | E ~ U(0, E)
        obs_var, sys_var = _sample_variance_arrays(200000, np.random.default_rng(3))
        u = np.column_stack([np.log(obs_var), np.log(sys_var)])
        inside = (u[:, 0] > -1.0) & (u[:, 1] > -2.0) & (u[:, 1] < -1.0)
        mass = np.exp(-1.0) - np.exp(-2.0)
        assert inside.mean() == pytest.approx(mass, rel=0.03)


# ============================================================
# COMPONENTES
# ============================================================

class TestComponents:

    def test_log_uniform_density(self):
        component = LogUniformComponent(1e-10)
        draws = component.sample(5000, np.random.default_rng(1))
        density = component.logpdf(draws)
        assert_allclose(density, -2.0 * np.log(np.log(1e10)))
        assert np.all(np.isfinite(log_prior_density(draws)))
        assert np.isneginf(component.logpdf(np.array([[-30.0, -31.0]])))[0]

    def test_log_uniform_floor_validation(self):
        with pytest.raises(ConfigurationError):
            LogUniformComponent(0.0)

    def test_gaussian_logpdf_single_row(self):
        component = GaussianComponent(mean=np.zeros(2), cov=np.eye(2))
        density = component.logpdf(np.zeros(2))
        assert density.shape == (1,)
        assert density[0] == pytest.approx(-np.log(2 * np.pi))

    def test_fit_gaussian_weighted_moments(self):
        u = np.array([[-5.0, -7.0], [-3.0, -6.0], [-4.0, -9.0]])
        log_weights = np.array([np.log(0.5), np.log(0.5), -np.inf])
        component = fit_gaussian(u, log_weights, round_index=1, inflation=1.0, spread_floor=0.0)
        assert_allclose(component.mean, [-4.0, -6.5])
        assert_allclose(component.cov, [[1.0, 0.5], [0.5, 0.25]])

    def test_spread_floor_halves_each_round(self):
        u = np.array([[-5.0, -7.0]])
        first = fit_gaussian(u, np.zeros(1), round_index=1)
        third = fit_gaussian(u, np.zeros(1), round_index=3)
        assert_allclose(first.cov, np.eye(2))
        assert_allclose(third.cov, 0.0625 * np.eye(2))

    def test_fit_needs_a_viable_draw(self):
        with pytest.raises(NoViableProposalError):
            fit_gaussian(np.zeros((3, 2)), np.full(3, -np.inf), round_index=1)


# ============================================================
# MEZCLA
# ============================================================

class TestMixture:

    def test_single_component_weights(self):
        proposal = AdaptiveProposal(floor=1e-4)
        u = proposal.draw(100, np.random.default_rng(0))
        loglik = np.zeros(100)
        weights = proposal.importance_log_weights(u, loglik)
        assert_allclose(weights, u[:, 1] + 2.0 * np.log(np.log(1e4)))

    def test_mixture_weights_by_count(self):
        proposal = AdaptiveProposal(floor=1e-4)
        rng = np.random.default_rng(1)
        u0 = proposal.draw(300, rng)
        u1 = proposal.draw(100, rng, u0, np.zeros(300))
        u = np.concatenate([u0, u1])
        expected = np.logaddexp(np.log(0.75) + proposal.components[0].logpdf(u),
                                np.log(0.25) + proposal.components[1].logpdf(u))
        assert_allclose(proposal.mixture_logpdf(u), expected, rtol=1e-12)
        assert proposal.rounds == 1

    def test_estimates_prior_mass(self):
        # Con verosimilitud plana, exp(w) estima la masa del prior
        floor = 1e-3
        proposal = AdaptiveProposal(floor=floor)
        rng = np.random.default_rng(4)
        u = proposal.draw(100000, rng)
        u = np.concatenate([u, proposal.draw(100000, rng, u, np.zeros(100000))])
        weights = proposal.importance_log_weights(u, np.zeros(u.shape[0]))
        box = (u[:, 0] > np.log(floor)) & (u[:, 1] - u[:, 0] > np.log(floor))
        estimate = np.mean(np.exp(weights) * box)
        assert estimate == pytest.approx((1.0 - floor) ** 2, rel=0.06)

    def test_gaussian_round_requires_history(self):
        proposal = AdaptiveProposal()
        proposal.draw(10, np.random.default_rng(0))
        with pytest.raises(ConfigurationError):
            proposal.draw(10, np.random.default_rng(1))


# ============================================================
# ORQUESTACIÓN
# ============================================================

class TestSampleProposals:

    def test_zero_rounds_is_plain_prior_sir(self, scaled_data):
        batch = sample_proposals(scaled_data, Method.MD1, 50, np.random.default_rng(9), rounds=0)
        obs_var, sys_var = _sample_variance_arrays(50, np.random.default_rng(9))
        direct = run_proposals(obs_var, sys_var, scaled_data, Method.MD1)
        assert_array_equal(batch.obs_var, obs_var)
        assert_array_equal(batch.log_weights, direct.log_weights)
        assert batch.rounds == 0

    def test_rounds_concatenate(self, scaled_data):
        batch = sample_proposals(scaled_data, Method.MD2, 90, np.random.default_rng(2),
                                 per_proposal_noise=True)
        assert len(batch) == 90
        assert batch.z.shape == (90, scaled_data.T)
        assert batch.md2_mean.shape == (90, scaled_data.T)
        assert batch.rounds == 3
        viable = np.isfinite(batch.log_weights)
        assert np.all(batch.sys_var[viable] < batch.obs_var[viable])
        assert np.all(batch.obs_var[viable] < 1.0)

    def test_posterior_concentrates_near_truth(self, scaled_data):
        batch = sample_proposals(scaled_data, Method.MD1, 1200, np.random.default_rng(5))
        p = np.exp(batch.log_weights - np.logaddexp.reduce(batch.log_weights))
        # sigma2_E verdadero en unidades escaladas
        truth = 1e-4 / scaled_data.y_scale ** 2
        estimate = float(p @ np.log(batch.obs_var))
        assert abs(estimate - np.log(truth)) < 1.0
