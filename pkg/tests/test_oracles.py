import math

import numpy as np
import pytest

from weighted_chi2.distribution import cdf
from weighted_chi2.errors import DomainError, SpecError
from weighted_chi2.model import mean_variance, spec_from_terms
from weighted_chi2.oracles import (
    RNG_NAME,
    SAMPLER_NAME,
    OracleEstimate,
    OracleMethod,
    cf_inversion_cdf,
    make_rng,
    monte_carlo_cdf,
    monte_carlo_cdf_many,
    sample_gamma,
    simulate,
)

LAPLACE = spec_from_terms([(1, 2), (-1, 2)])
HYPOEXPONENTIAL = spec_from_terms([(2, 2), (1, 2)])
EXPONENTIAL = spec_from_terms([(1, 2)])
QUANTILE_LEVELS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def _quantile_points(spec, samples, seed):
    return [float(q) for q in np.quantile(simulate(spec, samples, seed), QUANTILE_LEVELS)]


def _mixed_sign(corpus, count):
    picked = [s for s in corpus if min(s.weights) < 0 < max(s.weights)][:count // 2]
    picked += [s for s in corpus if min(s.weights) > 0][:count - len(picked)]
    return picked


class TestEstimate:

    def test_negative_bound_rejected(self):
        with pytest.raises(ValueError):
            OracleEstimate(0.5, -1e-3, OracleMethod.MONTE_CARLO)

    def test_method_values(self):
        assert OracleMethod("monte_carlo") is OracleMethod.MONTE_CARLO
        assert OracleMethod.CF_INVERSION.value == "cf_inversion"


class TestSampler:

    @pytest.mark.parametrize("seed", [-1, 2 ** 64, 1.5, True, "42"])
    def test_bad_seed(self, seed):
        with pytest.raises(SpecError):
            make_rng(seed)

    def test_shape_below_one(self):
        with pytest.raises(DomainError):
            sample_gamma(make_rng(1), 0.5, 10)

    @pytest.mark.parametrize("dof", [2, 5, 20])
    def test_chi_squared_moments(self, dof):
        n = 200_000
        draws = 2.0 * sample_gamma(make_rng(11), dof / 2.0, n)
        assert draws.shape == (n,)
        assert np.all(draws > 0)
        mean_se = math.sqrt(2.0 * dof / n)
        var_se = math.sqrt((8.0 * dof * dof + 48.0 * dof) / n)
        assert abs(draws.mean() - dof) <= 5 * mean_se
        assert abs(draws.var() - 2 * dof) <= 5 * var_se

    @pytest.mark.slow
    def test_chi_squared_moments_full(self):
        n = 1_000_000
        for dof in (2, 4, 10, 50):
            draws = 2.0 * sample_gamma(make_rng(2024), dof / 2.0, n)
            assert abs(draws.mean() - dof) <= 5 * math.sqrt(2.0 * dof / n)
            assert abs(draws.var() - 2 * dof) <= 5 * math.sqrt((8.0 * dof * dof + 48.0 * dof) / n)

    def test_deterministic(self):
        a = simulate(HYPOEXPONENTIAL, 5000, seed=42)
        b = simulate(HYPOEXPONENTIAL, 5000, seed=42)
        c = simulate(HYPOEXPONENTIAL, 5000, seed=43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_bad_sample_count(self):
        with pytest.raises(SpecError):
            simulate(EXPONENTIAL, 0, 1)


class TestMonteCarlo:

    def test_exponential(self):
        estimate = monte_carlo_cdf(EXPONENTIAL, 2.0, 200_000, 42)
        assert estimate.method is OracleMethod.MONTE_CARLO
        assert abs(estimate.value - (1 - math.exp(-1))) <= 4 * estimate.error_bound

    def test_symmetric(self):
        estimate = monte_carlo_cdf(LAPLACE, 0.0, 200_000, 42)
        assert abs(estimate.value - 0.5) <= 4 * estimate.error_bound

    def test_far_right_is_certain(self):
        mean, variance = mean_variance(HYPOEXPONENTIAL)
        estimate = monte_carlo_cdf(HYPOEXPONENTIAL, mean + 1e6 * math.sqrt(variance), 10_000, 42)
        assert estimate.value == 1.0
        assert estimate.error_bound == 0.0

    def test_metadata(self):
        estimate = monte_carlo_cdf(EXPONENTIAL, 1.0, 1000, 5)
        assert estimate.details == {"rng": RNG_NAME, "sampler": SAMPLER_NAME, "samples": 1000, "seed": 5}

    def test_many_matches_single(self):
        xs = [-1.0, 0.5, 3.0]
        many = monte_carlo_cdf_many(LAPLACE, xs, 20_000, 9)
        for x, estimate in zip(xs, many):
            assert monte_carlo_cdf(LAPLACE, x, 20_000, 9) == estimate

    @pytest.mark.slow
    def test_acceptance_examples(self):
        estimate = monte_carlo_cdf(EXPONENTIAL, 2.0, 1_000_000, 42)
        assert abs(estimate.value - (1 - math.exp(-1))) <= 4 * estimate.error_bound
        estimate = monte_carlo_cdf(LAPLACE, 0.0, 1_000_000, 42)
        assert abs(estimate.value - 0.5) <= 4 * estimate.error_bound


class TestCfInversion:

    @pytest.mark.parametrize("spec, x, expected", [
        (EXPONENTIAL, 2.0, 1 - math.exp(-1.0)),
        (HYPOEXPONENTIAL, 4.0, 1 - 2 * math.exp(-1.0) + math.exp(-2.0)),
        (LAPLACE, 2.0, 1 - 0.5 * math.exp(-1.0)),
        (LAPLACE, 0.0, 0.5),
        (LAPLACE, -2.0, 0.5 * math.exp(-1.0)),
    ])
    def test_examples(self, spec, x, expected):
        estimate = cf_inversion_cdf(spec, x, abs_tol=1e-8)
        assert estimate.method is OracleMethod.CF_INVERSION
        assert estimate.error_bound <= 1e-8
        assert abs(estimate.value - expected) <= 1e-8

    def test_uses_fourier_tail_for_slow_decay(self):
        estimate = cf_inversion_cdf(EXPONENTIAL, 2.0, abs_tol=1e-8)
        assert estimate.details["tail"] == "quadpack fourier"

    def test_analytic_tail_for_fast_decay(self):
        estimate = cf_inversion_cdf(spec_from_terms([(1, 20)]), 20.0, abs_tol=1e-8)
        assert estimate.details["tail"] == "analytic bound"

    @pytest.mark.parametrize("abs_tol", [1e-11, 0.0, -1.0, math.nan])
    def test_tolerance_floor(self, abs_tol):
        with pytest.raises(DomainError):
            cf_inversion_cdf(LAPLACE, 0.0, abs_tol)

    def test_non_finite_x(self):
        with pytest.raises(DomainError):
            cf_inversion_cdf(LAPLACE, math.inf)


class TestAgreement:
    """The analytic cdf against both oracles at Monte Carlo quantiles."""

    def _check(self, spec, samples, seed=42):
        xs = _quantile_points(spec, samples, seed)
        mc = monte_carlo_cdf_many(spec, xs, samples, seed)
        for x, estimate in zip(xs, mc):
            analytic = cdf(spec, x)
            oracle = cf_inversion_cdf(spec, x, abs_tol=1e-8)
            assert abs(analytic - oracle.value) <= 1e-6 + oracle.error_bound, (spec, x)
            assert abs(analytic - estimate.value) <= 4 * estimate.error_bound + 1.0 / samples, (spec, x)
            assert abs(estimate.value - oracle.value) <= 4 * estimate.error_bound + oracle.error_bound + 1.0 / samples

    @pytest.mark.parametrize("spec", [LAPLACE, HYPOEXPONENTIAL, spec_from_terms([(0.5, 4), (-1.5, 2), (2.0, 6)])])
    def test_reference_specs(self, spec):
        self._check(spec, 50_000)

    def test_corpus_sample(self, corpus):
        for spec in _mixed_sign(corpus, 4):
            self._check(spec, 50_000)

    @pytest.mark.slow
    def test_corpus_full(self, corpus):
        for spec in _mixed_sign(corpus, 30):
            self._check(spec, 1_000_000)
