import cmath
import json
import math

import numpy as np
import pytest

from weighted_chi2.errors import DomainError, SpecError
from weighted_chi2.model import (
    Term,
    WeightedSumSpec,
    characteristic_function,
    mean_variance,
    mgf,
    mgf_domain,
    spec_from_terms,
    standard_deviation,
)


class TestSpec:

    def test_term_normalises_types(self):
        term = Term(2, 4.0)
        assert term.weight == 2.0 and isinstance(term.weight, float)
        assert term.dof == 4 and isinstance(term.dof, int)
        assert term.order == 2

    @pytest.mark.parametrize("weight", [0, 0.0, math.nan, math.inf, -math.inf, True, "1"])
    def test_bad_weight(self, weight):
        with pytest.raises(SpecError):
            Term(weight, 2)

    @pytest.mark.parametrize("dof", [0, 1, 3, -2, 2.5, True, "2", math.nan])
    def test_bad_dof(self, dof):
        with pytest.raises(SpecError):
            Term(1.0, dof)

    def test_empty_spec(self):
        with pytest.raises(SpecError):
            WeightedSumSpec(())

    def test_from_pairs(self):
        spec = WeightedSumSpec.from_pairs([2, -1], 6)
        assert spec.weights == [2.0, -1.0]
        assert spec.dofs == [6, 6]
        assert spec.common_dof == 6
        assert spec.total_order == 6

        spec = WeightedSumSpec.from_pairs([1, 2], [2, 4])
        assert spec.common_dof is None
        assert spec.total_order == 3

        with pytest.raises(SpecError):
            WeightedSumSpec.from_pairs([1, 2, 3], [2, 4])

    def test_specs_are_hashable_values(self):
        a = spec_from_terms([(1.0, 2), (2.0, 4)])
        b = WeightedSumSpec.from_pairs([1, 2], [2, 4])
        assert a == b
        assert hash(a) == hash(b)

    def test_json_round_trip(self, tmp_path):
        spec = WeightedSumSpec.from_pairs([0.3, -1.7, 4.0], [2, 8, 4])
        path = tmp_path / "spec.json"
        spec.to_json(str(path))
        assert WeightedSumSpec.from_json(str(path)) == spec

    def test_from_dict_accepts_integral_floats(self):
        spec = WeightedSumSpec.from_dict({"terms": [{"weight": 1.5, "dof": 4.0}]})
        assert spec.dofs == [4]

    @pytest.mark.parametrize("data", [
        [],
        {"terms": {}},
        {"term": []},
        {"terms": [{"weight": 1.0}]},
        {"terms": [{"weight": 1.0, "dof": 3}]},
        {"terms": []},
    ])
    def test_from_dict_rejects(self, data):
        with pytest.raises(SpecError):
            WeightedSumSpec.from_dict(data)

    def test_from_json_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SpecError):
            WeightedSumSpec.from_json(str(path))

    def test_from_json_rejects_non_utf8(self, tmp_path):
        path = tmp_path / "utf16.json"
        path.write_bytes(b"\xff\xfe{\x00}\x00")
        with pytest.raises(SpecError, match="not UTF-8"):
            WeightedSumSpec.from_json(str(path))


class TestMgf:

    def test_examples(self):
        spec = WeightedSumSpec.from_pairs([2, 1], 2)
        assert mgf(spec, 0.0) == 1.0
        assert mgf(spec, 0.1) == pytest.approx(1.0 / (0.6 * 0.8), rel=1e-14)
        assert mgf(WeightedSumSpec.from_pairs([1], 4), 0.25) == pytest.approx(4.0, rel=1e-14)

    @pytest.mark.parametrize("weights, lower, upper", [
        ([2, 1], -math.inf, 0.25),
        ([1, -1], -0.5, 0.5),
        ([-3], -1.0 / 6.0, math.inf),
    ])
    def test_domain(self, weights, lower, upper):
        domain = mgf_domain(WeightedSumSpec.from_pairs(weights, 2))
        assert domain.lower == pytest.approx(lower)
        assert domain.upper == pytest.approx(upper)
        assert 0.0 in domain

    def test_outside_domain(self):
        spec = WeightedSumSpec.from_pairs([1, -1], 2)
        for t in (0.5, -0.5, 0.7, math.nan, math.inf):
            with pytest.raises(DomainError):
                mgf(spec, t)

    def test_matches_naive_product(self):
        spec = WeightedSumSpec.from_pairs([1.3, -0.4, 2.2], [2, 6, 4])
        domain = mgf_domain(spec)
        for t in np.linspace(domain.lower, domain.upper, 22)[1:-1]:
            naive = 1.0
            for term in spec.terms:
                naive *= (1.0 - 2.0 * term.weight * t) ** (-term.dof / 2)
            assert mgf(spec, t) == pytest.approx(naive, rel=1e-12)

    def test_derivative_at_zero_is_mean(self):
        spec = WeightedSumSpec.from_pairs([1.3, -0.4, 2.2], [2, 6, 4])
        h = 1e-6
        slope = (mgf(spec, h) - mgf(spec, -h)) / (2 * h)
        assert slope == pytest.approx(mean_variance(spec)[0], rel=1e-4)


class TestCharacteristicFunction:

    def test_examples(self):
        spec = WeightedSumSpec.from_pairs([1], 2)
        assert characteristic_function(spec, 0.0) == 1 + 0j
        assert characteristic_function(spec, 0.5) == pytest.approx(0.5 + 0.5j, abs=1e-15)

    def test_principal_branch_for_higher_orders(self):
        spec = WeightedSumSpec.from_pairs([1.5, -0.7], [6, 4])
        for u in (0.1, 0.9, 3.0, 11.0):
            expected = (1 - 3j * u) ** -3 * (1 + 1.4j * u) ** -2
            assert characteristic_function(spec, u) == pytest.approx(expected, rel=1e-12)

    def test_hermitian_and_modulus(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            k = int(rng.integers(1, 5))
            weights = rng.choice([-1, 1], size=k) * rng.uniform(0.2, 5, size=k)
            dofs = 2 * rng.integers(1, 8, size=k)
            spec = WeightedSumSpec.from_pairs(list(weights), list(dofs))
            u = float(rng.uniform(-3, 3))
            phi = characteristic_function(spec, u)
            assert characteristic_function(spec, -u) == pytest.approx(phi.conjugate(), rel=1e-12, abs=1e-300)
            modulus = math.prod((1 + 4 * w * w * u * u) ** (-n / 4) for w, n in zip(weights, dofs))
            assert abs(phi) == pytest.approx(modulus, rel=1e-12)
            assert abs(phi) <= 1.0

    def test_array_input(self):
        spec = WeightedSumSpec.from_pairs([2, 1], 2)
        us = np.array([0.0, 0.3, 1.0])
        values = characteristic_function(spec, us)
        assert values.shape == (3,)
        for u, value in zip(us, values):
            assert value == pytest.approx(1 / ((1 - 4j * u) * (1 - 2j * u)), rel=1e-13)
            assert cmath.isfinite(value)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            characteristic_function(WeightedSumSpec.from_pairs([1], 2), math.inf)


class TestMoments:

    @pytest.mark.parametrize("pairs, mean, variance", [
        ([(2, 2), (1, 2)], 6.0, 20.0),
        ([(1, 2), (-1, 2)], 0.0, 8.0),
        ([(1, 4)], 4.0, 8.0),
    ])
    def test_examples(self, pairs, mean, variance):
        spec = spec_from_terms(pairs)
        assert mean_variance(spec) == pytest.approx((mean, variance))
        assert standard_deviation(spec) == pytest.approx(math.sqrt(variance))

    def test_spec_json_document_shape(self, tmp_path):
        spec = spec_from_terms([(1.0, 2), (-0.5, 4)])
        path = tmp_path / "spec.json"
        spec.to_json(str(path))
        assert json.loads(path.read_text()) == {
            "terms": [{"weight": 1.0, "dof": 2}, {"weight": -0.5, "dof": 4}]
        }
