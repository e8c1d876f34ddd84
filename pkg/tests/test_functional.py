"""Entropy values and their maximization over the class polytopes."""

import math

import numpy as np
import pytest

import oracles
from fermitope import polytope
from fermitope.errors import InfeasiblePolytopeError, InvalidDistributionError
from fermitope.functional import quantum_functional, shannon_entropy
from fermitope.polytope import CLASS_OCCUPATIONS, LinearInequality, PolytopeSpec, class_polytope

REFERENCE = {
    "slater": math.log(3),
    "epr": math.log(108) / 3,
    "w": (2 / 3) * math.log(27 / 2),
    "ghz": math.log(6),
}


class TestShannonEntropy:
    def test_three_point_uniform(self):
        assert shannon_entropy([1 / 3, 1 / 3, 1 / 3, 0, 0, 0]) == pytest.approx(
            math.log(3), abs=1e-12
        )

    def test_deterministic_distribution(self):
        assert shannon_entropy([1, 0, 0, 0, 0, 0]) == 0.0

    def test_six_point_uniform(self):
        assert shannon_entropy(np.full(6, 1 / 6)) == pytest.approx(math.log(6), abs=1e-12)

    def test_negative_entry_raises(self):
        with pytest.raises(InvalidDistributionError):
            shannon_entropy([0.5, 0.6, -0.1])

    def test_unnormalized_raises(self):
        with pytest.raises(InvalidDistributionError):
            shannon_entropy([0.5, 0.4])


class TestQuantumFunctional:
    @pytest.mark.parametrize("label", ["slater", "epr", "w", "ghz"])
    def test_reference_values(self, label):
        result = quantum_functional(class_polytope(label))
        assert result.value == pytest.approx(REFERENCE[label], abs=1e-6)

    @pytest.mark.parametrize("label", ["slater", "epr", "w", "ghz"])
    def test_argmax_is_characteristic_occupation(self, label):
        result = quantum_functional(class_polytope(label))
        assert np.max(np.abs(result.argmax - CLASS_OCCUPATIONS[label])) < 1e-5

    def test_monotone_under_nesting(self):
        values = [
            quantum_functional(class_polytope(label)).value
            for label in ("slater", "epr", "w", "ghz")
        ]
        assert values == sorted(values)
        assert values[0] < values[1] < values[2] < values[3]

    def test_bounds_from_particle_and_mode_count(self):
        for label in ("slater", "epr", "w", "ghz"):
            value = quantum_functional(class_polytope(label)).value
            assert math.log(3) - 1e-9 <= value <= math.log(6) + 1e-9

    @pytest.mark.parametrize("label", ["epr", "w", "ghz"])
    def test_matches_dense_grid_oracle(self, label):
        got = quantum_functional(class_polytope(label)).value
        want = oracles.grid_entropy_maximum(label, step=1e-3)
        assert abs(got - want) < 1e-4

    def test_infeasible_spec_raises(self):
        base = class_polytope("ghz")
        impossible = base.inequalities + (
            LinearInequality((1, 0, 0, 0, 0, 0), 2.0, ">=", "lam1>=2"),
        )
        with pytest.raises(InfeasiblePolytopeError):
            quantum_functional(PolytopeSpec("impossible", impossible))
