"""Gaussian 1-RDM perturbations, violation probabilities, sigma thresholds."""

import numpy as np
import pytest

from fermitope import montecarlo as mc
from fermitope.errors import InvalidDimensionError
from fermitope.montecarlo import (
    PerturbationSpec,
    max_tolerated_sigma,
    merit_histogram,
    merit_samples,
    sample_perturbed_rdm,
    theoretical_rdm,
    violation_probability,
)


class TestPerturbedSampling:
    def test_zero_sigma_returns_theoretical_rdm(self):
        spec = PerturbationSpec("ghz", sigma=0.0, n_samples=3, seed=1)
        assert np.allclose(sample_perturbed_rdm(spec, 0), theoretical_rdm("ghz"))

    def test_site_basis_rdms_are_diagonal(self):
        for base in ("slater", "epr", "w", "ghz"):
            gamma = theoretical_rdm(base)
            assert np.allclose(gamma, np.diag(np.diag(gamma)), atol=1e-12)

    def test_samples_are_hermitian(self):
        spec = PerturbationSpec("w", sigma=0.1, n_samples=5, seed=2)
        for k in range(5):
            gamma = sample_perturbed_rdm(spec, k)
            assert np.max(np.abs(gamma - gamma.conj().T)) < 1e-12

    def test_epr_corner_entry_never_negative(self):
        spec = PerturbationSpec("epr", sigma=0.3, n_samples=500, seed=3)
        draws = np.array([sample_perturbed_rdm(spec, k)[5, 5].real for k in range(500)])
        assert np.all(draws >= 0.0)

    def test_sample_mean_concentrates_on_base(self):
        sigma, n = 0.05, 100_000
        draws = mc._standard_draws(n, 4)
        batch = mc._perturbed_batch("ghz", sigma, draws)
        mean = batch.mean(axis=0)
        tol = 3 * sigma / np.sqrt(n)
        assert np.max(np.abs(mean - theoretical_rdm("ghz"))) < tol

    def test_counter_based_reproducibility(self):
        a = merit_samples("ghz", "f_w", 0.05, 1000, seed=5)
        b = merit_samples("ghz", "f_w", 0.05, 1000, seed=5)
        assert np.array_equal(a, b)

    def test_spec_validation(self):
        with pytest.raises(InvalidDimensionError):
            PerturbationSpec("bell", 0.1, 10, 0)
        with pytest.raises(InvalidDimensionError):
            PerturbationSpec("epr", -0.1, 10, 0)


class TestViolationProbability:
    def test_zero_sigma_concentrates_at_reference_value(self):
        assert violation_probability("epr", "f_slater", 0.0, 1000, seed=0) == 1.0
        assert violation_probability("w", "f_epr", 1e-6, 1000, seed=0) == 1.0

    def test_reference_sigma_keeps_high_confidence(self):
        prob = violation_probability("epr", "f_slater", 0.083, 100_000, seed=1)
        assert prob == pytest.approx(0.999, abs=2e-3)

    def test_large_sigma_loses_confidence(self):
        assert violation_probability("ghz", "f_w", 0.10, 50_000, seed=1) < 0.999

    def test_monotone_non_increasing_in_sigma(self):
        sigmas = np.linspace(0.0, 0.2, 9)
        for base, merit in (("epr", "f_slater"), ("w", "f_epr"), ("ghz", "f_w")):
            probs = [
                violation_probability(base, merit, float(s), 20_000, seed=6)
                for s in sigmas
            ]
            noise_floor = 2 * np.sqrt(0.25 / 20_000)
            assert all(b <= a + noise_floor for a, b in zip(probs, probs[1:]))

    def test_non_canonical_pairing_warns(self):
        with pytest.warns(UserWarning):
            violation_probability("ghz", "f_slater", 0.05, 100, seed=0)


class TestMaxToleratedSigma:
    def test_quick_thresholds_near_reference(self):
        # Coarse 2e4-sample check; the acceptance suite runs the full 1e5.
        for base, merit, ref in (
            ("epr", "f_slater", 0.083),
            ("w", "f_epr", 0.055),
            ("ghz", "f_w", 0.037),
        ):
            got = max_tolerated_sigma(base, merit, n_samples=20_000, seed=8)
            assert got == pytest.approx(ref, abs=0.01)

    def test_deterministic(self):
        a = max_tolerated_sigma("ghz", "f_w", n_samples=5_000, seed=3)
        b = max_tolerated_sigma("ghz", "f_w", n_samples=5_000, seed=3)
        assert a == b

    def test_confidence_validated(self):
        with pytest.raises(InvalidDimensionError):
            max_tolerated_sigma("epr", "f_slater", confidence=0.3, n_samples=100)


class TestHistogram:
    def test_mass_above_zero_matches_confidence_at_threshold(self):
        sigma_star = max_tolerated_sigma("epr", "f_slater", n_samples=50_000, seed=12)
        values = merit_samples("epr", "f_slater", sigma_star, 50_000, seed=12)
        mass_above = float(np.mean(values >= 0))
        assert 0.0 <= mass_above <= 1.5e-3

    def test_histogram_totals(self):
        centers, counts = merit_histogram("ghz", "f_w", 0.05, 5_000, seed=1, bins=50)
        assert counts.sum() == 5_000
        assert len(centers) == 50
