"""Simulated measurement of the one-body reduced density matrix.

Diagonal entries are occupation expectations sampled with binomial shot
noise.  An off-diagonal entry gamma_ij is moved onto the diagonal by a
basis change: a swap chain brings site i next to site j, then a quarter
rotation (real part) or a quarter phase followed by a quarter rotation
(imaginary part) maps +-2x or +-2y onto the two measured occupations.
Every measurement setting starts from a fresh copy of the state, and
full reconstruction of a d-mode state uses exactly d^2 settings.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import fock, gates
from .errors import InvalidDimensionError, InvalidGateError
from .fock import MixedState, PureState, occupation_expectation
from .gates import Protocol, gate_matrix, phase_gate, rotation


@dataclass(frozen=True)
class ShotResult:
    """Binomial occupation sample at one site."""

    site: int
    shots: int
    ones: int
    estimate: float
    sigma: float

    def to_json(self) -> dict:
        return {
            "site": self.site,
            "shots": self.shots,
            "ones": self.ones,
            "estimate": self.estimate,
            "sigma": self.sigma,
        }


@dataclass(frozen=True)
class RDMEstimate:
    """Reconstructed 1-RDM with per-entry standard deviations."""

    matrix: np.ndarray
    sigma: np.ndarray
    shots_per_setting: int | None
    settings: int

    def to_json(self) -> dict:
        return {
            "matrix_re": self.matrix.real.tolist(),
            "matrix_im": self.matrix.imag.tolist(),
            "sigma": self.sigma.tolist(),
            "M": self.shots_per_setting,
            "settings": self.settings,
        }


def simulate_occupation_counts(
    state: PureState | MixedState, site: int, shots: int, seed: int
) -> ShotResult:
    """Sample ``shots`` projective occupation measurements of one site."""
    if shots < 1:
        raise InvalidDimensionError("shots must be >= 1")
    p = min(max(occupation_expectation(state, site), 0.0), 1.0)
    rng = np.random.default_rng(seed)
    ones = int(rng.binomial(shots, p))
    estimate = ones / shots
    sigma = math.sqrt(estimate * (1.0 - estimate) / shots)
    return ShotResult(site=site, shots=shots, ones=ones, estimate=estimate, sigma=sigma)


def readout_sequence_offdiag(i: int, j: int, part: str) -> Protocol:
    """Gate sequence mapping Re or Im of gamma_ij onto site occupations.

    Non-adjacent sites are first brought together by pi-rotation swaps
    R_{i,i+1} ... R_{j-2,j-1}; the information then sits on the measured
    pair (j-1, j).
    """
    if i == j:
        raise InvalidGateError("off-diagonal readout needs two distinct sites")
    if not i < j:
        raise InvalidGateError("sites must satisfy i < j")
    if part not in ("real", "imag"):
        raise InvalidGateError(f"part must be 'real' or 'imag', got {part!r}")
    ops = [rotation(k, k + 1, math.pi) for k in range(i, j - 1)]
    if part == "imag":
        ops.append(phase_gate(j - 1, j, math.pi / 2))
    ops.append(rotation(j - 1, j, math.pi / 2))
    return Protocol(label=f"offdiag-{i}-{j}-{part}", gates=tuple(ops))


def _transformed(state: PureState | MixedState, protocol: Protocol):
    if isinstance(state, PureState):
        return gates.apply_protocol(state, protocol)
    u = np.eye(fock.sector_dim(state.d, state.n_particles), dtype=np.complex128)
    for gate in protocol.gates:
        u = gate_matrix(gate, state.d, state.n_particles) @ u
    return MixedState(state.d, state.n_particles, u @ state.matrix @ u.conj().T)


def reconstruct_one_rdm(
    state: PureState | MixedState, shots: int | None, seed: int = 0
) -> RDMEstimate:
    """Estimate the full 1-RDM from d^2 measurement settings.

    ``shots`` measurements are drawn per setting (``None`` uses exact
    expectation values, the infinite-shot limit).  Per-setting seeds are
    spawned deterministically from ``seed``; each setting acts on a fresh
    copy of the state.
    """
    d = state.d
    n_pairs = d * (d - 1) // 2
    n_settings = d + 2 * n_pairs
    seeds = np.random.SeedSequence(seed).spawn(n_settings)
    setting = 0

    gamma = np.zeros((d, d), dtype=np.complex128)
    sigma = np.zeros((d, d), dtype=np.float64)

    for site in range(1, d + 1):
        if shots is None:
            est, sig = occupation_expectation(state, site), 0.0
        else:
            rng = np.random.default_rng(seeds[setting])
            p = min(max(occupation_expectation(state, site), 0.0), 1.0)
            ones = int(rng.binomial(shots, p))
            est = ones / shots
            sig = math.sqrt(est * (1.0 - est) / shots)
        gamma[site - 1, site - 1] = est
        sigma[site - 1, site - 1] = sig
        setting += 1

    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            parts = {}
            errs = {}
            for part in ("real", "imag"):
                transformed = _transformed(state, readout_sequence_offdiag(i, j, part))
                if shots is None:
                    lo, hi = (
                        occupation_expectation(transformed, j - 1),
                        occupation_expectation(transformed, j),
                    )
                    sig_lo = sig_hi = 0.0
                else:
                    rng = np.random.default_rng(seeds[setting])
                    p_lo = min(max(occupation_expectation(transformed, j - 1), 0.0), 1.0)
                    p_hi = min(max(occupation_expectation(transformed, j), 0.0), 1.0)
                    ones_lo = int(rng.binomial(shots, p_lo))
                    ones_hi = int(rng.binomial(shots, p_hi))
                    lo, hi = ones_lo / shots, ones_hi / shots
                    sig_lo = math.sqrt(lo * (1.0 - lo) / shots)
                    sig_hi = math.sqrt(hi * (1.0 - hi) / shots)
                parts[part] = (hi - lo) / 2.0
                errs[part] = math.sqrt(sig_lo**2 + sig_hi**2) / 2.0
                setting += 1
            gamma[i - 1, j - 1] = parts["real"] + 1j * parts["imag"]
            gamma[j - 1, i - 1] = parts["real"] - 1j * parts["imag"]
            sigma[i - 1, j - 1] = sigma[j - 1, i - 1] = math.sqrt(
                errs["real"] ** 2 + errs["imag"] ** 2
            )

    return RDMEstimate(
        matrix=gamma, sigma=sigma, shots_per_setting=shots, settings=n_settings
    )
