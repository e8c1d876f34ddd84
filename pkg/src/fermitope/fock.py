"""Exact few-fermion states on fixed particle-number sectors.

Conventions used throughout the package:

* Sites (modes) are numbered 1..d, site 1 being the leftmost entry of an
  occupation string such as ``"101010"`` (electrons on sites 1, 3, 5).
* A sector basis is ordered lexicographically with occupied before empty,
  i.e. by decreasing value of the occupation string read as a binary
  number.  ``sector_basis(6, 3)[0]`` is ``|111000>``.
* Ladder operators follow the ordering
  ``|n_1 .. n_d> = (a_1^+)^{n_1} .. (a_d^+)^{n_d} |0>``, so acting on
  site ``i`` picks up the parity of the occupied sites with index
  strictly below ``i``.

All state values are immutable; operations return new values.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Literal

import numpy as np

from .errors import (
    DegenerateInputError,
    InvalidDimensionError,
    InvalidRDMError,
    SectorMismatchError,
    ZeroStateError,
)

MAX_MODES = 24

# Construction / eigensolver / property-test tolerances.
ATOL_STATE = 1e-12
ATOL_EIG = 1e-10


def _check_sector(d: int, n_particles: int) -> None:
    if not (isinstance(d, int) and isinstance(n_particles, int)):
        raise InvalidDimensionError("mode and particle counts must be integers")
    if not (1 <= d <= MAX_MODES):
        raise InvalidDimensionError(f"mode count d={d} outside 1..{MAX_MODES}")
    if not (0 <= n_particles <= d):
        raise InvalidDimensionError(
            f"particle count N={n_particles} outside 0..{d}"
        )


def sector_dim(d: int, n_particles: int) -> int:
    """Dimension binomial(d, N) of the N-particle sector on d modes."""
    _check_sector(d, n_particles)
    return math.comb(d, n_particles)


@lru_cache(maxsize=None)
def _sector_masks(d: int, n_particles: int) -> np.ndarray:
    """Occupation bitmasks of the sector, descending (site 1 = bit d-1)."""
    _check_sector(d, n_particles)
    masks = np.fromiter(
        (
            sum(1 << (d - 1 - pos) for pos in combo)
            for combo in combinations(range(d), n_particles)
        ),
        dtype=np.int64,
        count=math.comb(d, n_particles),
    )
    masks.flags.writeable = False
    return masks


@lru_cache(maxsize=None)
def _sector_index(d: int, n_particles: int) -> dict[int, int]:
    return {int(m): i for i, m in enumerate(_sector_masks(d, n_particles))}


@lru_cache(maxsize=None)
def _occupation_table(d: int, n_particles: int) -> np.ndarray:
    """(dim, d) 0/1 table; column s-1 is the occupation of site s."""
    masks = _sector_masks(d, n_particles)
    table = (masks[:, None] >> np.arange(d - 1, -1, -1)[None, :]) & 1
    table = table.astype(np.float64)
    table.flags.writeable = False
    return table


def _site_bit(d: int, site: int) -> int:
    if not 1 <= site <= d:
        raise InvalidDimensionError(f"site {site} outside 1..{d}")
    return d - site


@dataclass(frozen=True)
class BasisState:
    """A single occupation-number basis vector."""

    occupations: str
    weight: int

    def __post_init__(self) -> None:
        if set(self.occupations) - {"0", "1"}:
            raise InvalidDimensionError("occupations must be a 0/1 string")
        if self.occupations.count("1") != self.weight:
            raise InvalidDimensionError("weight must equal the number of set bits")

    @property
    def d(self) -> int:
        return len(self.occupations)

    @property
    def mask(self) -> int:
        return int(self.occupations, 2)

    @classmethod
    def from_mask(cls, d: int, mask: int) -> "BasisState":
        occ = format(mask, f"0{d}b")
        return cls(occupations=occ, weight=occ.count("1"))

    def __str__(self) -> str:
        return f"|{self.occupations}>"


def sector_basis(d: int, n_particles: int) -> list[BasisState]:
    """Ordered basis of the fixed-N sector (lexicographic, occupied first)."""
    return [BasisState.from_mask(d, int(m)) for m in _sector_masks(d, n_particles)]


def _as_amplitudes(d: int, n_particles: int, amplitudes) -> np.ndarray:
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.shape != (sector_dim(d, n_particles),):
        raise InvalidDimensionError(
            f"amplitude vector must have length {sector_dim(d, n_particles)}"
        )
    if not (np.all(np.isfinite(amps.real)) and np.all(np.isfinite(amps.imag))):
        raise InvalidDimensionError("amplitudes must be finite")
    return amps


@dataclass(frozen=True)
class PureState:
    """Amplitude vector over the fixed-N occupation basis of d modes.

    The vector is stored as given; use :meth:`normalized` before treating
    it as a physical state.  Operator actions (e.g. annihilating an empty
    mode) may legitimately return the zero vector.
    """

    d: int
    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = _as_amplitudes(self.d, self.n_particles, self.amplitudes)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_zero(self) -> bool:
        return self.norm <= ATOL_STATE

    def normalized(self) -> "PureState":
        n = self.norm
        if n <= ATOL_STATE:
            raise ZeroStateError("cannot normalize a zero vector")
        return PureState(self.d, self.n_particles, self.amplitudes / n)

    def overlap(self, other: "PureState") -> complex:
        _same_sector(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity_to(self, other: "PureState") -> float:
        """|<self|other>|^2 for the normalized states (global-phase free)."""
        a, b = self.normalized(), other.normalized()
        return float(abs(a.overlap(b)) ** 2)

    def amplitude(self, occupations: str) -> complex:
        idx = _sector_index(self.d, self.n_particles)[int(occupations, 2)]
        return complex(self.amplitudes[idx])

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.n_particles,
            "basis_order": "lex",
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        if data.get("basis_order", "lex") != "lex":
            raise InvalidDimensionError("only the lexicographic basis order is supported")
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(int(data["d"]), int(data["N"]), amps)


def _same_sector(a, b) -> None:
    if (a.d, a.n_particles) != (b.d, b.n_particles):
        raise SectorMismatchError(
            f"sector mismatch: ({a.d}, {a.n_particles}) vs ({b.d}, {b.n_particles})"
        )


def basis_vector(d: int, occupations: str) -> PureState:
    """The basis state |occupations>, e.g. ``basis_vector(6, "101010")``."""
    if len(occupations) != d or set(occupations) - {"0", "1"}:
        raise InvalidDimensionError("occupations must be a 0/1 string of length d")
    n = occupations.count("1")
    amps = np.zeros(sector_dim(d, n), dtype=np.complex128)
    amps[_sector_index(d, n)[int(occupations, 2)]] = 1.0
    return PureState(d, n, amps)


def superposition(d: int, terms: dict[str, complex]) -> PureState:
    """Normalized superposition from a mapping occupations -> amplitude."""
    if any(len(occ) != d or set(occ) - {"0", "1"} for occ in terms):
        raise InvalidDimensionError("occupations must be 0/1 strings of length d")
    weights = {occ.count("1") for occ in terms}
    if len(weights) != 1:
        raise InvalidDimensionError("all terms must share one particle number")
    n = weights.pop()
    amps = np.zeros(sector_dim(d, n), dtype=np.complex128)
    index = _sector_index(d, n)
    for occ, coeff in terms.items():
        amps[index[int(occ, 2)]] += coeff
    return PureState(d, n, amps).normalized()


@dataclass(frozen=True)
class MixedState:
    """Hermitian, unit-trace, positive-semidefinite sector density matrix."""

    d: int
    n_particles: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dim = sector_dim(self.d, self.n_particles)
        rho = np.asarray(self.matrix, dtype=np.complex128)
        if rho.shape != (dim, dim):
            raise InvalidDimensionError(f"density matrix must be {dim}x{dim}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise InvalidRDMError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
            raise InvalidRDMError("density matrix trace must be 1 within 1e-12")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise InvalidRDMError("density matrix has an eigenvalue below -1e-10")
        rho = rho.copy()
        rho.flags.writeable = False
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_pure(cls, state: PureState) -> "MixedState":
        psi = state.normalized().amplitudes
        return cls(state.d, state.n_particles, np.outer(psi, psi.conj()))

    def largest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[-1])


def maximally_mixed(d: int, n_particles: int) -> MixedState:
    dim = sector_dim(d, n_particles)
    return MixedState(d, n_particles, np.eye(dim) / dim)


# ---------------------------------------------------------------------------
# Ladder operators
# ---------------------------------------------------------------------------

def apply_ladder(
    state: PureState, mode: int, kind: Literal["creation", "annihilation"]
) -> PureState:
    """Apply a_mode^+ or a_mode, landing in the N+1 or N-1 sector.

    Creation on an occupied mode (annihilation on an empty one) yields the
    zero vector.  Annihilating the vacuum (or creating on a full sector)
    also gives the identically zero result; since the zero vector carries
    no particle number it is returned in the input sector.  The fermionic
    sign is (-1)^(number of occupied modes with index strictly below
    ``mode``).
    """
    d, n = state.d, state.n_particles
    p = _site_bit(d, mode)
    if kind == "creation":
        n_out = n + 1
    elif kind == "annihilation":
        n_out = n - 1
    else:
        raise InvalidDimensionError(f"unknown ladder kind {kind!r}")
    if not 0 <= n_out <= d:
        return PureState(d, n, np.zeros_like(state.amplitudes))

    masks = _sector_masks(d, n)
    occupied = (masks >> p) & 1
    if kind == "creation":
        sel = occupied == 0
        targets = masks[sel] | (1 << p)
    else:
        sel = occupied == 1
        targets = masks[sel] & ~np.int64(1 << p)
    parity = np.bitwise_count(masks[sel] >> (p + 1)) & 1
    signs = 1.0 - 2.0 * parity

    out = np.zeros(sector_dim(d, n_out), dtype=np.complex128)
    out_masks = _sector_masks(d, n_out)
    # out_masks is descending; searchsorted needs ascending order.
    pos = np.searchsorted(out_masks[::-1], targets)
    idx = len(out_masks) - 1 - pos
    np.add.at(out, idx, signs * state.amplitudes[sel])
    return PureState(d, n_out, out)


@lru_cache(maxsize=None)
def _pair_transitions(
    d: int, n_particles: int, i: int, j: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transition table of a_j^+ a_i on the sector: (src, dst, sign).

    ``src`` indexes basis states with site i occupied and site j empty,
    ``dst`` the corresponding states with the particle moved to j, and
    ``sign`` the parity of the occupied sites strictly between i and j.
    """
    pi, pj = _site_bit(d, i), _site_bit(d, j)
    masks = _sector_masks(d, n_particles)
    sel = (((masks >> pi) & 1) == 1) & (((masks >> pj) & 1) == 0)
    src = np.flatnonzero(sel)
    targets = masks[src] ^ (1 << pi) ^ (1 << pj)
    lo, hi = sorted((pi, pj))
    between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
    parity = np.bitwise_count(masks[src] & between) & 1
    signs = 1.0 - 2.0 * parity
    index = _sector_index(d, n_particles)
    dst = np.fromiter((index[int(t)] for t in targets), dtype=np.int64, count=len(src))
    for arr in (src, dst, signs):
        arr.flags.writeable = False
    return src, dst, signs


@lru_cache(maxsize=None)
def _hop_tensor(d: int, n_particles: int) -> np.ndarray:
    """Dense (d, d, dim, dim) tensor with H[i-1, j-1] the matrix of a_j^+ a_i.

    gamma_ij = <psi| H[i-1, j-1] |psi>.  Only intended for small sectors.
    """
    dim = sector_dim(d, n_particles)
    if d * d * dim * dim > 64_000_000:
        raise InvalidDimensionError("hop tensor too large for this sector")
    occ = _occupation_table(d, n_particles)
    tensor = np.zeros((d, d, dim, dim), dtype=np.complex128)
    for i in range(1, d + 1):
        tensor[i - 1, i - 1] = np.diag(occ[:, i - 1])
        for j in range(1, d + 1):
            if i == j:
                continue
            src, dst, sign = _pair_transitions(d, n_particles, i, j)
            tensor[i - 1, j - 1][dst, src] = sign
    tensor.flags.writeable = False
    return tensor


def _rdm_from_columns(
    d: int, n_particles: int, columns: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """1-RDM of the mixture sum_r weights[r] |col_r><col_r| / <col_r|col_r>."""
    norms = np.einsum("ar,ar->r", columns.conj(), columns).real
    scaled = np.asarray(weights, dtype=np.float64) / norms
    hops = _hop_tensor(d, n_particles)
    return np.einsum("ijab,ar,br,r->ij", hops, columns.conj(), columns, scaled)


# ---------------------------------------------------------------------------
# One-body reduced density matrix
# ---------------------------------------------------------------------------

def one_rdm(state: PureState | MixedState) -> np.ndarray:
    """gamma_ij = <a_j^+ a_i>, a Hermitian d x d matrix with trace N."""
    d, n = state.d, state.n_particles
    occ = _occupation_table(d, n)
    gamma = np.zeros((d, d), dtype=np.complex128)

    if isinstance(state, PureState):
        norm2 = float(np.vdot(state.amplitudes, state.amplitudes).real)
        if norm2 <= ATOL_STATE**2:
            raise DegenerateInputError("one_rdm of a zero-norm state")
        psi = state.amplitudes
        weights = np.abs(psi) ** 2
        np.fill_diagonal(gamma, occ.T @ weights / norm2)
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                if i == j:
                    continue
                src, dst, sign = _pair_transitions(d, n, i, j)
                gamma[i - 1, j - 1] = np.sum(
                    psi[dst].conj() * sign * psi[src]
                ) / norm2
    else:
        rho = state.matrix
        np.fill_diagonal(gamma, occ.T @ np.diag(rho).real)
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                if i == j:
                    continue
                src, dst, sign = _pair_transitions(d, n, i, j)
                gamma[i - 1, j - 1] = np.sum(sign * rho[src, dst])
    return gamma


def natural_occupations(
    rdm: np.ndarray, atol: float = ATOL_EIG
) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues of a 1-RDM and a diagonalizing unitary U.

    Returns ``(lam, U)`` with ``U @ rdm @ U^+ = diag(lam)``.  Ties between
    degenerate eigenvalues are resolved arbitrarily.
    """
    gamma = np.asarray(rdm, dtype=np.complex128)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise InvalidRDMError("1-RDM must be a square matrix")
    if np.max(np.abs(gamma - gamma.conj().T)) > atol:
        raise InvalidRDMError(f"1-RDM is not Hermitian within {atol}")
    w, v = np.linalg.eigh((gamma + gamma.conj().T) / 2)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order].conj().T


def occupation_expectation(state: PureState | MixedState, site: int) -> float:
    """<n_site> for a pure or mixed sector state."""
    _site_bit(state.d, site)
    occ = _occupation_table(state.d, state.n_particles)[:, site - 1]
    if isinstance(state, PureState):
        norm2 = float(np.vdot(state.amplitudes, state.amplitudes).real)
        if norm2 <= ATOL_STATE**2:
            raise DegenerateInputError("occupation of a zero-norm state")
        return float(occ @ (np.abs(state.amplitudes) ** 2) / norm2)
    return float(occ @ np.diag(state.matrix).real)


# ---------------------------------------------------------------------------
# State constructions
# ---------------------------------------------------------------------------

def random_pure_state(d: int, n_particles: int, seed: int) -> PureState:
    """Haar-like random state: iid standard complex Gaussian amplitudes."""
    dim = sector_dim(d, n_particles)
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(d, n_particles, amps).normalized()


def wedge_embed(state: PureState, vectors: Iterable[np.ndarray]) -> PureState:
    """Wedge single-particle vectors onto a state and normalize.

    Each vector v adds one particle through sum_i v_i a_i^+.  The result
    vanishes when a vector lies in the span already occupied, in which
    case a ZeroStateError is raised.
    """
    out = state
    for vec in vectors:
        v = np.asarray(vec, dtype=np.complex128)
        if v.shape != (state.d,):
            raise InvalidDimensionError("embedding vectors must have length d")
        if out.n_particles >= state.d:
            raise ZeroStateError("sector is full; wedge product vanishes")
        acc = None
        for mode in range(1, state.d + 1):
            if v[mode - 1] == 0:
                continue
            term = apply_ladder(out, mode, "creation")
            contrib = v[mode - 1] * term.amplitudes
            acc = contrib if acc is None else acc + contrib
        if acc is None:
            raise ZeroStateError("embedding vector is zero")
        out = PureState(state.d, out.n_particles + 1, acc)
    if out.norm <= 1e-12:
        raise ZeroStateError("wedge product vanished")
    return out.normalized()
