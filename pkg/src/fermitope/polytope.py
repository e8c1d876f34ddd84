"""Constraint machinery on natural-occupation vectors.

Covers the three-in-six setting: the pure-state occupation-number
inequality lam1 + lam2 + lam4 <= 2 with its pairing equalities
lam_i + lam_{7-i} = 1, the four entanglement-class polytopes, the merit
functions used to certify class violations, the few-fermion-entanglement
polytopes, the weakened inequalities valid for slightly mixed states, and
a stochastic search for states saturating them.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .errors import InvalidDimensionError, UnsupportedCaseError
from .fock import MixedState

MEMBERSHIP_TOL = 1e-9

CLASS_LABELS = ("slater", "epr", "w", "ghz")

CLASS_OCCUPATIONS = {
    "slater": np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
    "epr": np.array([1.0, 0.5, 0.5, 0.5, 0.5, 0.0]),
    "w": np.array([2 / 3, 2 / 3, 2 / 3, 1 / 3, 1 / 3, 1 / 3]),
    "ghz": np.array([0.5, 0.5, 0.5, 0.5, 0.5, 0.5]),
}


def _as_lambda(occupations, length: int = 6) -> np.ndarray:
    lam = np.asarray(occupations, dtype=np.float64)
    if lam.shape != (length,):
        raise InvalidDimensionError(f"occupation vector must have length {length}")
    if not np.all(np.isfinite(lam)):
        raise InvalidDimensionError("occupation vector must be finite")
    return lam


@dataclass(frozen=True)
class LinearInequality:
    """A constraint  coefficients . lam  (<= | >= | ==)  bound."""

    coefficients: tuple[float, ...]
    bound: float
    sense: str
    label: str = ""

    def __post_init__(self) -> None:
        if self.sense not in ("<=", ">=", "=="):
            raise InvalidDimensionError(f"unknown sense {self.sense!r}")
        if not all(math.isfinite(c) for c in self.coefficients) or not math.isfinite(
            self.bound
        ):
            raise InvalidDimensionError("inequality entries must be finite")

    def value(self, lam: np.ndarray) -> float:
        return float(np.dot(self.coefficients, lam))

    def slack(self, lam: np.ndarray) -> float:
        """Signed slack; satisfied within tol iff slack >= -tol."""
        v = self.value(lam)
        if self.sense == "<=":
            return self.bound - v
        if self.sense == ">=":
            return v - self.bound
        return -abs(v - self.bound)

    def to_json(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "bound": self.bound,
            "sense": self.sense,
            "label": self.label,
        }


@dataclass(frozen=True)
class PolytopeSpec:
    """A labelled set of linear constraints on (lam_1, ..., lam_6)."""

    label: str
    inequalities: tuple[LinearInequality, ...]

    def slacks(self, occupations) -> dict[str, float]:
        lam = _as_lambda(occupations)
        return {ineq.label: ineq.slack(lam) for ineq in self.inequalities}

    def contains(self, occupations, tol: float = MEMBERSHIP_TOL) -> bool:
        return all(s >= -tol for s in self.slacks(occupations).values())

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "inequalities": [ineq.to_json() for ineq in self.inequalities],
        }


def _e(*idx: int) -> tuple[float, ...]:
    c = [0.0] * 6
    for i in idx:
        c[i - 1] = 1.0
    return tuple(c)


def _common_constraints() -> list[LinearInequality]:
    cons = [
        LinearInequality(_e(1), 1.0, "<=", "lam1<=1"),
        LinearInequality((1, -1, 0, 0, 0, 0), 0.0, ">=", "lam1>=lam2"),
        LinearInequality((0, 1, -1, 0, 0, 0), 0.0, ">=", "lam2>=lam3"),
        LinearInequality(_e(3), 0.5, ">=", "lam3>=1/2"),
    ]
    for i in range(1, 4):
        cons.append(
            LinearInequality(_e(i, 7 - i), 1.0, "==", f"lam{i}+lam{7 - i}=1")
        )
    return cons


def class_polytope(label: str) -> PolytopeSpec:
    """Occupation polytope of one of the four entanglement classes."""
    label = label.lower()
    cons = _common_constraints()
    if label == "slater":
        cons += [
            LinearInequality(_e(1), 1.0, "==", "lam1=1"),
            LinearInequality(_e(2), 1.0, "==", "lam2=1"),
            LinearInequality(_e(3), 1.0, "==", "lam3=1"),
        ]
    elif label == "epr":
        cons += [
            LinearInequality(_e(1), 1.0, "==", "lam1=1"),
            LinearInequality((0, 1, -1, 0, 0, 0), 0.0, "==", "lam2=lam3"),
        ]
    elif label == "w":
        cons += [
            LinearInequality((1, 1, -1, 0, 0, 0), 1.0, "<=", "lam1+lam2-lam3<=1"),
            LinearInequality(_e(1, 2, 3), 2.0, ">=", "lam1+lam2+lam3>=2"),
        ]
    elif label == "ghz":
        cons += [
            LinearInequality((1, 1, -1, 0, 0, 0), 1.0, "<=", "lam1+lam2-lam3<=1"),
        ]
    else:
        raise InvalidDimensionError(f"unknown polytope label {label!r}")
    return PolytopeSpec(label, tuple(cons))


# ---------------------------------------------------------------------------
# Merit functions and pure-state membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeritReport:
    """Merit-function values and per-constraint slacks at one lam."""

    f_slater: float
    f_epr: float
    f_w: float
    f1: float
    f2: float
    slacks: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "F_Slater": self.f_slater,
            "F_EPR": self.f_epr,
            "F_W": self.f_w,
            "F1": self.f1,
            "F2": self.f2,
            "slacks": dict(self.slacks),
        }


def merit_values(occupations) -> MeritReport:
    """Merit functions of a sorted occupation vector.

    F_Slater = lam2 - 1 and F_EPR = lam1 - 1 are facet slacks of the
    Slater and EPR polytopes; F_W = lam1 + lam2 + lam3 - 2 is the W-facet
    slack oriented so that the characteristic states give the reference
    values -1/2, -1/3 and -1/2.  F1 and F2 are the two mixed-state
    figures of merit.
    """
    lam = _as_lambda(occupations)
    slacks = {
        "bd": 2.0 - (lam[0] + lam[1] + lam[3]),
        "pair_16": -abs(lam[0] + lam[5] - 1.0),
        "pair_25": -abs(lam[1] + lam[4] - 1.0),
        "pair_34": -abs(lam[2] + lam[3] - 1.0),
    }
    return MeritReport(
        f_slater=float(lam[1] - 1.0),
        f_epr=float(lam[0] - 1.0),
        f_w=float(lam[0] + lam[1] + lam[2] - 2.0),
        f1=float(lam[0] + lam[1] - lam[2]),
        f2=float(lam[0] + lam[1] + lam[3]),
        slacks=slacks,
    )


def check_pure_bd(
    occupations, tol: float = MEMBERSHIP_TOL
) -> tuple[MeritReport, bool]:
    """Pure-state membership: the sum inequality plus pairing equalities."""
    lam = _as_lambda(occupations)
    if np.any(lam[:-1] < lam[1:] - tol):
        raise InvalidDimensionError("occupations must be sorted descending")
    if np.any(lam < -tol) or np.any(lam > 1 + tol):
        raise InvalidDimensionError("occupations must lie in [0, 1]")
    report = merit_values(lam)
    member = all(s >= -tol for s in report.slacks.values())
    return report, member


# ---------------------------------------------------------------------------
# Few-fermion entanglement polytopes
# ---------------------------------------------------------------------------

def check_m_fermion(
    occupations,
    n_particles: int,
    n_modes: int,
    m: int,
    tol: float = MEMBERSHIP_TOL,
) -> bool:
    """Membership in the (at most) m-fermion-entangled polytope.

    Requires the leading N - m occupations to equal one and the remaining
    tail to obey the constraints of m fermions in d - (N - m) modes.
    Known tails: a single fermion (rank-one), two fermions (pairwise
    degenerate, trailing zero when the mode count is odd), and the
    three-in-six case.
    """
    if not (1 <= m <= n_particles <= n_modes):
        raise UnsupportedCaseError(f"need 1 <= m <= N <= d, got m={m}, N={n_particles}, d={n_modes}")
    lam = _as_lambda(occupations, length=n_modes)
    lead = n_particles - m
    if np.any(np.abs(lam[:lead] - 1.0) > tol):
        return False
    tail = lam[lead:]
    d_tail = n_modes - lead

    if m == 1:
        template = np.zeros(d_tail)
        template[0] = 1.0
        return bool(np.all(np.abs(tail - template) <= tol))
    if m == 2:
        pairs_ok = all(
            abs(tail[2 * k] - tail[2 * k + 1]) <= tol for k in range(d_tail // 2)
        )
        odd_ok = d_tail % 2 == 0 or abs(tail[-1]) <= tol
        return bool(pairs_ok and odd_ok)
    if m == 3 and d_tail == 6:
        try:
            _, member = check_pure_bd(tail, tol=tol)
        except InvalidDimensionError:
            return False
        return member
    raise UnsupportedCaseError(
        f"no constraint table for m={m} fermions in {d_tail} modes"
    )


# ---------------------------------------------------------------------------
# Weakened conditions for slightly mixed states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakenedReport:
    """Slacks of the two weakened inequalities at a given mixedness."""

    epsilon: float
    slack_f1: float
    slack_f2: float
    member: bool

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "slack_f1": self.slack_f1,
            "slack_f2": self.slack_f2,
            "member": self.member,
        }


def check_weakened(
    occupations, epsilon: float, tol: float = MEMBERSHIP_TOL
) -> WeakenedReport:
    """Slacks of lam1+lam2-lam3 <= 1+eps and lam1+lam2+lam4 <= 2+eps.

    No pairing equalities are assumed; for a mixed state the two
    inequalities are independent.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidDimensionError("epsilon must lie in [0, 1]")
    lam = _as_lambda(occupations)
    s1 = (1.0 + epsilon) - (lam[0] + lam[1] - lam[2])
    s2 = (2.0 + epsilon) - (lam[0] + lam[1] + lam[3])
    return WeakenedReport(
        epsilon=epsilon,
        slack_f1=float(s1),
        slack_f2=float(s2),
        member=bool(s1 >= -tol and s2 >= -tol),
    )


# ---------------------------------------------------------------------------
# Stochastic search for extremal slightly mixed states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HillClimbResult:
    state: MixedState
    value: float
    objective: str
    epsilon: float
    iterations: int
    accepted: int


def _mixture_lambdas(psi0: np.ndarray, block: np.ndarray, epsilon: float) -> np.ndarray:
    """Sorted 1-RDM eigenvalues of (1-eps)|psi0><psi0| + eps * BB^+/tr(BB^+)."""
    trace = np.einsum("cr,cr->", block.conj(), block).real
    rho = (1.0 - epsilon) * np.outer(psi0, psi0.conj())
    rho += (epsilon / trace) * (block @ block.conj().T)
    hops_flat = fock._hop_tensor(6, 3).reshape(36, -1)
    gamma = (hops_flat @ rho.T.ravel()).reshape(6, 6)
    return np.linalg.eigvalsh(gamma)[::-1]


def _objective_from_lambda(lam: np.ndarray, objective: str) -> float:
    if objective == "f1":
        return float(lam[0] + lam[1] - lam[2])
    if objective == "f2":
        return float(lam[0] + lam[1] + lam[3])
    raise InvalidDimensionError(f"objective must be 'f1' or 'f2', got {objective!r}")


def _orthonormalize_block(block: np.ndarray, psi0: np.ndarray) -> np.ndarray:
    """Project the purification block onto the complement of psi0."""
    block = block - np.outer(psi0, psi0.conj() @ block)
    norm = np.linalg.norm(block)
    if norm <= 1e-14:
        raise ZeroDivisionError
    return block / norm


def hill_climb_extremal(
    epsilon: float,
    objective: str = "f1",
    seed: int = 0,
    iterations: int = 100_000,
    rank: int = 2,
    initial_step: float = 0.5,
) -> HillClimbResult:
    """Random search maximizing f1 or f2 over states of fixed mixedness.

    The state keeps the form rho = (1-eps)|psi0><psi0| + eps*rho1 with
    rho1 orthogonal to psi0 (a rank-``rank`` purification block).  Both
    psi0 and the block receive Gaussian perturbations; a move is accepted
    when the objective increases, and the step size anneals by 0.95 after
    every 100 consecutive rejections.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidDimensionError("epsilon must lie in (0, 1)")
    if iterations < 1:
        raise InvalidDimensionError("iterations must be >= 1")
    _objective_from_lambda(np.ones(6), objective)

    rng = np.random.default_rng(seed)
    dim = fock.sector_dim(6, 3)

    def random_unit(shape) -> np.ndarray:
        v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return v / np.linalg.norm(v)

    psi0 = random_unit(dim)
    block = _orthonormalize_block(random_unit((dim, rank)), psi0)

    best = _objective_from_lambda(_mixture_lambdas(psi0, block, epsilon), objective)
    step = initial_step
    rejections = 0
    accepted = 0
    for _ in range(iterations):
        d_psi = step * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        d_blk = step * (
            rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
        )
        cand_psi = psi0 + d_psi
        cand_psi = cand_psi / np.linalg.norm(cand_psi)
        try:
            cand_blk = _orthonormalize_block(block + d_blk, cand_psi)
        except ZeroDivisionError:
            continue
        value = _objective_from_lambda(
            _mixture_lambdas(cand_psi, cand_blk, epsilon), objective
        )
        if value > best:
            best = value
            psi0, block = cand_psi, cand_blk
            accepted += 1
            rejections = 0
        else:
            rejections += 1
            if rejections >= 100:
                step *= 0.95
                rejections = 0

    weights = np.einsum("cr,cr->r", block.conj(), block).real
    rho1 = (block * (1.0 / weights.sum())) @ block.conj().T
    rho = (1.0 - epsilon) * np.outer(psi0, psi0.conj()) + epsilon * rho1
    rho = (rho + rho.conj().T) / 2
    return HillClimbResult(
        state=MixedState(6, 3, rho),
        value=best,
        objective=objective,
        epsilon=epsilon,
        iterations=iterations,
        accepted=accepted,
    )
