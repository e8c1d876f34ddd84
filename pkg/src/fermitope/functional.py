"""Entropy functional over occupation polytopes.

For a class polytope the functional is the maximum Shannon entropy of the
scaled occupations lam/N over the polytope.  In the three-in-six setting
the pairing equalities reduce the problem to the coordinates
(lam1, lam2, lam3); maximization uses projected gradient ascent on the
concave objective with alternating half-space projections, seeded from a
coarse grid of starting points.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import null_space

from .errors import (
    InfeasiblePolytopeError,
    InvalidDistributionError,
    UnsupportedCaseError,
)
from .polytope import PolytopeSpec

_N_PARTICLES = 3
_CLIP = 1e-12


def shannon_entropy(distribution) -> float:
    """Shannon entropy (nats) of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(distribution, dtype=np.float64)
    if p.ndim != 1 or not np.all(np.isfinite(p)):
        raise InvalidDistributionError("distribution must be a finite 1-d vector")
    if np.any(p < -1e-12):
        raise InvalidDistributionError("distribution entries must be non-negative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistributionError("distribution must sum to 1 within 1e-9")
    p = np.clip(p, 0.0, None)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])))


@dataclass(frozen=True)
class EntropyValue:
    """Maximal scaled-occupation entropy and where it is attained."""

    value: float
    argmax: np.ndarray

    def to_json(self) -> dict:
        return {"E": self.value, "argmax": [float(x) for x in self.argmax]}


def _full_lambda(x: np.ndarray) -> np.ndarray:
    """(..., 3) reduced coordinates -> (..., 6) occupations via pairings."""
    return np.concatenate([x, 1.0 - x[..., ::-1]], axis=-1)


def _entropy_reduced(x: np.ndarray) -> np.ndarray:
    """Entropy of lam/N at reduced coordinates x, batched over rows."""
    lam = np.clip(_full_lambda(x), 0.0, None) / _N_PARTICLES
    terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def _entropy_gradient(x: np.ndarray) -> np.ndarray:
    """d/dx_i of the reduced entropy; finite thanks to interior clipping."""
    xc = np.clip(x, _CLIP, 1.0 - _CLIP)
    return np.log((1.0 - xc) / xc) / _N_PARTICLES


def _reduce_spec(spec: PolytopeSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Eliminate lam4..lam6 through the pairing equalities.

    Returns (A_eq, b_eq, A_ub, b_ub) over x = (lam1, lam2, lam3) with all
    inequalities oriented as A_ub @ x <= b_ub.
    """
    pairings_seen = 0
    eq_rows, eq_b, ub_rows, ub_b = [], [], [], []
    for ineq in spec.inequalities:
        c = np.asarray(ineq.coefficients, dtype=np.float64)
        if c.shape != (6,):
            raise UnsupportedCaseError("functional requires length-6 constraints")
        a = c[:3] - c[3:][::-1]
        b = ineq.bound - c[3:].sum()
        if ineq.sense == "==":
            if np.allclose(a, 0.0) and abs(b) < 1e-12:
                pairings_seen += 1
                continue
            eq_rows.append(a)
            eq_b.append(b)
        elif ineq.sense == "<=":
            ub_rows.append(a)
            ub_b.append(b)
        else:
            ub_rows.append(-a)
            ub_b.append(-b)
    if pairings_seen < 3:
        raise UnsupportedCaseError(
            "polytope must include the three pairing equalities"
        )
    A_eq = np.array(eq_rows).reshape(-1, 3)
    A_ub = np.array(ub_rows).reshape(-1, 3)
    return A_eq, np.array(eq_b), A_ub, np.array(ub_b)


def _project_halfspaces(
    u: np.ndarray, G: np.ndarray, h: np.ndarray, sweeps: int
) -> np.ndarray:
    """Alternating projections of row vectors u onto {u : G u <= h}."""
    if G.shape[0] == 0:
        return u
    norms2 = np.einsum("ij,ij->i", G, G)
    for _ in range(sweeps):
        for g, bound, n2 in zip(G, h, norms2):
            if n2 <= 1e-30:
                continue
            viol = u @ g - bound
            np.clip(viol, 0.0, None, out=viol)
            u = u - (viol / n2)[:, None] * g[None, :]
    return u


def quantum_functional(
    spec: PolytopeSpec,
    seeds_per_axis: int = 9,
    iterations: int = 320,
    feasibility_tol: float = 1e-9,
) -> EntropyValue:
    """Maximize the scaled-occupation entropy over a polytope.

    Returns the maximum (absolute accuracy ~1e-6 for the class polytopes)
    together with the maximizing occupation vector.
    """
    A_eq, b_eq, A_ub, b_ub = _reduce_spec(spec)

    if A_eq.shape[0]:
        x0 = np.linalg.lstsq(A_eq, b_eq, rcond=None)[0]
        if np.linalg.norm(A_eq @ x0 - b_eq) > 1e-9:
            raise InfeasiblePolytopeError(
                f"equality system of {spec.label!r} is inconsistent"
            )
        Z = null_space(A_eq)
    else:
        x0 = np.zeros(3)
        Z = np.eye(3)

    if Z.shape[1] == 0:
        # The polytope is a single point; nothing to optimize.
        if A_ub.shape[0] and np.any(A_ub @ x0 - b_ub > feasibility_tol):
            raise InfeasiblePolytopeError(f"{spec.label!r} has no feasible point")
        lam = _full_lambda(x0)
        return EntropyValue(float(_entropy_reduced(x0[None, :])[0]), lam)

    G = A_ub @ Z
    h = b_ub - A_ub @ x0

    axis = np.linspace(0.5, 1.0, seeds_per_axis)
    seeds_x = np.array(list(product(axis, repeat=3)))
    u = (seeds_x - x0) @ Z
    u = np.unique(np.round(u, 12), axis=0)
    u = _project_halfspaces(u, G, h, sweeps=60)

    step = 0.25
    best_val = -np.inf
    best_x = None
    for it in range(iterations):
        x = x0 + u @ Z.T
        grad_u = _entropy_gradient(x) @ Z
        u = _project_halfspaces(u + step * grad_u, G, h, sweeps=8)
        if it % 15 == 14:
            step *= 0.75
        if it % 10 == 9 or it == iterations - 1:
            x = x0 + u @ Z.T
            feasible = (
                np.ones(len(u), dtype=bool)
                if G.shape[0] == 0
                else np.all(x @ A_ub.T - b_ub <= feasibility_tol, axis=1)
            )
            if np.any(feasible):
                vals = _entropy_reduced(x[feasible])
                k = int(np.argmax(vals))
                if vals[k] > best_val:
                    best_val = float(vals[k])
                    best_x = x[feasible][k]

    if best_x is None:
        raise InfeasiblePolytopeError(f"{spec.label!r} has no feasible point")
    return EntropyValue(best_val, _full_lambda(best_x))
