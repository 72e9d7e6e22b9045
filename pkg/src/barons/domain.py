"""Polytope domains {w : A w >= b} with unit-norm constraint rows.

Rows are normalized at construction so that each slack a_i'w - b_i is the
Euclidean distance of w to the i-th facet plane. A strictly feasible witness
point is required up front; general phase-I feasibility is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatch


class ZeroRow(ValueError):
    """A constraint row has (numerically) zero norm."""


class InfeasibleWitness(ValueError):
    """The provided witness point is not strictly inside the polytope."""


class InvalidBounds(ValueError):
    """Domain builder called with inconsistent bounds."""


@dataclass(frozen=True)
class Polytope:
    """Feasible set {w in R^d : A w >= b} with unit-norm rows of A."""

    A: np.ndarray  # (m, d), rows unit norm
    b: np.ndarray  # (m,)
    interior_witness: np.ndarray  # (d,), strictly feasible

    @property
    def num_constraints(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.A.shape[1]


def polytope_new(A_raw: np.ndarray, b_raw: np.ndarray, witness: np.ndarray) -> Polytope:
    """Build a polytope, normalizing each row of A (and b) to unit row norm.

    Raises ZeroRow on a vanishing constraint row, InfeasibleWitness if the
    witness does not have strictly positive slack on every facet.
    """
    A = np.atleast_2d(np.asarray(A_raw, dtype=float))
    b = np.atleast_1d(np.asarray(b_raw, dtype=float))
    w = np.atleast_1d(np.asarray(witness, dtype=float))
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
    if A.shape[1] != w.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[1]} columns but witness has {w.shape[0]} entries")
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms < 1e-300):
        raise ZeroRow(f"constraint row {int(np.argmin(norms))} has zero norm")
    A = A / norms[:, None]
    b = b / norms
    P = Polytope(A=A, b=b, interior_witness=w)
    if not is_strictly_feasible(P, w, margin=0.0):
        raise InfeasibleWitness("witness has a nonpositive slack")
    return P


def slacks(P: Polytope, w: np.ndarray) -> np.ndarray:
    """Per-constraint slacks s_i = a_i'w - b_i (positive iff strictly inside)."""
    w = np.asarray(w, dtype=float)
    if w.shape != (P.dim,):
        raise DimensionMismatch(f"expected point of dimension {P.dim}, got shape {w.shape}")
    return P.A @ w - P.b


def is_strictly_feasible(P: Polytope, w: np.ndarray, margin: float = 0.0) -> bool:
    """True iff every slack exceeds `margin` (margin 0 = strict interior)."""
    try:
        s = slacks(P, w)
    except DimensionMismatch:
        raise
    return bool(np.min(s) > margin)


def shrink_toward(w: np.ndarray, c: float, w_star: np.ndarray) -> np.ndarray:
    """Convex combination (1-c) w + c w_star pulling w toward an interior point."""
    w = np.asarray(w, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    return (1.0 - c) * w + c * w_star


def build_box(d: int, lo: float, hi: float) -> Polytope:
    """Axis-aligned box [lo, hi]^d as 2d unit-norm constraints."""
    if hi <= lo:
        raise InvalidBounds(f"need hi > lo, got lo={lo}, hi={hi}")
    if d < 1:
        raise InvalidBounds(f"need d >= 1, got {d}")
    eye = np.eye(d)
    A = np.vstack([eye, -eye])
    b = np.concatenate([np.full(d, lo), np.full(d, -hi)])
    witness = np.full(d, 0.5 * (lo + hi))
    return Polytope(A=A, b=b, interior_witness=witness)


def build_reduced_simplex(d: int) -> Polytope:
    """Probability simplex over d outcomes in reduced (d-1)-dim coordinates.

    The full simplex has empty interior in R^d, so we parametrize by the
    first d-1 coordinates: {v >= 0, sum(v) <= 1}, the last coordinate being
    1 - sum(v). That gives d constraints (d-1 nonnegativity + 1 sum) in
    dimension d-1, all with unit-norm rows.
    """
    if d < 2:
        raise InvalidBounds(f"need d >= 2, got {d}")
    k = d - 1
    A = np.vstack([np.eye(k), -np.ones((1, k)) / np.sqrt(k)])
    b = np.concatenate([np.zeros(k), [-1.0 / np.sqrt(k)]])
    witness = np.full(k, 1.0 / d)
    return Polytope(A=A, b=b, interior_witness=witness)


def lift_to_simplex(w_reduced: np.ndarray) -> np.ndarray:
    """Map reduced coordinates to the full probability vector (appends 1 - sum)."""
    w_reduced = np.asarray(w_reduced, dtype=float)
    return np.concatenate([w_reduced, [1.0 - float(np.sum(w_reduced))]])


def save_polytope(P: Polytope, path: str) -> None:
    """Plain-text format: 'm d' line, then m rows of d+1 numbers, then the witness."""
    lines = [f"{P.num_constraints} {P.dim}"]
    for i in range(P.num_constraints):
        nums = list(P.A[i]) + [P.b[i]]
        lines.append(" ".join(format(x, ".17g") for x in nums))
    lines.append(" ".join(format(x, ".17g") for x in P.interior_witness))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_polytope(path: str) -> Polytope:
    with open(path) as fh:
        tokens = fh.read().split("\n")
    rows = [ln.split() for ln in tokens if ln.strip()]
    m, d = int(rows[0][0]), int(rows[0][1])
    if len(rows) != m + 2:
        raise ValueError(f"expected {m + 2} lines, got {len(rows)}")
    A = np.array([[float(x) for x in rows[1 + i][:d]] for i in range(m)])
    b = np.array([float(rows[1 + i][d]) for i in range(m)])
    witness = np.array([float(x) for x in rows[m + 1]])
    return polytope_new(A, b, witness)
