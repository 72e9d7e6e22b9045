"""Reference algorithms: exact follow-the-regularized-leader and projected OGD.

The exact FTRL iterates are what the main algorithm tracks approximately;
solving them to high precision gives an oracle for closeness tests. OGD is
provided only on the probability simplex (sort-based projection), as a
comparison baseline; general polytope projection is exactly the expensive
operation this package exists to avoid.
"""

from __future__ import annotations

import numpy as np

from .barrier import Barrier
from .newton import ShiftedObjective, damped_newton_minimize


def ftrl_exact_round(barrier: Barrier, s: np.ndarray, w_prev: np.ndarray,
                     tol: float = 1e-12) -> np.ndarray:
    """argmin of barrier(w) + s'w, warm-started from the previous iterate."""
    return damped_newton_minimize(ShiftedObjective(barrier, s), w_prev, tol=tol)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the full probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    rho = int(np.max(np.nonzero(u + (1.0 - css) / idx > 0)[0]))
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def ogd_simplex_round(w: np.ndarray, g: np.ndarray, step: float) -> np.ndarray:
    """One projected gradient step on the simplex."""
    return project_simplex(np.asarray(w, dtype=float) - step * np.asarray(g, dtype=float))
