"""Newton machinery: decrements, damped minimization, analytic centers.

The damped step keeps every iterate inside the Dikin ellipsoid of the
previous one (step length 1/(1 + M*lambda) once lambda >= 1/(4M), full step
below), so feasibility never needs a separate line search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barrier import Barrier
from .linalg import SpdFactor, dual_quad_norm, spd_solve


class MaxIterExceeded(RuntimeError):
    """Damped Newton failed to reach tolerance; carries the best iterate."""

    def __init__(self, message: str, best: np.ndarray, decrement: float):
        super().__init__(message)
        self.best = best
        self.decrement = decrement


@dataclass
class ShiftedObjective:
    """Barrier plus a linear term: f(w) = Phi(w) + shift'w.

    The linear term carries no curvature, so the Hessian (and the
    self-concordance constant) is the barrier's own.
    """

    barrier: Barrier
    shift: np.ndarray

    def __post_init__(self):
        self.shift = np.asarray(self.shift, dtype=float)

    @property
    def sc_constant(self) -> float:
        return self.barrier.params.M

    def value(self, w: np.ndarray) -> float:
        return self.barrier.value(w) + float(self.shift @ w)

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return self.barrier.gradient(w) + self.shift

    def hessian(self, w: np.ndarray) -> np.ndarray:
        return self.barrier.hessian(w)

    def hessian_factor(self, w: np.ndarray) -> SpdFactor:
        return self.barrier.hessian_factor(w)


def newton_decrement(obj, w: np.ndarray) -> float:
    """lambda(w) = ||grad f(w)|| in the inverse-Hessian norm at w."""
    F = obj.hessian_factor(w)
    return dual_quad_norm(obj.gradient(w), F)


def damped_newton_minimize(obj, w0: np.ndarray, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """Minimize a self-concordant objective by damped Newton steps.

    `obj` needs gradient/hessian_factor and an `sc_constant` attribute.
    Returns a point with Newton decrement <= tol; raises MaxIterExceeded
    (carrying the best iterate seen) if max_iter steps do not suffice.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    M = obj.sc_constant
    w = np.asarray(w0, dtype=float).copy()
    best_w, best_lam = w, np.inf
    for _ in range(max_iter):
        g = obj.gradient(w)
        F = obj.hessian_factor(w)
        lam = dual_quad_norm(g, F)
        if lam < best_lam:
            best_w, best_lam = w, lam
        if lam <= tol:
            return w
        step = spd_solve(F, g)
        if lam >= 1.0 / (4.0 * M):
            w = w - step / (1.0 + M * lam)
        else:
            w = w - step
    raise MaxIterExceeded(
        f"no convergence to tol={tol} in {max_iter} iterations (best decrement {best_lam:.3e})",
        best=best_w,
        decrement=best_lam,
    )


def analytic_center(B: Barrier, w0: np.ndarray | None = None, tol: float = 1e-10) -> np.ndarray:
    """Minimizer of the barrier itself (decrement <= tol at the result)."""
    if w0 is None:
        w0 = B.domain.interior_witness
    return damped_newton_minimize(ShiftedObjective(B, np.zeros(B.domain.dim)), w0, tol=tol)


def approx_newton_step(w: np.ndarray, H_factor: SpdFactor, grad_tilde: np.ndarray) -> np.ndarray:
    """Single Newton step w - H^-1 g using a cached factorization.

    No feasibility check here: the caller's invariants keep the step inside
    the domain, and the caller asserts it.
    """
    return np.asarray(w, dtype=float) - spd_solve(H_factor, grad_tilde)
