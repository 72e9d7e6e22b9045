"""Dense SPD linear algebra: Cholesky factorization, solves, and local norms.

Everything downstream measures distances in Hessian-induced norms
``sqrt(v' M v)`` and their duals ``sqrt(v' M^-1 v)``, so the factorization
object is the workhorse of the whole package: factor once, solve many.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

# Relative pivot floor: pivots below PIVOT_RTOL * trace/d are treated as a
# non-SPD input (boundary blow-up or a barrier bug) rather than round-off.
PIVOT_RTOL = 1e-14
SYM_RTOL = 1e-12


class NotSpd(ValueError):
    """Input matrix is not symmetric positive definite."""


class DimensionMismatch(ValueError):
    """Vector/matrix dimensions do not agree."""


@dataclass(frozen=True)
class SpdFactor:
    """Lower-triangular Cholesky factor L of an SPD matrix M = L L'."""

    dim: int
    chol: np.ndarray  # (dim, dim) lower triangular

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))

    def reconstruct(self) -> np.ndarray:
        return self.chol @ self.chol.T


def _as_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def spd_factorize(M: np.ndarray) -> SpdFactor:
    """Cholesky-factorize a symmetric positive definite matrix.

    Raises NotSpd if the matrix is asymmetric beyond round-off or if any
    pivot falls below the relative floor (eigenvalue <= 0 up to round-off).
    """
    M = _as_square(M)
    d = M.shape[0]
    scale = float(np.linalg.norm(M, ord="fro"))
    if scale > 0 and float(np.linalg.norm(M - M.T, ord="fro")) > SYM_RTOL * scale:
        raise NotSpd("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotSpd(f"Cholesky failed: {exc}") from exc
    floor = PIVOT_RTOL * float(np.trace(M)) / d
    if float(np.min(np.diag(L)) ** 2) <= floor:
        raise NotSpd("pivot below relative floor; matrix numerically singular")
    return SpdFactor(dim=d, chol=L)


def spd_solve(F: SpdFactor, v: np.ndarray) -> np.ndarray:
    """Solve M x = v given the factorization of M."""
    v = np.asarray(v, dtype=float)
    if v.shape != (F.dim,):
        raise DimensionMismatch(f"expected vector of length {F.dim}, got shape {v.shape}")
    return cho_solve((F.chol, True), v)


def quad_norm(v: np.ndarray, M) -> float:
    """Hessian-weighted norm sqrt(v' M v); M may be a matrix or an SpdFactor."""
    v = np.asarray(v, dtype=float)
    if isinstance(M, SpdFactor):
        if v.shape != (M.dim,):
            raise DimensionMismatch(f"expected vector of length {M.dim}, got shape {v.shape}")
        # v' L L' v = ||L' v||^2
        return float(np.linalg.norm(M.chol.T @ v))
    M = _as_square(M)
    if v.shape != (M.shape[0],):
        raise DimensionMismatch(f"expected vector of length {M.shape[0]}, got shape {v.shape}")
    q = float(v @ M @ v)
    if q < 0:
        if q < -1e-12 * max(1.0, float(v @ v)) * max(1.0, float(np.trace(M))):
            raise NotSpd("negative quadratic form; matrix not positive definite")
        q = 0.0
    return float(np.sqrt(q))


def dual_quad_norm(v: np.ndarray, F: SpdFactor) -> float:
    """Dual norm sqrt(v' M^-1 v) from the factorization of M."""
    v = np.asarray(v, dtype=float)
    if v.shape != (F.dim,):
        raise DimensionMismatch(f"expected vector of length {F.dim}, got shape {v.shape}")
    # v' (L L')^-1 v = ||L^-1 v||^2
    y = solve_triangular(F.chol, v, lower=True, check_finite=False)
    return float(np.linalg.norm(y))


def spectral_sandwich_check(H: np.ndarray, M: np.ndarray, alpha: float, slack: float = 1e-9) -> bool:
    """True iff (1-alpha) M <= H <= (1+alpha) M in the PSD order.

    Checked through the generalized eigenvalues of (H, M): factor M = L L'
    and test that eig(L^-1 H L^-T) lies in [1-alpha, 1+alpha] up to slack.
    """
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    H = _as_square(H)
    F = spd_factorize(M)
    if H.shape[0] != F.dim:
        raise DimensionMismatch("H and M have different dimensions")
    spd_factorize(H)  # reject non-SPD H outright
    W = solve_triangular(F.chol, H, lower=True, check_finite=False)
    W = solve_triangular(F.chol, W.T, lower=True, check_finite=False)
    eigs = np.linalg.eigvalsh(0.5 * (W + W.T))
    return bool(eigs[0] >= 1.0 - alpha - slack and eigs[-1] <= 1.0 + alpha + slack)
