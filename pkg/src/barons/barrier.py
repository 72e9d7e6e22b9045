"""Self-concordant barriers over polytopes and their oracle adapters.

Two concrete barriers are provided:

  * ``LogBarrier``: -sum_i ln(a_i'w - b_i), self-concordant constant 1 and
    barrier parameter m (one unit per constraint).
  * ``HybridBarrier``: a barrier plus the quadratic (nu / 2 R^2) ||w||^2,
    used when only Euclidean gradient bounds are available; same
    self-concordance constant as the base barrier.

Oracle adapters wrap exact evaluations with optional adversarial noise
pinned exactly at the tolerance boundary (dual-norm eps for gradients,
relative spectral alpha for Hessians) to stress downstream robustness
guarantees. Both adapters count calls; raw evaluation methods do not, so
monitoring code can measure without distorting the cost accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Polytope, slacks
from .linalg import SpdFactor, spd_factorize

# Counter increments rely on the GIL; barriers are shared read-only across
# threads and each run owns its own oracle call stream.


class NotInterior(ValueError):
    """Evaluation point is not strictly inside the barrier's domain."""


@dataclass(frozen=True)
class BarrierParams:
    """Self-concordance constant M and barrier parameter nu."""

    M: float
    nu: float

    def __post_init__(self):
        if self.M <= 0 or self.nu <= 0:
            raise ValueError(f"barrier parameters must be positive, got M={self.M}, nu={self.nu}")


class Barrier:
    """Interface: value/gradient/hessian over a polytope interior."""

    domain: Polytope
    params: BarrierParams

    def __init__(self):
        self.grad_calls = 0
        self.hess_calls = 0

    def reset_counters(self) -> None:
        self.grad_calls = 0
        self.hess_calls = 0

    def value(self, w: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian_factor(self, w: np.ndarray) -> SpdFactor:
        return spd_factorize(self.hessian(w))

    def _interior_slacks(self, w: np.ndarray) -> np.ndarray:
        s = slacks(self.domain, w)
        if np.min(s) <= 0.0:
            raise NotInterior(f"slack {float(np.min(s)):.3e} <= 0 at facet {int(np.argmin(s))}")
        return s


class LogBarrier(Barrier):
    """Standard log-barrier -sum ln(slack_i); (1, m)-self-concordant."""

    def __init__(self, domain: Polytope):
        super().__init__()
        self.domain = domain
        self.params = BarrierParams(M=1.0, nu=float(domain.num_constraints))

    def value(self, w: np.ndarray) -> float:
        s = self._interior_slacks(w)
        return -float(np.sum(np.log(s)))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        s = self._interior_slacks(w)
        return -(self.domain.A.T @ (1.0 / s))

    def hessian(self, w: np.ndarray) -> np.ndarray:
        s = self._interior_slacks(w)
        As = self.domain.A / s[:, None]
        return As.T @ As


class HybridBarrier(Barrier):
    """Base barrier plus (nu / 2 R^2) ||w||^2, quadratic centered at the origin.

    Domains should be posed so the feasible set sits inside the Euclidean
    ball of radius R around the origin.
    """

    def __init__(self, base: Barrier, nu: float, R: float):
        super().__init__()
        if nu <= 0 or R <= 0:
            raise ValueError(f"need nu, R > 0, got nu={nu}, R={R}")
        self.base = base
        self.domain = base.domain
        self.weight = nu / R**2
        self.params = BarrierParams(M=base.params.M, nu=nu)

    def value(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return self.base.value(w) + 0.5 * self.weight * float(w @ w)

    def gradient(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return self.base.gradient(w) + self.weight * w

    def hessian(self, w: np.ndarray) -> np.ndarray:
        H = self.base.hessian(w)
        return H + self.weight * np.eye(H.shape[0])


def hybrid_compose(Psi: Barrier, nu: float, R: float) -> HybridBarrier:
    """Compose a barrier with the quadratic (nu / 2 R^2) ||.||^2."""
    return HybridBarrier(Psi, nu, R)


def log_barrier_value(P: Polytope, w: np.ndarray) -> float:
    return LogBarrier(P).value(w)


def log_barrier_gradient(P: Polytope, w: np.ndarray) -> np.ndarray:
    return LogBarrier(P).gradient(w)


def log_barrier_hessian(P: Polytope, w: np.ndarray) -> np.ndarray:
    return LogBarrier(P).hessian(w)


def barrier_params_log(P: Polytope) -> BarrierParams:
    """Log-barrier parameters: constant 1, one barrier unit per constraint."""
    return BarrierParams(M=1.0, nu=float(P.num_constraints))


@dataclass
class OracleConfig:
    """Gradient/Hessian oracle tolerances and the noise injection switch.

    With ``noise="off"`` the oracles return exact values (the tolerance
    contracts hold trivially). With ``noise="adversarial"`` perturbations sit
    exactly at the tolerance boundary: the gradient is shifted by a seeded
    pseudo-random direction of dual local norm exactly ``eps``, and the
    Hessian is scaled by 1 + alpha or 1 - alpha (seeded sign).
    """

    eps: float = 0.0
    alpha: float = 0.0
    noise: str = "off"  # "off" | "adversarial"
    seed: int = 0
    _rng: np.random.Generator = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if self.noise not in ("off", "adversarial"):
            raise ValueError(f"unknown noise mode {self.noise!r}")
        if self._rng is None:
            object.__setattr__(self, "_rng", np.random.default_rng(self.seed))


def grad_oracle(B: Barrier, w: np.ndarray, cfg: OracleConfig) -> np.ndarray:
    """Gradient of the barrier, within dual local norm eps of the truth."""
    B.grad_calls += 1
    g = B.gradient(w)
    if cfg.noise == "off" or cfg.eps == 0.0:
        return g
    F = B.hessian_factor(w)
    z = cfg._rng.standard_normal(F.dim)
    # delta = eps * L z / ||z|| has dual norm ||L^-1 delta|| = eps exactly
    delta = cfg.eps * (F.chol @ z) / np.linalg.norm(z)
    return g + delta


def hess_oracle(B: Barrier, w: np.ndarray, cfg: OracleConfig) -> tuple[np.ndarray, SpdFactor]:
    """Hessian of the barrier within relative spectral tolerance alpha, with factor."""
    B.hess_calls += 1
    H = B.hessian(w)
    if cfg.noise == "adversarial" and cfg.alpha > 0.0:
        sign = 1.0 if cfg._rng.random() < 0.5 else -1.0
        H = (1.0 + sign * cfg.alpha) * H
    return H, spd_factorize(H)

