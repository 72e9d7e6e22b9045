"""Barrier-regularized online Newton steps with landmark Hessian caching.

Per round: fold the new subgradient into the running scaled sum, take a
fixed number of Newton steps preconditioned by the Hessian factorization
cached at the most recent landmark iterate, then refresh the landmark only
if the new iterate drifted beyond 1/(41 M) of it in the cached metric.
Feasibility is automatic (the steps stay inside Dikin ellipsoids of a
barrier), and the expensive factorization is amortized over many rounds.

Two parameter modes:

  * ``strict``: the schedule must satisfy eta <= 1/(1000 b M) and
    eps <= 1/(20000 M); the regime where the contraction invariants are
    guaranteed round by round. The constructor rejects violations.
  * ``practical``: schedule formulas applied as-is at realistic horizons;
    violations are recorded as warnings and a safety guard (exact damped
    Newton fallback) catches the rare rounds where the inner loop exits
    its contraction basin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .barrier import Barrier, BarrierParams, OracleConfig, grad_oracle, hess_oracle
from .domain import slacks
from .linalg import SpdFactor, quad_norm
from .newton import (
    MaxIterExceeded,
    ShiftedObjective,
    analytic_center,
    approx_newton_step,
    damped_newton_minimize,
    newton_decrement,
)
from .barrier import NotInterior

DEFAULT_ALPHA_HESS = 0.001
INNER_DECAY = 15.0 / 16.0  # per-step contraction factor of the inner loop


class PreconditionViolated(ValueError):
    """A strict-mode schedule violates its parameter preconditions."""


class DivergenceDetected(RuntimeError):
    """Inner loop and damped fallback both failed; parameters are misused."""


@dataclass(frozen=True)
class LocalNormBound:
    """Subgradients bounded in the dual local norm: ||g||_{H(w)^-1} <= b."""

    b: float


@dataclass(frozen=True)
class EuclideanBound:
    """Subgradients bounded in Euclidean norm by G on a domain inside B(R)."""

    G: float
    R: float


@dataclass(frozen=True)
class BaronsParams:
    """Resolved run parameters.

    ``lambda_target`` is the per-round Newton-decrement budget
    min(1/(1000 M), 1000 eps); ``landmark_threshold`` is the drift radius
    1/(41 M) beyond which the cached Hessian is refreshed.
    """

    eta: float
    eps: float
    m_newton: int
    m_phi: float
    landmark_threshold: float
    lambda_target: float
    alpha_hess: float = DEFAULT_ALPHA_HESS
    mode: str = "practical"
    bound_scale: float | None = None  # b (local) or G (Euclidean), for validation
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("strict", "practical"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.eta <= 0 or self.eps < 0 or self.m_newton < 1:
            raise ValueError("need eta > 0, eps >= 0, m_newton >= 1")
        violations = _precondition_violations(self.eta, self.eps, self.m_phi, self.bound_scale)
        if self.mode == "strict" and violations:
            raise PreconditionViolated("; ".join(violations))
        if violations and not self.warnings:
            object.__setattr__(self, "warnings", tuple(violations))


def _precondition_violations(eta: float, eps: float, m_phi: float, bound_scale: float | None) -> list[str]:
    out = []
    if bound_scale is not None:
        eta_max = 1.0 / (1000.0 * bound_scale * m_phi)
        if eta > eta_max * (1 + 1e-12):
            out.append(f"eta = {eta:.6g} violates eta <= 1/(1000 b M_Phi) = {eta_max:.6g}")
    eps_max = 1.0 / (20000.0 * m_phi)
    if eps > eps_max * (1 + 1e-12):
        out.append(f"eps = {eps:.6g} violates eps <= 1/(20000 M_Phi) = {eps_max:.6g}")
    return out


def newton_steps_for(eps: float, m_phi: float) -> int:
    """Inner Newton steps per round: smallest m with (50/M)(15/16)^m <= 500 eps."""
    if eps <= 0:
        raise ValueError("eps must be positive to size the inner loop")
    x = 10.0 * eps * m_phi
    if x >= 1.0:
        return 1
    return max(1, math.ceil(math.log(1.0 / x) / math.log(1.0 / INNER_DECAY)))


def compute_params(
    barrier_params: BarrierParams,
    bound,
    T: int,
    c: float | None = None,
    mode: str = "practical",
    *,
    eta: float | None = None,
    eps: float | None = None,
    alpha_hess: float = DEFAULT_ALPHA_HESS,
) -> BaronsParams:
    """Derive the run schedule from the horizon and a subgradient bound.

    Local-norm bound b: eta = sqrt(nu ln(1/c) / (b^2 T)), eps = sqrt(nu/T).
    Euclidean bound (G, R): eta = (nu/(R G)) sqrt((ln T + 1)/T), same eps.
    Explicit ``eta``/``eps`` keyword values override the formulas.
    """
    if T < 2:
        raise ValueError(f"need T >= 2, got {T}")
    if c is None:
        c = 1.0 / T
    if not 0.0 < c < 1.0:
        raise ValueError(f"need c in (0,1), got {c}")
    nu, M = barrier_params.nu, barrier_params.M
    if isinstance(bound, LocalNormBound):
        if bound.b <= 0:
            raise ValueError(f"need b > 0, got {bound.b}")
        eta_formula = math.sqrt(nu * math.log(1.0 / c) / (bound.b**2 * T))
        scale = bound.b
    elif isinstance(bound, EuclideanBound):
        if bound.G <= 0 or bound.R <= 0:
            raise ValueError(f"need G, R > 0, got G={bound.G}, R={bound.R}")
        eta_formula = (nu / (bound.R * bound.G)) * math.sqrt((math.log(T) + 1.0) / T)
        scale = bound.G
    else:
        raise TypeError(f"bound must be LocalNormBound or EuclideanBound, got {type(bound)}")
    eta_final = eta_formula if eta is None else eta
    eps_final = math.sqrt(nu / T) if eps is None else eps
    return BaronsParams(
        eta=eta_final,
        eps=eps_final,
        m_newton=newton_steps_for(eps_final, M),
        m_phi=M,
        landmark_threshold=1.0 / (41.0 * M),
        lambda_target=min(1.0 / (1000.0 * M), 1000.0 * eps_final),
        alpha_hess=alpha_hess,
        mode=mode,
        bound_scale=scale,
    )


@dataclass
class BaronsStats:
    landmark_updates: int = 0
    inner_steps: int = 0
    rounds: int = 0
    safety_fallbacks: int = 0
    target_violations: int = 0  # monitored rounds with decrement > lambda_target


@dataclass
class BaronsState:
    """Mutable per-run state: iterate, scaled gradient sum, landmark cache."""

    barrier: Barrier
    params: BaronsParams
    oracle: OracleConfig
    t: int
    w: np.ndarray
    s: np.ndarray
    u: np.ndarray
    H: np.ndarray
    H_factor: SpdFactor
    stats: BaronsStats = field(default_factory=BaronsStats)


@dataclass
class RoundResult:
    w: np.ndarray
    landmark_updated: bool
    landmark_distance: float  # drift measured at the landmark check, pre-refresh
    decrement: float  # NaN on unmonitored rounds
    safety_fallback: bool
    inner_decrements: list | None = None


def barons_init(B: Barrier, params: BaronsParams, w0: np.ndarray | None = None,
                oracle: OracleConfig | None = None) -> BaronsState:
    """Start at the barrier's minimizer with the Hessian cached there."""
    if oracle is None:
        oracle = OracleConfig(eps=params.eps, alpha=params.alpha_hess, noise="off")
    w_star = analytic_center(B, w0)
    H, F = hess_oracle(B, w_star, oracle)
    return BaronsState(
        barrier=B,
        params=params,
        oracle=oracle,
        t=0,
        w=w_star,
        s=np.zeros(B.domain.dim),
        u=w_star.copy(),
        H=H,
        H_factor=F,
    )


def landmark_distance(state: BaronsState) -> float:
    """Distance of the current iterate from the landmark in the cached metric."""
    return quad_norm(state.w - state.u, state.H)


def _potential(state: BaronsState, s: np.ndarray) -> ShiftedObjective:
    return ShiftedObjective(state.barrier, s)


def barons_round(state: BaronsState, g: np.ndarray, monitor: bool = False,
                 record_inner: bool = False) -> RoundResult:
    """Advance one round given the observed subgradient at the current iterate.

    ``monitor`` computes the exact Newton decrement of the new potential at
    the new iterate (one fresh Hessian; off by default to preserve the
    amortization) and engages the safety guard if it exceeds 1/(20 M).
    ``record_inner`` additionally records the decrement at every inner
    iterate (test instrumentation; expensive).
    """
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise ValueError("subgradient contains non-finite entries")
    p = state.params
    B = state.barrier
    s_new = state.s + p.eta * g
    potential = _potential(state, s_new)

    w_m = state.w
    inner = [] if record_inner else None
    if record_inner:
        inner.append(newton_decrement(potential, w_m))
    for _ in range(p.m_newton):
        g_hat = grad_oracle(B, w_m, state.oracle)
        w_m = approx_newton_step(w_m, state.H_factor, g_hat + s_new)
        state.stats.inner_steps += 1
        if record_inner:
            inner.append(newton_decrement(potential, w_m))
    w_new = w_m
    # intermediate iterates were validated by the next gradient call; the
    # final one gets an explicit slack check
    if float(np.min(slacks(B.domain, w_new))) <= 0.0:
        raise NotInterior(f"round {state.t + 1}: iterate left the domain interior")

    decrement = math.nan
    fallback = False
    if monitor or record_inner:
        decrement = newton_decrement(potential, w_new)
        if decrement > 1.0 / (20.0 * p.m_phi):
            fallback = True
            state.stats.safety_fallbacks += 1
            try:
                w_new = damped_newton_minimize(potential, w_new, tol=p.lambda_target)
            except MaxIterExceeded as exc:
                raise DivergenceDetected(
                    f"round {state.t + 1}: decrement {decrement:.3e} and damped fallback "
                    f"stalled at {exc.decrement:.3e}; check the schedule"
                ) from exc
            decrement = newton_decrement(potential, w_new)
        if decrement > p.lambda_target:
            state.stats.target_violations += 1

    dist = quad_norm(w_new - state.u, state.H)
    updated = dist > p.landmark_threshold
    if updated:
        state.u = w_new.copy()
        state.H, state.H_factor = hess_oracle(B, w_new, state.oracle)
        state.stats.landmark_updates += 1

    state.s = s_new
    state.w = w_new
    state.t += 1
    state.stats.rounds += 1
    return RoundResult(
        w=w_new,
        landmark_updated=updated,
        landmark_distance=dist,
        decrement=decrement,
        safety_fallback=fallback,
        inner_decrements=inner,
    )
