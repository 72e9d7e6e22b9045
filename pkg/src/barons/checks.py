"""Randomized invariant suites for the barrier/Newton layers.

Each suite runs `trials` independent random instances (small polytopes,
random shifts, worst-case oracle noise where applicable) and checks one
inequality per trial. The CLI `check` command and the acceptance tests both
drive these functions, so a counterexample found in either place reproduces
from (suite, seed, trial index).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .barrier import Barrier, HybridBarrier, LogBarrier, OracleConfig, grad_oracle, hess_oracle
from .domain import Polytope, build_box, is_strictly_feasible, polytope_new
from .linalg import dual_quad_norm, quad_norm, spd_factorize, spd_solve
from .newton import ShiftedObjective, damped_newton_minimize, newton_decrement

SLACK = 1e-9


@dataclass
class SuiteReport:
    name: str
    passes: int = 0
    total: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passes == self.total

    def record(self, ok: bool, detail: str) -> None:
        self.total += 1
        if ok:
            self.passes += 1
        elif len(self.failures) < 5:
            self.failures.append(detail)

    def summary(self) -> str:
        status = "ok" if self.ok else "FAIL"
        line = f"{self.name}: {self.passes}/{self.total} {status}"
        if self.failures:
            line += f"\n  first counterexample: {self.failures[0]}"
        return line


def random_polytope(rng: np.random.Generator, d: int, m_extra: int) -> Polytope:
    """Box [-2, 2]^d plus a few random facets, origin strictly interior."""
    box = build_box(d, -2.0, 2.0)
    rows = [box.A]
    offs = [box.b]
    for _ in range(m_extra):
        a = rng.standard_normal(d)
        a /= np.linalg.norm(a)
        rows.append(a[None, :])
        offs.append(np.array([-rng.uniform(0.3, 1.5)]))  # slack at origin in [0.3, 1.5]
    return polytope_new(np.vstack(rows), np.concatenate(offs), np.zeros(d))


def random_interior_point(rng: np.random.Generator, B: Barrier, steps: int = 3,
                          max_radius: float = 0.9) -> np.ndarray:
    """Random walk of Dikin-ellipsoid steps from the witness (always interior)."""
    w = B.domain.interior_witness.astype(float).copy()
    M = B.params.M
    for _ in range(steps):
        F = B.hessian_factor(w)
        z = rng.standard_normal(F.dim)
        z /= np.linalg.norm(z)
        # L^-T z has local norm ||z|| = 1 at w
        direction = solve_triangular(F.chol, z, lower=True, trans="T", check_finite=False)
        w = w + rng.uniform(0.0, max_radius) / M * direction
    return w


def shifted_with_decrement(rng: np.random.Generator, B: Barrier, w: np.ndarray,
                           lam: float) -> ShiftedObjective:
    """Objective barrier + shift whose Newton decrement at w is exactly lam."""
    F = B.hessian_factor(w)
    z = rng.standard_normal(F.dim)
    shift = -B.gradient(w) + lam * (F.chol @ z) / np.linalg.norm(z)
    return ShiftedObjective(B, shift)


def _trial_instance(rng: np.random.Generator) -> tuple[LogBarrier, np.ndarray]:
    d = int(rng.integers(1, 6))
    m_extra = int(rng.integers(0, max(1, 12 - 2 * d) + 1))
    B = LogBarrier(random_polytope(rng, d, m_extra))
    return B, random_interior_point(rng, B)


def suite_newton_decrement_decrease(trials: int = 100, seed: int = 0) -> SuiteReport:
    """One approximate Newton step under worst-case oracle noise shrinks the decrement:

    lambda(y+) <= 20(1+a)e + (1 + 20(1+a)e) * (9 M lambda^2 + 2.5 a lambda).
    """
    rng = np.random.default_rng(seed)
    rep = SuiteReport("newton-decrement-decrease")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        M = B.params.M
        lam = rng.uniform(0.0, 1.0 / (40.0 * M))
        obj = shifted_with_decrement(rng, B, w, lam)
        eps = rng.uniform(0.0, 1.0 / (40.0 * M) * 0.999)
        alpha = rng.uniform(0.0, 0.199)
        cfg = OracleConfig(eps=eps, alpha=alpha, noise="adversarial", seed=seed * 100003 + trial)
        g_hat = grad_oracle(B, w, cfg) + obj.shift
        _, F = hess_oracle(B, w, cfg)
        y_plus = w - spd_solve(F, g_hat)
        lam_plus = newton_decrement(obj, y_plus)
        noise_term = 20.0 * (1.0 + alpha) * eps
        bound = noise_term + (1.0 + noise_term) * (9.0 * M * lam**2 + 2.5 * alpha * lam) + SLACK
        rep.record(lam_plus <= bound,
                   f"trial {trial}: lam={lam:.3e} eps={eps:.3e} alpha={alpha:.3e} "
                   f"lam_plus={lam_plus:.6e} > bound={bound:.6e}")
    return rep


def suite_quadratic_convergence(trials: int = 200, seed: int = 1) -> SuiteReport:
    """Exact Newton step: lambda(x+) <= M lambda^2 / (1 - M lambda)^2."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("quadratic-convergence")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        M = B.params.M
        lam = rng.uniform(1e-4, 0.5 / M)
        obj = shifted_with_decrement(rng, B, w, lam)
        F = obj.hessian_factor(w)
        x_plus = w - spd_solve(F, obj.gradient(w))
        lam_plus = newton_decrement(obj, x_plus)
        bound = M * lam**2 / (1.0 - M * lam) ** 2 + SLACK
        rep.record(lam_plus <= bound,
                   f"trial {trial}: lam={lam:.3e} lam_plus={lam_plus:.6e} > {bound:.6e}")
    return rep


def suite_hessian_stability(trials: int = 200, seed: int = 2) -> SuiteReport:
    """Hessians at local distance r stay within [(1-r)^2, (1-r)^-2] spectrally."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("hessian-stability")
    for trial in range(trials):
        B, x = _trial_instance(rng)
        M = B.params.M
        Fx = B.hessian_factor(x)
        z = rng.standard_normal(Fx.dim)
        z /= np.linalg.norm(z)
        r = rng.uniform(0.0, 0.95 / M)
        w = x + r * solve_triangular(Fx.chol, z, lower=True, trans="T", check_finite=False)
        Hw = B.hessian(w)
        Wmat = solve_triangular(Fx.chol, Hw, lower=True, check_finite=False)
        Wmat = solve_triangular(Fx.chol, Wmat.T, lower=True, check_finite=False)
        eigs = np.linalg.eigvalsh(0.5 * (Wmat + Wmat.T))
        lo, hi = (1.0 - M * r) ** 2, (1.0 - M * r) ** -2
        ok = eigs[0] >= lo - SLACK and eigs[-1] <= hi + SLACK
        rep.record(ok, f"trial {trial}: r={r:.3e} eig range [{eigs[0]:.6e}, {eigs[-1]:.6e}] "
                       f"outside [{lo:.6e}, {hi:.6e}]")
    return rep


def suite_dikin_feasibility(trials: int = 200, seed: int = 3) -> SuiteReport:
    """Points at local radius 0.999/M around an interior point stay strictly feasible."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("dikin-feasibility")
    for trial in range(trials):
        B, x = _trial_instance(rng)
        M = B.params.M
        F = B.hessian_factor(x)
        z = rng.standard_normal(F.dim)
        z /= np.linalg.norm(z)
        w = x + (0.999 / M) * solve_triangular(F.chol, z, lower=True, trans="T",
                                               check_finite=False)
        ok = is_strictly_feasible(B.domain, w, margin=0.0)
        rep.record(ok, f"trial {trial}: boundary sample of the Dikin ellipsoid infeasible")
    return rep


def suite_newton_step_norm(trials: int = 200, seed: int = 4) -> SuiteReport:
    """||H^-1 grad f|| in the exact local norm is at most lambda / (1 - alpha)."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("newton-step-norm")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        lam = rng.uniform(1e-4, 0.5)
        obj = shifted_with_decrement(rng, B, w, lam)
        alpha = rng.uniform(0.0, 0.3)
        Hx = B.hessian(w)
        F = spd_factorize(Hx)
        signs = np.where(rng.random(F.dim) < 0.5, 1.0, -1.0)
        H = F.chol @ np.diag(1.0 + alpha * signs) @ F.chol.T  # exactly alpha-sandwiched
        step = spd_solve(spd_factorize(H), obj.gradient(w))
        bound = lam / (1.0 - alpha) + SLACK
        val = quad_norm(step, Hx)
        rep.record(val <= bound, f"trial {trial}: step norm {val:.6e} > {bound:.6e}")
    return rep


def suite_minimizer_proximity(trials: int = 200, seed: int = 5) -> SuiteReport:
    """Distance to the objective's minimizer is at most lambda / (1 - M lambda)."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("minimizer-proximity")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        M = B.params.M
        lam = rng.uniform(1e-4, 0.499 / M)
        obj = shifted_with_decrement(rng, B, w, lam)
        x_f = damped_newton_minimize(obj, w, tol=1e-12, max_iter=2000)
        dist = quad_norm(w - x_f, obj.hessian(x_f))
        bound = lam / (1.0 - M * lam) + 1e-6
        rep.record(dist <= bound, f"trial {trial}: lam={lam:.3e} dist={dist:.6e} > {bound:.6e}")
    return rep


def suite_barrier_gradients(trials: int = 200, seed: int = 6) -> SuiteReport:
    """Analytic gradients/Hessians agree with central finite differences.

    Alternates between the plain log-barrier and its hybrid (quadratic-added)
    variant so both evaluation paths are exercised.
    """
    rng = np.random.default_rng(seed)
    rep = SuiteReport("barrier-gradients")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        if trial % 2 == 1:
            R = 3.0 * np.sqrt(B.domain.dim)
            B = HybridBarrier(B, nu=float(rng.uniform(1.0, 5.0)), R=R)
        g = B.gradient(w)
        d = w.shape[0]
        h = 1e-6
        g_fd = np.empty(d)
        for i in range(d):
            e = np.zeros(d)
            e[i] = h
            g_fd[i] = (B.value(w + e) - B.value(w - e)) / (2.0 * h)
        ok = np.linalg.norm(g_fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        hv_fd = (B.gradient(w + h * v) - B.gradient(w - h * v)) / (2.0 * h)
        hv = B.hessian(w) @ v
        ok = ok and np.linalg.norm(hv_fd - hv) <= 1e-4 * max(1.0, np.linalg.norm(hv))
        rep.record(bool(ok), f"trial {trial}: finite-difference mismatch")
    return rep


def suite_nu_property(trials: int = 200, seed: int = 7) -> SuiteReport:
    """Log-barrier Newton decrement squared never exceeds the constraint count."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("nu-property")
    for trial in range(trials):
        B, w = _trial_instance(rng)
        lam = dual_quad_norm(B.gradient(w), B.hessian_factor(w))
        nu = B.params.nu
        rep.record(lam**2 <= nu + SLACK,
                   f"trial {trial}: grad' H^-1 grad = {lam**2:.6e} > nu = {nu}")
    return rep


SUITES = {
    "newton-decrement-decrease": (suite_newton_decrement_decrease, 100),
    "quadratic-convergence": (suite_quadratic_convergence, 200),
    "hessian-stability": (suite_hessian_stability, 200),
    "dikin-feasibility": (suite_dikin_feasibility, 200),
    "newton-step-norm": (suite_newton_step_norm, 200),
    "minimizer-proximity": (suite_minimizer_proximity, 200),
    "barrier-gradients": (suite_barrier_gradients, 200),
    "nu-property": (suite_nu_property, 200),
}


def run_suite(name: str, trials: int | None = None, seed: int | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    fn, default_trials = SUITES[name]
    kwargs = {"trials": trials if trials is not None else default_trials}
    if seed is not None:
        kwargs["seed"] = seed
    return fn(**kwargs)
