"""Experiment orchestration: run algorithms against loss streams, persist traces.

A run is deterministic given its seed (all trace columns except wall time).
Loss events are kept in memory so the best fixed comparator can be computed
by replay afterwards; regret is always recomputable from the raw log, which
guards the bookkeeping in the trace itself.
"""

from __future__ import annotations

import math
import time
import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .algorithm import (
    BaronsParams,
    EuclideanBound,
    LocalNormBound,
    barons_init,
    barons_round,
    compute_params,
)
from .barrier import Barrier, HybridBarrier, LogBarrier, OracleConfig
from .baselines import ftrl_exact_round, ogd_simplex_round, project_simplex
from .domain import (
    Polytope,
    build_box,
    build_reduced_simplex,
    is_strictly_feasible,
    lift_to_simplex,
    load_polytope,
    shrink_toward,
)
from .linalg import NotSpd, dual_quad_norm
from .losses import (
    LossEvent,
    features_simplex,
    labels_logistic,
    linear_adversary_iid_sphere,
    linear_loss,
    logloss_linear,
    portfolio_loss,
    returns_iid,
    returns_two_asset_adversarial,
)
from .newton import MaxIterExceeded, analytic_center, damped_newton_minimize

TRACE_COLUMNS = ("t", "loss", "local_norm_g", "decrement", "landmark_updated",
                 "landmark_distance", "wall_time_us")

FEASIBILITY_MARGIN = 1e-12  # numerical-dust guard on strictness checks


class IoError(OSError):
    """Trace file could not be read or written."""


class ConfigError(ValueError):
    """Run configuration is inconsistent; message names the offending key."""


@dataclass(frozen=True)
class RunConfig:
    """Flat description of one experiment (mirrors the config-file schema)."""

    T: int
    seed: int = 0
    domain_kind: str = "box"  # box | reduced_simplex | file
    domain_d: int = 2
    domain_lo: float = 0.0
    domain_hi: float = 1.0
    domain_path: str | None = None
    barrier_kind: str = "log"  # log | hybrid
    barrier_nu: float | None = None  # hybrid only; defaults to the base barrier's nu
    barrier_R: float | None = None  # hybrid only; defaults to an enclosing-ball radius
    algorithm: str = "barons"  # barons | ftrl_exact | ogd
    mode: str = "practical"  # strict | practical
    schedule: str = "local"  # local | euclidean
    b: float = 2.0
    G: float = 1.0
    R: float | None = None
    eta: float | None = None  # explicit schedule overrides
    eps: float | None = None
    monitor_every: int = 50  # 0 disables decrement monitoring
    noise: str = "off"  # oracle noise: off | adversarial
    loss_family: str = "linear"  # linear | portfolio | logloss
    generator: str = "iid_sphere"  # iid_sphere | returns_iid | two_asset | logistic
    gen_lo: float = 0.5
    gen_hi: float = 1.5
    c: float | None = None  # comparator shrink; defaults to 1/T
    compute_regret: bool = True
    trace_path: str | None = None


@dataclass
class Trace:
    """Per-round records plus '#'-prefixed key=value metadata."""

    t: np.ndarray
    loss: np.ndarray
    local_norm_g: np.ndarray
    decrement: np.ndarray
    landmark_updated: np.ndarray
    landmark_distance: np.ndarray
    wall_time_us: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)


@dataclass
class LossLog:
    """Replayable record of the loss stream: family tag plus per-round metadata."""

    family: str
    metas: list

    def __len__(self) -> int:
        return len(self.metas)


@dataclass
class RunResult:
    config: RunConfig
    trace: Trace
    loss_log: LossLog
    domain: Polytope
    barrier: Barrier
    params: BaronsParams | None
    center: np.ndarray
    final_w: np.ndarray
    comparator: np.ndarray | None = None
    final_regret: float | None = None


# ---------------------------------------------------------------------------
# builders


def build_domain(cfg: RunConfig) -> Polytope:
    if cfg.domain_kind == "box":
        return build_box(cfg.domain_d, cfg.domain_lo, cfg.domain_hi)
    if cfg.domain_kind == "reduced_simplex":
        return build_reduced_simplex(cfg.domain_d)
    if cfg.domain_kind == "file":
        if not cfg.domain_path:
            raise ConfigError("domain.path is required when domain.kind = file")
        return load_polytope(cfg.domain_path)
    raise ConfigError(f"domain.kind: unknown value {cfg.domain_kind!r}")


def enclosing_radius(cfg: RunConfig) -> float:
    """Radius of an origin-centered ball containing the domain."""
    if cfg.domain_kind == "box":
        return math.sqrt(cfg.domain_d) * max(abs(cfg.domain_lo), abs(cfg.domain_hi))
    if cfg.domain_kind == "reduced_simplex":
        return 1.0
    P = build_domain(cfg)
    # fall back to a crude bound from the witness; file domains may override via R
    return float(np.linalg.norm(P.interior_witness)) + 1.0


def build_barrier(cfg: RunConfig, domain: Polytope) -> Barrier:
    base = LogBarrier(domain)
    if cfg.barrier_kind == "log":
        return base
    if cfg.barrier_kind == "hybrid":
        nu = cfg.barrier_nu if cfg.barrier_nu is not None else base.params.nu
        R = cfg.barrier_R if cfg.barrier_R is not None else enclosing_radius(cfg)
        return HybridBarrier(base, nu=nu, R=R)
    raise ConfigError(f"barrier.kind: unknown value {cfg.barrier_kind!r}")


def resolve_params(cfg: RunConfig, barrier: Barrier) -> BaronsParams:
    if cfg.schedule == "local":
        bound = LocalNormBound(cfg.b)
    elif cfg.schedule == "euclidean":
        R = cfg.R if cfg.R is not None else enclosing_radius(cfg)
        bound = EuclideanBound(cfg.G, R)
    else:
        raise ConfigError(f"algorithm.schedule: unknown value {cfg.schedule!r}")
    # the schedule formulas are posed for horizons >= 2; a T=1 run still works
    return compute_params(barrier.params, bound, max(cfg.T, 2), c=cfg.c, mode=cfg.mode,
                          eta=cfg.eta, eps=cfg.eps)


class LossStream:
    """Adapter from a generator to (evaluate at point) -> LossEvent."""

    def __init__(self, cfg: RunConfig, domain: Polytope):
        self.family = cfg.loss_family
        self.reduced = cfg.domain_kind == "reduced_simplex"
        d_amb = domain.dim
        if self.family == "linear":
            if cfg.generator != "iid_sphere":
                raise ConfigError(f"loss.generator: {cfg.generator!r} invalid for linear losses")
            self._src = linear_adversary_iid_sphere(cfg.seed, d_amb, cfg.G)
        elif self.family == "portfolio":
            if not self.reduced:
                raise ConfigError("loss.family: portfolio requires a reduced_simplex domain")
            d_full = d_amb + 1
            if cfg.generator == "returns_iid":
                self._src = returns_iid(cfg.seed, d_full, cfg.gen_lo, cfg.gen_hi)
            elif cfg.generator == "two_asset":
                if d_full != 2:
                    raise ConfigError("loss.generator: two_asset requires domain.d = 2")
                self._src = returns_two_asset_adversarial(cfg.seed)
            else:
                raise ConfigError(f"loss.generator: {cfg.generator!r} invalid for portfolio losses")
        elif self.family == "logloss":
            if self.reduced:
                raise ConfigError("loss.family: logloss runs on a box domain (predictions w'x)")
            if cfg.generator != "logistic":
                raise ConfigError(f"loss.generator: {cfg.generator!r} invalid for logloss")
            self._src = labels_logistic(cfg.seed + 1, features_simplex(cfg.seed, d_amb))
        else:
            raise ConfigError(f"loss.family: unknown value {cfg.loss_family!r}")

    def evaluate(self, w: np.ndarray) -> LossEvent:
        if self.family == "linear":
            return linear_loss(w, next(self._src))
        if self.family == "portfolio":
            return portfolio_loss(w, next(self._src))
        x, y = next(self._src)
        return logloss_linear(w, x, y)

    def replay(self, meta: dict, w: np.ndarray) -> float:
        return replay_loss(self.family, meta, w)


def replay_loss(family: str, meta: dict, w: np.ndarray) -> float:
    """Evaluate a logged loss at an arbitrary point of the same domain."""
    if family == "linear":
        return float(meta["g"] @ w)
    if family == "portfolio":
        return float(-np.log(lift_to_simplex(w) @ meta["r"]))
    if family == "logloss":
        p = float(w @ meta["x"])
        return float(-np.log(p) if meta["y"] == 1 else -np.log1p(-p))
    raise ValueError(f"unknown loss family {family!r}")


# ---------------------------------------------------------------------------
# the run loop


def _local_norm(barrier: Barrier, w: np.ndarray, g: np.ndarray) -> float:
    try:
        return dual_quad_norm(g, barrier.hessian_factor(w))
    except (NotSpd, ValueError):
        return math.nan


def _attach_round(exc: Exception, t: int) -> None:
    """Prefix propagated algorithm errors with the round index (in place)."""
    msg = str(exc.args[0]) if exc.args else str(exc)
    if not msg.startswith("round "):
        exc.args = (f"round {t}: {msg}",) + tuple(exc.args[1:])


def run_experiment(cfg: RunConfig) -> RunResult:
    """Run one experiment; deterministic given the seed except wall times."""
    if cfg.T < 1:
        raise ConfigError(f"run.T: need T >= 1, got {cfg.T}")
    domain = build_domain(cfg)
    barrier = build_barrier(cfg, domain)
    stream = LossStream(cfg, domain)
    c = cfg.c if cfg.c is not None else 1.0 / max(cfg.T, 2)
    if not 0.0 < c < 1.0:
        raise ConfigError(f"run.c: need c in (0, 1), got {c}")

    if cfg.algorithm == "barons":
        result = _run_barons(cfg, domain, barrier, stream)
    elif cfg.algorithm == "ftrl_exact":
        result = _run_ftrl(cfg, domain, barrier, stream)
    elif cfg.algorithm == "ogd":
        result = _run_ogd(cfg, domain, barrier, stream)
    else:
        raise ConfigError(f"algorithm.name: unknown value {cfg.algorithm!r}")

    if cfg.compute_regret:
        comparator = best_fixed_comparator(result.loss_log, barrier, c, center=result.center)
        curve = regret_curve(result.trace, comparator, result.loss_log)
        result.comparator = comparator
        result.final_regret = float(curve[-1])
        result.trace.metadata["comparator_delta"] = format(1e-8 * cfg.T, ".17g")
        result.trace.metadata["comparator_total_loss"] = format(
            sum(replay_loss(result.loss_log.family, m, comparator) for m in result.loss_log.metas), ".17g")
        result.trace.metadata["final_regret"] = format(result.final_regret, ".17g")
    return result


def _base_metadata(cfg: RunConfig) -> dict:
    return {
        "algorithm": cfg.algorithm,
        "loss_family": cfg.loss_family,
        "generator": cfg.generator,
        "domain_kind": cfg.domain_kind,
        "domain_d": str(cfg.domain_d),
        "T": str(cfg.T),
        "seed": str(cfg.seed),
        "mode": cfg.mode,
    }


def _run_barons(cfg: RunConfig, domain: Polytope, barrier: Barrier, stream: LossStream) -> RunResult:
    params = resolve_params(cfg, barrier)
    oracle = OracleConfig(eps=params.eps, alpha=params.alpha_hess, noise=cfg.noise,
                          seed=cfg.seed + 1)
    state = barons_init(barrier, params, oracle=oracle)
    center = state.w.copy()
    T = cfg.T
    cols = _empty_columns(T)
    metas = []
    max_local = 0.0
    infeasible_rounds = 0
    for t in range(1, T + 1):
        t0 = time.perf_counter()
        ev = stream.evaluate(state.w)
        metas.append(ev.meta)
        ln = _local_norm(barrier, state.w, ev.g)
        max_local = max(max_local, ln) if not math.isnan(ln) else max_local
        monitor = cfg.monitor_every > 0 and t % cfg.monitor_every == 0
        try:
            rr = barons_round(state, ev.g, monitor=monitor)
        except Exception as exc:
            _attach_round(exc, t)
            raise
        if not is_strictly_feasible(barrier.domain, state.w, margin=FEASIBILITY_MARGIN):
            infeasible_rounds += 1
        _fill_row(cols, t, ev.loss, ln, rr.decrement, int(rr.landmark_updated),
                  rr.landmark_distance, (time.perf_counter() - t0) * 1e6)
    md = _base_metadata(cfg)
    md.update({
        "eta": format(params.eta, ".17g"),
        "eps": format(params.eps, ".17g"),
        "alpha_hess": format(params.alpha_hess, ".17g"),
        "m_newton": str(params.m_newton),
        "landmark_threshold": format(params.landmark_threshold, ".17g"),
        "lambda_target": format(params.lambda_target, ".17g"),
        "landmark_updates": str(state.stats.landmark_updates),
        "safety_fallbacks": str(state.stats.safety_fallbacks),
        "target_violations": str(state.stats.target_violations),
        "grad_calls": str(barrier.grad_calls),
        "hess_calls": str(barrier.hess_calls),
        "max_local_norm": format(max_local, ".17g"),
        "feasibility_violations": str(infeasible_rounds),
        "schedule_warnings": "|".join(params.warnings),
    })
    if cfg.schedule == "local" and max_local > cfg.b:
        md["local_norm_bound_exceeded"] = "1"
        _warnings.warn(f"observed local gradient norm {max_local:.3g} exceeds configured b={cfg.b}")
    trace = _finish_trace(cols, md)
    return RunResult(config=cfg, trace=trace, loss_log=LossLog(cfg.loss_family, metas),
                     domain=domain, barrier=barrier, params=params, center=center,
                     final_w=state.w.copy())


def _run_ftrl(cfg: RunConfig, domain: Polytope, barrier: Barrier, stream: LossStream) -> RunResult:
    params = resolve_params(cfg, barrier)
    w = analytic_center(barrier)
    center = w.copy()
    s = np.zeros(domain.dim)
    cols = _empty_columns(cfg.T)
    metas = []
    for t in range(1, cfg.T + 1):
        t0 = time.perf_counter()
        ev = stream.evaluate(w)
        metas.append(ev.meta)
        ln = _local_norm(barrier, w, ev.g)
        s = s + params.eta * ev.g
        try:
            w = ftrl_exact_round(barrier, s, w)
        except Exception as exc:
            _attach_round(exc, t)
            raise
        _fill_row(cols, t, ev.loss, ln, math.nan, 0, math.nan,
                  (time.perf_counter() - t0) * 1e6)
    md = _base_metadata(cfg)
    md["eta"] = format(params.eta, ".17g")
    trace = _finish_trace(cols, md)
    return RunResult(config=cfg, trace=trace, loss_log=LossLog(cfg.loss_family, metas),
                     domain=domain, barrier=barrier, params=params, center=center,
                     final_w=w.copy())


def _run_ogd(cfg: RunConfig, domain: Polytope, barrier: Barrier, stream: LossStream) -> RunResult:
    if cfg.domain_kind != "reduced_simplex":
        raise ConfigError("algorithm.name: ogd is provided only on the reduced_simplex domain")
    d_full = domain.dim + 1
    w_full = np.full(d_full, 1.0 / d_full)
    center = w_full[:-1].copy()
    R_diam = math.sqrt(2.0)
    cols = _empty_columns(cfg.T)
    metas = []
    for t in range(1, cfg.T + 1):
        t0 = time.perf_counter()
        if cfg.loss_family != "portfolio":
            raise ConfigError("loss.family: ogd is wired for portfolio losses only")
        r = next(stream._src)
        wealth = float(w_full @ r)
        ev = LossEvent(loss=-math.log(wealth), g=-r / wealth, meta={"r": r})
        metas.append(ev.meta)
        ln = _local_norm(barrier, w_full[:-1], ev.g[:-1] - ev.g[-1]) \
            if np.all(w_full > 0) and float(np.sum(w_full[:-1])) < 1.0 else math.nan
        w_full = ogd_simplex_round(w_full, ev.g, step=R_diam / (cfg.G * math.sqrt(t)))
        _fill_row(cols, t, ev.loss, ln, math.nan, 0, math.nan,
                  (time.perf_counter() - t0) * 1e6)
    md = _base_metadata(cfg)
    trace = _finish_trace(cols, md)
    # loss metas are in full coordinates; replay handles both via the family tag
    return RunResult(config=cfg, trace=trace, loss_log=LossLog(cfg.loss_family, metas),
                     domain=domain, barrier=barrier, params=None, center=center,
                     final_w=project_simplex(w_full)[:-1])


def _empty_columns(T: int) -> dict:
    return {
        "t": np.zeros(T, dtype=int),
        "loss": np.zeros(T),
        "local_norm_g": np.zeros(T),
        "decrement": np.zeros(T),
        "landmark_updated": np.zeros(T, dtype=int),
        "landmark_distance": np.zeros(T),
        "wall_time_us": np.zeros(T),
    }


def _fill_row(cols, t, loss, ln, dec, upd, dist, wt):
    i = t - 1
    cols["t"][i] = t
    cols["loss"][i] = loss
    cols["local_norm_g"][i] = ln
    cols["decrement"][i] = dec
    cols["landmark_updated"][i] = upd
    cols["landmark_distance"][i] = dist
    cols["wall_time_us"][i] = wt


def _finish_trace(cols: dict, metadata: dict) -> Trace:
    return Trace(metadata=metadata, **cols)


# ---------------------------------------------------------------------------
# comparator and regret


class ReplayObjective:
    """kappa * sum of logged losses + barrier; self-concordant with the barrier's M.

    Every supported loss term is either linear or -ln(affine), so scaling by
    kappa >= 1 does not raise the self-concordance constant.
    """

    def __init__(self, barrier: Barrier, loss_log: LossLog, kappa: float):
        self.barrier = barrier
        self.kappa = kappa
        self.family = loss_log.family
        if self.family == "linear":
            self._gsum = np.sum(np.array([m["g"] for m in loss_log.metas]), axis=0)
        elif self.family == "portfolio":
            R = np.array([m["r"] for m in loss_log.metas])
            self._R = R
            self._Rt = R[:, :-1] - R[:, -1:]
        elif self.family == "logloss":
            self._X = np.array([m["x"] for m in loss_log.metas])
            self._y = np.array([m["y"] for m in loss_log.metas])
        else:
            raise ValueError(f"unknown loss family {self.family!r}")

    @property
    def sc_constant(self) -> float:
        return self.barrier.params.M

    def _loss_grad_hess(self, w: np.ndarray):
        if self.family == "linear":
            return self._gsum, 0.0
        if self.family == "portfolio":
            wealth = self._R @ lift_to_simplex(w)
            grad = -self._Rt.T @ (1.0 / wealth)
            hess = (self._Rt / wealth[:, None] ** 2).T @ self._Rt
            return grad, hess
        p = self._X @ w
        z = np.where(self._y == 1, p, 1.0 - p)
        if np.any(z <= 0):
            raise PredictionDomainError("comparator iterate left the prediction domain")
        sgn = np.where(self._y == 1, 1.0, -1.0)
        grad = -self._X.T @ (sgn / z)
        hess = (self._X / z[:, None] ** 2).T @ self._X
        return grad, hess

    def gradient(self, w: np.ndarray) -> np.ndarray:
        g, _ = self._loss_grad_hess(w)
        return self.kappa * g + self.barrier.gradient(w)

    def hessian(self, w: np.ndarray) -> np.ndarray:
        g, h = self._loss_grad_hess(w)
        H = self.barrier.hessian(w)
        if np.ndim(h) == 2:
            H = H + self.kappa * h
        return H

    def hessian_factor(self, w):
        from .linalg import spd_factorize

        return spd_factorize(self.hessian(w))


class PredictionDomainError(ValueError):
    pass


def best_fixed_comparator(loss_log: LossLog, barrier: Barrier, c: float,
                          center: np.ndarray | None = None,
                          delta_per_round: float = 1e-8) -> np.ndarray:
    """Minimize sum of logged losses + delta * barrier, then shrink toward the center.

    delta = delta_per_round * T. Internally solved as the equivalent scaled
    problem kappa * sum(losses) + barrier with kappa = 1/delta, ramping kappa
    geometrically with warm starts so damped Newton stays in its basin.
    """
    T = len(loss_log)
    delta = delta_per_round * max(T, 1)
    if center is None:
        center = analytic_center(barrier)
    kappa_target = 1.0 / delta
    w = np.asarray(center, dtype=float).copy()
    kappa = 1.0
    while True:
        obj = ReplayObjective(barrier, loss_log, kappa)
        try:
            w = damped_newton_minimize(obj, w, tol=1e-8, max_iter=2000)
        except MaxIterExceeded as exc:
            # near-vertex optima hit the double-precision decrement floor;
            # a 1e-6 decrement biases the comparator far less than the
            # delta-regularization already reported in the metadata
            if exc.decrement > 1e-6:
                raise
            w = exc.best
        if kappa >= kappa_target:
            break
        kappa = min(kappa * 4.0, kappa_target)
    return shrink_toward(w, c, center)


def regret_curve(trace: Trace, comparator: np.ndarray, loss_log: LossLog) -> np.ndarray:
    """Cumulative regret sum(loss_t) - sum(loss_t(comparator)) per round."""
    if len(trace) != len(loss_log):
        raise ValueError(f"trace has {len(trace)} rows but loss log has {len(loss_log)}")
    comp = np.array([replay_loss(loss_log.family, m, comparator) for m in loss_log.metas])
    return np.cumsum(trace.loss - comp)


# ---------------------------------------------------------------------------
# trace persistence


def write_csv(trace: Trace, path: str) -> None:
    """Documented schema: '#' metadata lines, fixed header, 17-digit numbers."""
    try:
        with open(path, "w") as fh:
            for key, value in trace.metadata.items():
                fh.write(f"# {key}={value}\n")
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for i in range(len(trace)):
                fields = [
                    str(int(trace.t[i])),
                    _num(trace.loss[i]),
                    _num(trace.local_norm_g[i]),
                    _num(trace.decrement[i]),
                    str(int(trace.landmark_updated[i])),
                    _num(trace.landmark_distance[i]),
                    _num(trace.wall_time_us[i]),
                ]
                fh.write(",".join(fields) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write trace to {path}: {exc}") from exc


def _num(x: float) -> str:
    if math.isnan(x):
        return ""
    return format(float(x), ".17g")


def read_csv(path: str) -> Trace:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read trace from {path}: {exc}") from exc
    metadata = {}
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, _, value = ln[1:].strip().partition("=")
            metadata[key.strip()] = value
        elif ln.strip():
            body.append(ln)
    if not body:
        raise IoError(f"{path}: no header row")
    header = tuple(body[0].split(","))
    if header != TRACE_COLUMNS:
        missing = [c for c in TRACE_COLUMNS if c not in header]
        raise IoError(f"{path}: bad header; missing columns {missing}" if missing
                      else f"{path}: bad column order {header}")
    rows = [ln.split(",") for ln in body[1:]]
    n = len(rows)
    cols = _empty_columns(n)
    for i, row in enumerate(rows):
        if len(row) != len(TRACE_COLUMNS):
            raise IoError(f"{path}: row {i + 1} has {len(row)} fields")
        cols["t"][i] = int(row[0])
        cols["loss"][i] = _parse(row[1])
        cols["local_norm_g"][i] = _parse(row[2])
        cols["decrement"][i] = _parse(row[3])
        cols["landmark_updated"][i] = int(row[4])
        cols["landmark_distance"][i] = _parse(row[5])
        cols["wall_time_us"][i] = _parse(row[6])
    return Trace(metadata=metadata, **cols)


def _parse(s: str) -> float:
    return math.nan if s == "" else float(s)
