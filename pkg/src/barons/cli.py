"""Command-line entry point: run experiments, invariant suites, parameter math.

Exit codes: 0 success; 1 check-suite failure; 2 configuration error (the
message names the offending key or inequality); 3 runtime divergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .algorithm import DivergenceDetected, EuclideanBound, LocalNormBound, PreconditionViolated, compute_params
from .barrier import BarrierParams, NotInterior
from .checks import SUITES, run_suite
from .harness import ConfigError, RunConfig, run_experiment, write_csv
from .newton import MaxIterExceeded

# section.key -> RunConfig field and type
CONFIG_KEYS = {
    "domain.kind": ("domain_kind", str),
    "domain.d": ("domain_d", int),
    "domain.lo": ("domain_lo", float),
    "domain.hi": ("domain_hi", float),
    "domain.path": ("domain_path", str),
    "barrier.kind": ("barrier_kind", str),
    "barrier.nu": ("barrier_nu", float),
    "barrier.R": ("barrier_R", float),
    "algorithm.name": ("algorithm", str),
    "algorithm.mode": ("mode", str),
    "algorithm.schedule": ("schedule", str),
    "algorithm.b": ("b", float),
    "algorithm.G": ("G", float),
    "algorithm.R": ("R", float),
    "algorithm.eta": ("eta", float),
    "algorithm.eps": ("eps", float),
    "algorithm.monitor_every": ("monitor_every", int),
    "algorithm.noise": ("noise", str),
    "loss.family": ("loss_family", str),
    "loss.generator": ("generator", str),
    "loss.lo": ("gen_lo", float),
    "loss.hi": ("gen_hi", float),
    "run.T": ("T", int),
    "run.seed": ("seed", int),
    "run.c": ("c", float),
    "run.trace": ("trace_path", str),
    "run.compute_regret": ("compute_regret", bool),
}


def load_config(path: str, overrides: list[str] | None = None) -> RunConfig:
    """Parse a flat sectioned key=value file into a RunConfig."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    fields = {}
    for section, entries in doc.items():
        if not isinstance(entries, dict):
            raise ConfigError(f"unknown key: {section} (top-level keys must be sections)")
        for key, value in entries.items():
            _apply_key(fields, f"{section}.{key}", value)
    for item in overrides or []:
        key, _, raw = item.partition("=")
        if not _:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        _apply_key(fields, key.strip(), _coerce(raw.strip()))
    env_seed = os.environ.get("BARONS_SEED")
    if env_seed is not None:
        try:
            fields["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"BARONS_SEED must be an integer, got {env_seed!r}") from exc
    if "T" not in fields:
        raise ConfigError("run.T is required")
    try:
        return RunConfig(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _apply_key(fields: dict, dotted: str, value) -> None:
    if dotted not in CONFIG_KEYS:
        raise ConfigError(f"unknown key: {dotted}")
    name, typ = CONFIG_KEYS[dotted]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, typ) or (typ is int and isinstance(value, bool)):
        raise ConfigError(f"{dotted}: expected {typ.__name__}, got {value!r}")
    fields[name] = value


def _coerce(raw: str):
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for typ in (int, float):
        try:
            return typ(raw)
        except ValueError:
            pass
    return raw.strip("\"'")


def _run_one(args_tuple) -> tuple[str, str, int]:
    path, overrides, domain_file = args_tuple
    try:
        cfg = load_config(path, overrides)
        if domain_file:
            cfg = RunConfig(**{**cfg.__dict__, "domain_kind": "file", "domain_path": domain_file})
        result = run_experiment(cfg)
    except (ConfigError, PreconditionViolated) as exc:
        return path, f"config error: {exc}", 2
    except (DivergenceDetected, MaxIterExceeded, NotInterior) as exc:
        return path, f"divergence: {exc}", 3
    if cfg.trace_path:
        os.makedirs(os.path.dirname(cfg.trace_path) or ".", exist_ok=True)
        write_csv(result.trace, cfg.trace_path)
    md = result.trace.metadata
    summary = (f"final_regret={md.get('final_regret', 'nan')} "
               f"landmark_updates={md.get('landmark_updates', '0')} "
               f"max_local_norm={md.get('max_local_norm', 'nan')}")
    return path, summary, 0


def cmd_run(args) -> int:
    overrides = list(args.set)
    if args.monitor_every is not None:
        overrides.append(f"algorithm.monitor_every={args.monitor_every}")
    jobs = [(path, overrides, args.domain_file) for path in args.config]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    code = 0
    for path, summary, rc in results:
        prefix = f"{path}: " if len(results) > 1 else ""
        print(prefix + summary, file=sys.stderr if rc else sys.stdout)
        code = max(code, rc)
    return code


def cmd_check(args) -> int:
    if args.suite == "all":
        names = list(SUITES)
    elif args.suite in SUITES:
        names = [args.suite]
    else:
        print(f"unknown suite: {args.suite} (available: {', '.join(SUITES)}, all)", file=sys.stderr)
        return 2
    failed = False
    for name in names:
        report = run_suite(name, trials=args.trials, seed=args.seed)
        print(report.summary())
        failed = failed or not report.ok
    return 1 if failed else 0


def cmd_params(args) -> int:
    if (args.local_b is None) == (args.euclidean_G is None):
        print("exactly one of --local-b or --euclidean-G is required", file=sys.stderr)
        return 2
    if args.euclidean_G is not None and args.R is None:
        print("--euclidean-G requires --R", file=sys.stderr)
        return 2
    bp = BarrierParams(M=args.M, nu=args.nu)
    c = 1.0 / args.c_inv if args.c_inv else None
    bound = LocalNormBound(args.local_b) if args.local_b is not None \
        else EuclideanBound(args.euclidean_G, args.R)
    params = compute_params(bp, bound, args.T, c=c, mode="practical")
    print(f"eta={params.eta:.10g}")
    print(f"eps={params.eps:.10g}")
    print(f"m_newton={params.m_newton}")
    print(f"landmark_threshold={params.landmark_threshold:.10g}")
    print(f"lambda_target={params.lambda_target:.10g}")
    if params.warnings:
        status = "; ".join(params.warnings)
        print(f"preconditions={'PreconditionViolated: ' + status if args.strict else 'warn: ' + status}")
    else:
        print("preconditions=ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="barons", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run experiments from config files")
    run_p.add_argument("--config", action="append", required=True, help="config file (repeatable)")
    run_p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config value")
    run_p.add_argument("--domain-file", default=None, help="load the polytope from a text file")
    run_p.add_argument("--monitor-every", type=int, default=None,
                       help="decrement monitoring cadence (0 disables)")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel workers for run matrices")
    run_p.set_defaults(fn=cmd_run)

    check_p = sub.add_parser("check", help="run a randomized invariant suite")
    check_p.add_argument("suite", help=f"one of: {', '.join(SUITES)}, all")
    check_p.add_argument("--trials", type=int, default=None)
    check_p.add_argument("--seed", type=int, default=None)
    check_p.set_defaults(fn=cmd_check)

    par_p = sub.add_parser("params", help="print the derived run schedule")
    par_p.add_argument("--local-b", type=float, default=None, help="local-norm bound b")
    par_p.add_argument("--euclidean-G", type=float, default=None, help="Euclidean bound G")
    par_p.add_argument("--R", type=float, default=None, help="enclosing-ball radius")
    par_p.add_argument("--nu", type=float, required=True)
    par_p.add_argument("--M", type=float, default=1.0)
    par_p.add_argument("--T", type=int, required=True)
    par_p.add_argument("--c-inv", type=float, default=None, help="comparator shrink as 1/c")
    par_p.add_argument("--strict", action="store_true")
    par_p.set_defaults(fn=cmd_params)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, PreconditionViolated, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceDetected, MaxIterExceeded, NotInterior) as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
