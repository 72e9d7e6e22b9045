import numpy as np
import pytest

from barons.cli import main
from barons.harness import read_csv

PORTFOLIO_CONFIG = """\
[domain]
kind = "reduced_simplex"
d = 3

[loss]
family = "portfolio"
generator = "returns_iid"
lo = 0.5
hi = 1.5

[run]
T = 40
seed = 7
trace = "{trace}"
"""


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_writes_trace_and_summary(tmp_path, capsys):
    trace = tmp_path / "out" / "run.csv"
    cfg = write_config(tmp_path, PORTFOLIO_CONFIG.format(trace=trace))
    assert main(["run", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "final_regret=" in out and "landmark_updates=" in out and "max_local_norm=" in out
    back = read_csv(str(trace))
    assert len(back) == 40
    assert back.metadata["seed"] == "7"


def test_run_unknown_key_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, "[run]\nT = 5\nbogus = 1\n")
    assert main(["run", "--config", cfg]) == 2
    assert "run.bogus" in capsys.readouterr().err


def test_run_strict_violation_exits_2_citing_inequality(tmp_path, capsys):
    cfg = write_config(tmp_path, """\
[domain]
kind = "reduced_simplex"
d = 3

[algorithm]
mode = "strict"
b = 2.0

[loss]
family = "portfolio"
generator = "returns_iid"

[run]
T = 50
seed = 1
""")
    assert main(["run", "--config", cfg]) == 2
    assert "1/(1000 b M_Phi)" in capsys.readouterr().err


def test_run_set_overrides(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    cfg = write_config(tmp_path, PORTFOLIO_CONFIG.format(trace=trace))
    assert main(["run", "--config", cfg, "--set", "run.T=12"]) == 0
    assert len(read_csv(str(trace))) == 12


def test_env_seed_override(tmp_path, monkeypatch):
    trace = tmp_path / "t.csv"
    cfg = write_config(tmp_path, PORTFOLIO_CONFIG.format(trace=trace))
    monkeypatch.setenv("BARONS_SEED", "99")
    assert main(["run", "--config", cfg]) == 0
    assert read_csv(str(trace)).metadata["seed"] == "99"
    monkeypatch.setenv("BARONS_SEED", "notanint")
    assert main(["run", "--config", cfg]) == 2


def test_run_determinism_across_invocations(tmp_path):
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cfg = write_config(tmp_path, PORTFOLIO_CONFIG.format(trace="PLACEHOLDER"))
    assert main(["run", "--config", cfg, "--set", f"run.trace={t1}"]) == 0
    assert main(["run", "--config", cfg, "--set", f"run.trace={t2}"]) == 0
    a, b = read_csv(str(t1)), read_csv(str(t2))
    assert np.array_equal(a.loss, b.loss)
    assert a.metadata["final_regret"] == b.metadata["final_regret"]


def test_check_known_suite(capsys):
    assert main(["check", "newton-decrement-decrease", "--trials", "5", "--seed", "1"]) == 0
    assert "5/5 ok" in capsys.readouterr().out


def test_check_unknown_suite(capsys):
    assert main(["check", "nosuchsuite"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_params_local_norm(capsys):
    assert main(["params", "--local-b", "2", "--nu", "3", "--M", "1", "--T", "10000",
                 "--c-inv", "10000"]) == 0
    out = capsys.readouterr().out
    assert "eta=0.02628260885" in out
    assert "eps=0.01732050808" in out
    assert "m_newton=28" in out
    assert "landmark_threshold=0.0243902439" in out
    assert "preconditions=warn" in out


def test_params_strict_flag_reports_violation(capsys):
    assert main(["params", "--local-b", "2", "--nu", "3", "--T", "10000", "--c-inv", "10000",
                 "--strict"]) == 0
    assert "PreconditionViolated" in capsys.readouterr().out


def test_params_euclidean(capsys):
    assert main(["params", "--euclidean-G", "1", "--R", "1", "--nu", "4", "--T", "10000"]) == 0
    out = capsys.readouterr().out
    assert "eta=0.1278144929" in out
    assert "eps=0.02" in out


def test_params_flag_validation(capsys):
    assert main(["params", "--nu", "4", "--T", "100"]) == 2
    assert main(["params", "--local-b", "1", "--euclidean-G", "1", "--R", "1", "--nu", "4",
                 "--T", "100"]) == 2
    assert main(["params", "--euclidean-G", "1", "--nu", "4", "--T", "100"]) == 2


def test_run_jobs_matrix(tmp_path, capsys):
    cfgs = []
    for i in range(2):
        trace = tmp_path / f"m{i}.csv"
        cfgs += ["--config", write_config(tmp_path, PORTFOLIO_CONFIG.format(trace=trace),
                                          name=f"m{i}.toml")]
    assert main(["run", *cfgs, "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("final_regret=") == 2


def test_domain_file_flag(tmp_path):
    from barons.domain import build_reduced_simplex, save_polytope

    poly = tmp_path / "domain.poly"
    save_polytope(build_reduced_simplex(3), str(poly))
    trace = tmp_path / "t.csv"
    cfg = write_config(tmp_path, """\
[loss]
family = "linear"

[run]
T = 20
seed = 2
trace = "{trace}"
""".format(trace=trace))
    assert main(["run", "--config", cfg, "--domain-file", str(poly)]) == 0
    assert read_csv(str(trace)).metadata["domain_kind"] == "file"


def test_runtime_divergence_exits_3(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    cfg = write_config(tmp_path, PORTFOLIO_CONFIG.format(trace=trace))
    # an absurd step-size override walks the first Newton step out of the domain
    assert main(["run", "--config", cfg, "--set", "algorithm.eta=80"]) == 3
    assert "divergence" in capsys.readouterr().err


def test_example_configs_run_quickly(tmp_path):
    import pathlib
    import time

    configs = sorted(pathlib.Path("configs").glob("*.toml"))
    assert len(configs) >= 5
    for cfg in configs:
        out = tmp_path / (cfg.stem + ".csv")
        t0 = time.perf_counter()
        assert main(["run", "--config", str(cfg), "--set", f"run.trace={out}"]) == 0
        assert time.perf_counter() - t0 < 60.0
        assert out.exists()


def test_check_failure_exits_1_with_counterexample(capsys, monkeypatch):
    import barons.cli as cli
    from barons.checks import SuiteReport

    def always_fails(trials=3, seed=0):
        rep = SuiteReport("always-fails")
        for k in range(trials):
            rep.record(False, f"trial {k}: synthetic counterexample")
        return rep

    monkeypatch.setitem(cli.SUITES, "always-fails", (always_fails, 3))
    assert main(["check", "always-fails"]) == 1
    out = capsys.readouterr().out
    assert "0/3 FAIL" in out and "first counterexample: trial 0" in out
