import itertools

import numpy as np
import pytest

from barons.barrier import LogBarrier
from barons.baselines import ftrl_exact_round, ogd_simplex_round, project_simplex
from barons.domain import build_box, build_reduced_simplex
from barons.newton import ShiftedObjective, analytic_center, newton_decrement


def brute_force_simplex_projection(v):
    """Active-set enumeration over support patterns; exact for small d."""
    v = np.asarray(v, dtype=float)
    d = v.size
    best, best_dist = None, np.inf
    for pattern in itertools.product([0, 1], repeat=d):
        support = np.flatnonzero(pattern)
        if support.size == 0:
            continue
        lam = (1.0 - v[support].sum()) / support.size
        x = np.zeros(d)
        x[support] = v[support] + lam
        if np.any(x[support] < -1e-12):
            continue
        dist = np.sum((x - v) ** 2)
        if dist < best_dist - 1e-15:
            best, best_dist = x, dist
    return best


def test_ftrl_zero_shift_is_analytic_center():
    B = LogBarrier(build_reduced_simplex(3))
    w = ftrl_exact_round(B, np.zeros(2), np.array([0.2, 0.2]))
    assert np.allclose(w, analytic_center(B), atol=1e-10)


def test_ftrl_interval_small_shift():
    B = LogBarrier(build_reduced_simplex(2))
    w = ftrl_exact_round(B, np.array([0.001]), np.array([0.5]))
    s = 0.001
    root = ((2 + s) - np.sqrt((2 + s) ** 2 - 4 * s)) / (2 * s)
    assert w[0] == pytest.approx(root, abs=1e-12)


def test_ftrl_interval_shift_two():
    B = LogBarrier(build_reduced_simplex(2))
    w = ftrl_exact_round(B, np.array([2.0]), np.array([0.5]))
    assert w[0] == pytest.approx(1.0 - np.sqrt(2.0) / 2.0, abs=1e-11)
    assert newton_decrement(ShiftedObjective(B, np.array([2.0])), w) <= 1e-12


def test_ftrl_permutation_equivariance_on_box():
    B = LogBarrier(build_box(3, 0, 1))
    rng = np.random.default_rng(5)
    for _ in range(10):
        s = rng.standard_normal(3)
        perm = rng.permutation(3)
        w = ftrl_exact_round(B, s, np.full(3, 0.5))
        w_perm = ftrl_exact_round(B, s[perm], np.full(3, 0.5))
        assert np.allclose(w[perm], w_perm, atol=1e-9)


def test_project_simplex_examples():
    assert np.allclose(project_simplex(np.array([0.6, 0.6])), [0.5, 0.5])
    on_simplex = np.array([0.2, 0.3, 0.5])
    assert np.allclose(project_simplex(on_simplex), on_simplex)
    assert np.allclose(project_simplex(np.array([2.0, 0.0])), [1.0, 0.0])


def test_project_simplex_matches_brute_force():
    rng = np.random.default_rng(6)
    for _ in range(200):
        d = int(rng.integers(1, 7))
        v = rng.uniform(-2, 2, size=d) * rng.choice([0.1, 1.0, 10.0])
        x = project_simplex(v)
        assert np.all(x >= 0) and np.isclose(np.sum(x), 1.0)
        assert np.allclose(x, brute_force_simplex_projection(v), atol=1e-10)


def test_ogd_round_examples():
    w = np.array([0.5, 0.5])
    assert np.allclose(ogd_simplex_round(w, np.zeros(2), 0.1), w)
    assert np.allclose(ogd_simplex_round(w, np.array([1.0, -1.0]), 0.1), [0.4, 0.6])
    assert np.allclose(ogd_simplex_round(np.array([1.0, 0.0]), np.array([1.0, -1.0]), 1.0),
                       [0.0, 1.0])
