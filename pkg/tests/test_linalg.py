import numpy as np
import pytest

from barons.linalg import (
    DimensionMismatch,
    NotSpd,
    dual_quad_norm,
    quad_norm,
    spd_factorize,
    spd_solve,
    spectral_sandwich_check,
)


def random_spd(rng, d, cond_floor=0.5):
    A = rng.standard_normal((d, d))
    return A @ A.T + cond_floor * np.eye(d)


def test_factorize_diagonal():
    F = spd_factorize(2.0 * np.eye(2))
    assert np.allclose(spd_solve(F, np.array([2.0, 4.0])), [1.0, 2.0])


def test_factorize_identity_acts_as_identity():
    F = spd_factorize(np.eye(3))
    v = np.array([0.3, -1.2, 7.0])
    assert np.allclose(spd_solve(F, v), v)


def test_factorize_2x2_hand_inverse():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    # hand inverse: (1/3) [[2, -1], [-1, 2]] applied to (1, 1) gives (1/3, 1/3)
    F = spd_factorize(M)
    assert np.allclose(spd_solve(F, np.array([1.0, 1.0])), [1 / 3, 1 / 3])


def test_factor_reconstructs_input():
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = random_spd(rng, int(rng.integers(1, 8)))
        F = spd_factorize(M)
        err = np.linalg.norm(F.reconstruct() - M) / np.linalg.norm(M)
        assert err < 1e-10


def test_factorize_rejects_asymmetric():
    with pytest.raises(NotSpd):
        spd_factorize(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_factorize_rejects_indefinite():
    with pytest.raises(NotSpd):
        spd_factorize(np.array([[1.0, 0.0], [0.0, -2.0]]))


def test_factorize_rejects_singular():
    with pytest.raises(NotSpd):
        spd_factorize(np.ones((2, 2)))


def test_solve_dimension_mismatch():
    F = spd_factorize(np.eye(2))
    with pytest.raises(DimensionMismatch):
        spd_solve(F, np.ones(3))


def test_quad_norm_examples():
    assert quad_norm(np.array([1.0, 0.0]), 8.0 * np.eye(2)) == pytest.approx(np.sqrt(8.0))
    assert quad_norm(np.zeros(2), 8.0 * np.eye(2)) == 0.0
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert quad_norm(np.array([1.0, 1.0]), M) == pytest.approx(np.sqrt(6.0))
    assert quad_norm(np.array([1.0, 1.0]), spd_factorize(M)) == pytest.approx(np.sqrt(6.0))


def test_dual_quad_norm_examples():
    F8 = spd_factorize(8.0 * np.eye(2))
    assert dual_quad_norm(np.array([1.0, 0.0]), F8) == pytest.approx(1.0 / np.sqrt(8.0))
    assert dual_quad_norm(np.zeros(2), F8) == 0.0
    F = spd_factorize(np.array([[2.0, 1.0], [1.0, 2.0]]))
    # hand inverse quadratic form: (1,1)' M^-1 (1,1) = 2/3
    assert dual_quad_norm(np.array([1.0, 1.0]), F) == pytest.approx(np.sqrt(2.0 / 3.0))


def test_solve_roundtrip_property():
    rng = np.random.default_rng(1)
    for _ in range(50):
        d = int(rng.integers(1, 10))
        M = random_spd(rng, d)
        v = rng.standard_normal(d)
        x = spd_solve(spd_factorize(M), M @ v)
        assert np.linalg.norm(x - v) <= 1e-8 * max(1.0, np.linalg.norm(v))


def test_generalized_cauchy_schwarz_pairing():
    rng = np.random.default_rng(2)
    for _ in range(100):
        d = int(rng.integers(1, 8))
        M = random_spd(rng, d)
        F = spd_factorize(M)
        u, v = rng.standard_normal(d), rng.standard_normal(d)
        assert abs(u @ v) <= quad_norm(u, M) * dual_quad_norm(v, F) * (1 + 1e-12) + 1e-15


def test_sandwich_examples():
    rng = np.random.default_rng(3)
    M = random_spd(rng, 4)
    assert spectral_sandwich_check(M, M, 0.0)
    assert spectral_sandwich_check(1.0005 * M, M, 0.001)
    assert not spectral_sandwich_check(1.1 * M, M, 0.001)


def test_sandwich_identity_property():
    rng = np.random.default_rng(4)
    for _ in range(20):
        M = random_spd(rng, int(rng.integers(1, 7)))
        assert spectral_sandwich_check(M, M, 0.0)


def test_sandwich_rejects_bad_inputs():
    with pytest.raises(NotSpd):
        spectral_sandwich_check(np.eye(2), np.array([[1.0, 0.0], [0.0, -1.0]]), 0.1)
    with pytest.raises(DimensionMismatch):
        spectral_sandwich_check(np.eye(3), np.eye(2), 0.1)
