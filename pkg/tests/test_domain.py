import numpy as np
import pytest

from barons.domain import (
    InfeasibleWitness,
    InvalidBounds,
    ZeroRow,
    build_box,
    build_reduced_simplex,
    is_strictly_feasible,
    lift_to_simplex,
    load_polytope,
    polytope_new,
    save_polytope,
    shrink_toward,
    slacks,
)


def unit_box():
    return build_box(2, 0.0, 1.0)


def interval():
    return build_reduced_simplex(2)


def test_normalization_unit_rows():
    P = polytope_new(
        np.array([[2.0, 0.0], [0.0, 2.0], [-2.0, 0.0], [0.0, -2.0]]),
        np.array([0.0, 0.0, -2.0, -2.0]),
        np.array([0.5, 0.5]),
    )
    assert np.allclose(np.linalg.norm(P.A, axis=1), 1.0, atol=1e-12)
    assert np.allclose(P.b, [0.0, 0.0, -1.0, -1.0])
    # same feasible set as the builder's unit box
    Q = unit_box()
    assert np.allclose(np.sort(P.b), np.sort(Q.b))


def test_one_dimensional_interval():
    P = polytope_new(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]), np.array([0.5]))
    assert P.dim == 1 and P.num_constraints == 2
    assert np.allclose(slacks(P, np.array([0.25])), [0.25, 0.75])


def test_boundary_witness_rejected():
    with pytest.raises(InfeasibleWitness):
        polytope_new(
            np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
            np.array([0.0, 0.0, -1.0, -1.0]),
            np.array([1.0, 0.5]),  # slack 0 on one facet
        )


def test_zero_row_rejected():
    with pytest.raises(ZeroRow):
        polytope_new(np.array([[0.0, 0.0]]), np.array([0.0]), np.array([1.0, 1.0]))


def test_slacks_examples():
    assert np.allclose(slacks(unit_box(), np.array([0.5, 0.5])), [0.5] * 4)
    P = polytope_new(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]), np.array([0.5]))
    assert np.allclose(slacks(P, np.array([1.0])), [1.0, 0.0])


def test_strict_feasibility():
    box = unit_box()
    assert is_strictly_feasible(box, np.array([0.5, 0.5]), margin=0.0)
    assert not is_strictly_feasible(box, np.array([1.0, 0.5]), margin=0.0)
    assert not is_strictly_feasible(box, np.array([0.01, 0.5]), margin=0.05)


def test_shrink_toward_examples():
    w = np.array([1.0, 0.0])
    w_star = np.array([1 / 3, 1 / 3])
    assert np.allclose(shrink_toward(w, 0.0, w_star), w)
    assert np.allclose(shrink_toward(w, 1.0, w_star), w_star)
    assert np.allclose(shrink_toward(w, 0.1, w_star), [0.9 + 0.1 / 3, 0.1 / 3])


def test_shrunk_slacks_dominated_by_target():
    rng = np.random.default_rng(0)
    P = build_reduced_simplex(4)
    w_star = P.interior_witness
    for _ in range(50):
        # random point of the (closed) domain incl. near-boundary ones
        v = rng.dirichlet(np.ones(4) * 0.3)[:3]
        c = float(rng.uniform(0, 1))
        shrunk = shrink_toward(v, c, w_star)
        assert np.all(slacks(P, shrunk) >= c * slacks(P, w_star) - 1e-12)


def test_build_box_matches_manual():
    P = unit_box()
    assert P.num_constraints == 4 and P.dim == 2
    assert is_strictly_feasible(P, np.array([0.99, 0.01]))
    assert not is_strictly_feasible(P, np.array([1.01, 0.5]))


def test_build_reduced_simplex_d3():
    P = build_reduced_simplex(3)
    assert P.num_constraints == 3 and P.dim == 2
    assert np.allclose(P.interior_witness, [1 / 3, 1 / 3])
    # {v1 >= 0, v2 >= 0, v1 + v2 <= 1}
    assert is_strictly_feasible(P, np.array([0.2, 0.7]))
    assert not is_strictly_feasible(P, np.array([0.6, 0.6]))


def test_build_reduced_simplex_d2_is_interval():
    P = build_reduced_simplex(2)
    assert P.dim == 1 and P.num_constraints == 2
    assert np.allclose(sorted(slacks(P, np.array([0.25]))), [0.25, 0.75])


def test_invalid_bounds():
    with pytest.raises(InvalidBounds):
        build_box(2, 1.0, 1.0)
    with pytest.raises(InvalidBounds):
        build_reduced_simplex(1)


def test_normalization_preserves_feasibility():
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        m = int(rng.integers(d + 1, 10))
        A = rng.standard_normal((m, d)) * rng.uniform(0.1, 5.0, size=(m, 1))
        b = A @ np.zeros(d) - rng.uniform(0.2, 2.0, size=m)
        P = polytope_new(A, b, np.zeros(d))
        for _ in range(10):
            w = rng.standard_normal(d)
            raw_feasible = bool(np.min(A @ w - b) > 0)
            assert raw_feasible == is_strictly_feasible(P, w)


def test_lift_to_simplex_property():
    rng = np.random.default_rng(2)
    P = build_reduced_simplex(5)
    for _ in range(50):
        v = rng.dirichlet(np.ones(5))[:4]
        full = lift_to_simplex(v)
        assert full.shape == (5,)
        assert np.all(full >= -1e-12) and np.all(full <= 1 + 1e-12)
        assert np.isclose(np.sum(full), 1.0)
        if is_strictly_feasible(P, v):
            assert np.all(full > 0)


def test_serialization_roundtrip(tmp_path):
    P = build_reduced_simplex(4)
    path = tmp_path / "simplex.poly"
    save_polytope(P, str(path))
    Q = load_polytope(str(path))
    assert np.array_equal(P.A, Q.A)
    assert np.array_equal(P.b, Q.b)
    assert np.array_equal(P.interior_witness, Q.interior_witness)
