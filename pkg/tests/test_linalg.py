import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srtrkit.linalg import (
    auto_rank_tol,
    eigenvalues,
    in_stability_region,
    is_stable_spectrum,
    pbh_test,
    rank_with_tolerance,
    row_compressor,
    sample_complex_points,
    stability_distance,
    stability_margin,
    structural_property,
)


def test_stability_region_is_open():
    assert in_stability_region(-0.1, "continuous")
    assert not in_stability_region(0.0, "continuous")
    assert not in_stability_region(1j, "continuous")
    assert in_stability_region(0.5j, "discrete")
    assert not in_stability_region(np.exp(1j), "discrete")
    assert not in_stability_region(-1.0, "discrete")


def test_stability_distance_values():
    assert stability_distance(np.array([-2.0]), "continuous") == 0.0
    assert stability_distance(np.array([3.0 + 1j]), "continuous") == 3.0
    assert stability_distance(np.array([0.5]), "discrete") == 0.0
    assert stability_distance(np.array([2.0]), "discrete") == pytest.approx(1.0)


def test_stability_margin_values():
    assert stability_margin(np.array([-2.0, -0.5]), "continuous") == pytest.approx(0.5)
    assert stability_margin(np.array([0.3, -0.8]), "discrete") == pytest.approx(0.2)
    assert stability_margin(np.zeros(0, dtype=complex), "continuous") == np.inf


def test_is_stable_spectrum():
    assert is_stable_spectrum(np.diag([-1.0, -2.0]), "continuous")
    assert not is_stable_spectrum(np.diag([-1.0, 0.0]), "continuous")
    assert is_stable_spectrum(np.diag([0.5, -0.5]), "discrete")
    assert not is_stable_spectrum(np.diag([1.0]), "discrete")


def test_eigenvalues_empty_and_errors():
    assert eigenvalues(np.zeros((0, 0))).shape == (0,)
    with pytest.raises(Exception):
        eigenvalues(np.zeros((2, 3)))


def test_rank_with_tolerance():
    M = np.outer([1.0, 2.0, 3.0], [1.0, -1.0])
    assert rank_with_tolerance(M) == 1
    assert rank_with_tolerance(np.eye(3)) == 3
    assert rank_with_tolerance(np.zeros((2, 2))) == 0
    assert auto_rank_tol(M) > 0


def test_pbh_controllable_and_not():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0], [1.0]])
    assert pbh_test(A, B, "controllable", 0.0)
    B_bad = np.array([[1.0], [0.0]])
    assert not pbh_test(A, B_bad, "controllable", 0.0)
    assert pbh_test(A.T, B.T.copy().T, "controllable", 1.0)


def test_pbh_observable_dual():
    A = np.diag([1.0, 2.0])
    C = np.array([[1.0, 0.0]])
    assert pbh_test(A, C, "observable", 1.0)
    assert not pbh_test(A, C, "observable", 2.0)


def test_structural_property_stabilizable():
    A = np.diag([-1.0, 2.0])
    B_good = np.array([[0.0], [1.0]])
    B_bad = np.array([[1.0], [0.0]])
    assert structural_property(A, B_good, "stabilizable", domain="continuous")
    assert not structural_property(A, B_bad, "stabilizable", domain="continuous")
    C = np.array([[0.0, 1.0]])
    assert structural_property(A, C, "detectable", domain="continuous")


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=0, max_value=10**6),
)
def test_row_compressor_matches_contract(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n)
    comp = row_compressor(v)
    Q = comp.Q
    assert np.allclose(Q @ Q.T, np.eye(n), atol=1e-12)
    mapped = v @ Q.T
    target = np.zeros(n)
    target[-1] = np.linalg.norm(v)
    assert np.allclose(mapped, target, atol=1e-10 * (1 + np.linalg.norm(v)))
    assert comp.norm == pytest.approx(np.linalg.norm(v))
    assert not comp.is_zero


def test_row_compressor_zero_vector():
    comp = row_compressor(np.zeros(4))
    assert comp.is_zero
    assert np.array_equal(comp.Q, np.eye(4))
    assert comp.norm == 0.0


def test_sample_complex_points_avoids_poles():
    poles = np.array([0.0 + 0.0j, 1.0 + 1.0j])
    pts = sample_complex_points(poles, 12, seed=3, min_distance=0.2)
    assert len(pts) == 12
    for z in pts:
        assert np.min(np.abs(z - poles)) >= 0.2
    again = sample_complex_points(poles, 12, seed=3, min_distance=0.2)
    assert np.allclose(pts, again)


def test_sample_complex_points_dense_pole_set_still_works():
    rng = np.random.default_rng(0)
    poles = rng.normal(size=40) + 1j * rng.normal(size=40)
    pts = sample_complex_points(poles, 8, seed=1, min_distance=0.05)
    assert len(pts) == 8
