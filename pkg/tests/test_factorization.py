import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import place_poles

from helpers import random_pair, random_theta
from srtrkit import fixtures
from srtrkit.errors import (
    InvalidThetaError,
    KontrollerFormError,
    NoSolutionError,
    PreconditionError,
)
from srtrkit.factorization import (
    LcfOverS,
    RiccatiSolution,
    ThetaFactor,
    lcf_from_srtr,
    make_theta,
    mn_sparsity,
    riccati_residual,
    solve_ctnare,
    srtr_from_lcf,
    to_kontroller_form,
    verify_lcf,
)
from srtrkit.linalg import eigenvalues, is_stable_spectrum
from srtrkit.systems import PartitionedRealization, StateSpaceSystem, eval_tfm


def ring_theta():
    return ThetaFactor(-np.eye(6), np.eye(6), np.eye(6), "continuous")


def ring_lcf():
    return lcf_from_srtr(fixtures.ring6_pair(), ring_theta())


def test_theta_validation():
    with pytest.raises(InvalidThetaError):
        ThetaFactor(np.eye(2), np.eye(2), np.eye(2), "continuous")  # unstable Ax
    with pytest.raises(InvalidThetaError):
        ThetaFactor(-np.eye(2), np.zeros((2, 2)), np.eye(2), "continuous")
    theta = make_theta(-2.0 * np.eye(2), np.eye(2), np.eye(2), "continuous")
    assert np.allclose(theta.evaluate(1.0), np.eye(2) / 3.0)


def test_lcf_factorization_identity():
    pair = fixtures.ring6_pair()
    lcf = ring_lcf()
    for lam in (0.9 + 1.4j, -0.2 + 2.0j, 3.0):
        M, N = lcf.eval_mn(lam)
        G = pair.response(lam)
        assert np.allclose(np.linalg.solve(M, N), G, atol=1e-9 * (1 + np.linalg.norm(G)))


def test_lcf_pole_matrix_spectrum():
    pair = fixtures.ring6_pair()
    theta = ring_theta()
    lcf = lcf_from_srtr(pair, theta)
    got = np.sort_complex(eigenvalues(lcf.pole_matrix()))
    want = np.sort_complex(
        np.concatenate([eigenvalues(theta.Ax), eigenvalues(pair.Aw)])
    )
    assert np.allclose(got, want, atol=1e-8)
    assert is_stable_spectrum(lcf.pole_matrix(), "continuous")


def test_lcf_requires_stable_pair():
    hot = fixtures.scalar_class_pair(2.0)
    theta = ThetaFactor(-np.eye(1), np.eye(1), np.eye(1), "continuous")
    with pytest.raises(PreconditionError):
        lcf_from_srtr(hot, theta)


def test_verify_lcf_report():
    rep = verify_lcf(ring_lcf(), fixtures.ring6_pair())
    d = rep.as_dict()
    assert set(d) == {"stable", "identityResidual", "coprimeOverS"}
    assert d["stable"] is True
    assert d["coprimeOverS"] is True
    assert d["identityResidual"] < 1e-10


def test_verify_lcf_flags_unstable():
    lcf = ring_lcf()
    bent = LcfOverS(
        blocks=PartitionedRealization(
            lcf.blocks.A11,
            lcf.blocks.A12,
            lcf.blocks.A21,
            lcf.blocks.A22 + 20.0 * np.eye(6),
            lcf.blocks.B1,
            lcf.blocks.B2,
            domain="continuous",
        ),
        F1=lcf.F1,
        F2=lcf.F2,
        U=lcf.U,
    )
    assert not verify_lcf(bent).stable


def test_ctnare_scalar_two_solutions():
    # K(A11+F1) - K A12 K + (A21+F2) - A22 K = 0 with the blocks below is
    # -2k - k^2 + k = 0, so k = 0 or k = -1; both close the loop stably.
    blocks = PartitionedRealization(
        A11=np.array([[-2.0]]),
        A12=np.array([[1.0]]),
        A21=np.array([[0.0]]),
        A22=np.array([[-1.0]]),
        B1=np.array([[1.0]]),
        B2=np.array([[0.0]]),
        domain="continuous",
    )
    lcf = LcfOverS(blocks, np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1))
    sol = solve_ctnare(lcf)
    k = sol.K[0, 0]
    assert min(abs(k - 0.0), abs(k - (-1.0))) < 1e-9
    assert sol.residual_norm < 1e-10
    assert np.all(sol.closed_spectrum.real < 0)
    assert riccati_residual(lcf, sol.K) < 1e-10


def test_ctnare_no_stabilizing_solution():
    # A11+F1 = +1 with A12 = 0 leaves the closed spectrum pinned at +1.
    blocks = PartitionedRealization(
        A11=np.array([[1.0]]),
        A12=np.array([[0.0]]),
        A21=np.array([[0.0]]),
        A22=np.array([[-1.0]]),
        B1=np.array([[1.0]]),
        B2=np.array([[0.0]]),
        domain="continuous",
    )
    lcf = LcfOverS(blocks, np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1))
    with pytest.raises(NoSolutionError):
        solve_ctnare(lcf)


def test_riccati_solution_dict():
    sol = RiccatiSolution(
        K=np.zeros((1, 1)),
        residual_norm=0.0,
        closed_spectrum=np.array([-1.0 + 0j]),
        subspace_cond=1.0,
        subset=(0,),
    )
    d = sol.as_dict()
    assert set(d) == {"K", "residualNorm", "closedSpectrum", "subspaceCond"}
    assert d["closedSpectrum"] == [[-1.0, 0.0]]


def test_ring_round_trip_is_exact():
    pair = fixtures.ring6_pair()
    lcf = ring_lcf()
    sol = solve_ctnare(lcf)
    assert sol.residual_norm < 1e-12
    back = srtr_from_lcf(lcf, sol)
    for name in ("Aw", "Bw", "Cw", "Dw"):
        assert np.allclose(
            getattr(back, name), getattr(pair, name), atol=1e-12
        ), name


@settings(max_examples=20, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=2),
    st.integers(min_value=0, max_value=10**6),
)
def test_round_trip_random_pairs(p, q, m, seed):
    rng = np.random.default_rng(seed)
    pair = random_pair(rng, p, q, m, stable=True)
    theta = random_theta(p, rng)
    lcf = lcf_from_srtr(pair, theta)
    sol = solve_ctnare(lcf)
    assert sol.residual_norm <= 1e-10 * (1 + np.linalg.norm(lcf.blocks.A))
    back = srtr_from_lcf(lcf, sol)
    for lam in (0.6 + 1.1j, 2.0 + 0.3j):
        a = pair.response(lam)
        b = back.response(lam)
        assert np.allclose(a, b, atol=1e-6 * (1 + np.linalg.norm(a)))


def test_round_trip_discrete():
    rng = np.random.default_rng(77)
    pair = random_pair(rng, 2, 2, 2, domain="discrete", stable=True)
    theta = random_theta(2, rng, domain="discrete")
    lcf = lcf_from_srtr(pair, theta)
    sol = solve_ctnare(lcf)
    assert np.all(np.abs(sol.closed_spectrum) < 1.0)
    back = srtr_from_lcf(lcf, sol)
    lam = 1.8 + 0.6j
    assert np.allclose(back.response(lam), pair.response(lam), atol=1e-7)


def test_srtr_from_lcf_rejects_bad_solution():
    lcf = ring_lcf()
    wrong_shape = RiccatiSolution(
        np.zeros((2, 2)), 0.0, np.zeros(0, dtype=complex), 1.0, ()
    )
    with pytest.raises(Exception):
        srtr_from_lcf(lcf, wrong_shape)
    sol = solve_ctnare(lcf)
    unstable = RiccatiSolution(
        sol.K + 50.0, 0.0, sol.closed_spectrum, 1.0, sol.subset
    )
    with pytest.raises(PreconditionError):
        srtr_from_lcf(lcf, unstable)


def test_kontroller_form_from_minimal_system():
    rng = np.random.default_rng(13)
    n, p, m = 4, 2, 3
    A = rng.normal(size=(n, n)) * 0.4
    B = rng.normal(size=(n, m))
    C = rng.normal(size=(p, n))
    sys = StateSpaceSystem(A, B, C, np.zeros((p, m)), "continuous")
    # output injection that pushes A + F C into the left half plane
    F = -place_poles(A.T, C.T, [-1.0, -1.3, -1.6, -1.9]).gain_matrix.T
    U = np.eye(p) + 0.1 * rng.normal(size=(p, p))
    lcf = to_kontroller_form(sys, F, U)
    for lam in (0.5 + 0.8j, 1.4):
        direct = U + U @ C @ np.linalg.solve(lam * np.eye(n) - A - F @ C, F)
        ndirect = U @ C @ np.linalg.solve(lam * np.eye(n) - A - F @ C, B)
        M, N = lcf.eval_mn(lam)
        assert np.allclose(M, direct, atol=1e-8)
        assert np.allclose(N, ndirect, atol=1e-8)
    got = np.sort_complex(eigenvalues(lcf.pole_matrix()))
    assert np.allclose(got, np.sort_complex(np.array([-1.9, -1.6, -1.3, -1.0], dtype=complex)), atol=1e-7)


def test_kontroller_form_condition_errors():
    rng = np.random.default_rng(14)
    A = np.diag([1.0, 2.0])
    B = rng.normal(size=(2, 1))
    C = np.eye(2)
    sys = StateSpaceSystem(A, B, C, np.zeros((2, 1)), "continuous")
    with pytest.raises(KontrollerFormError) as info:
        to_kontroller_form(sys, np.zeros((2, 2)), np.eye(2))
    assert info.value.condition == "b"
    with pytest.raises(KontrollerFormError) as info:
        to_kontroller_form(sys, -5.0 * np.eye(2), np.zeros((2, 2)))
    assert info.value.condition == "a"


def test_mn_sparsity_returns_pattern():
    pat = mn_sparsity(ring_lcf())
    assert pat.maskW.shape == (6, 6)
    assert pat.maskV.shape == (6, 6)
    assert np.all(np.diag(pat.maskW) == 1)


def test_eval_mn_matches_state_space():
    lcf = ring_lcf()
    lam = 0.3 + 0.9j
    stacked = np.hstack(lcf.eval_mn(lam))
    assert np.allclose(stacked, eval_tfm(lcf.mn_system(), lam), atol=1e-10)
