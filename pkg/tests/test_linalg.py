import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fidopt import linalg as la
from fidopt.config import DEFAULT_TOL, PROFILES, ToleranceConfig, get_profile, resolve
from fidopt.errors import NonFiniteError, NotHermitianError, NotPSDError
from fidopt.instances import haar_unitary
from strategies import generators, random_matrix, random_psd


# --------------------------------------------------------------------------- config

def test_profiles_are_ordered():
    s, d, l = PROFILES["strict"], PROFILES["default"], PROFILES["loose"]
    assert s.opt_tol < d.opt_tol < l.opt_tol
    assert s.rank_rtol(4) == 4 * np.finfo(float).eps
    assert d.rank_rtol(4) == 1e-10


def test_profile_from_environment(monkeypatch):
    monkeypatch.setenv("FIDOPT_TOL_PROFILE", "loose")
    assert get_profile() is PROFILES["loose"]
    monkeypatch.delenv("FIDOPT_TOL_PROFILE")
    assert get_profile() is DEFAULT_TOL
    with pytest.raises(ValueError):
        get_profile("nope")


def test_tolerance_validation_and_overrides():
    with pytest.raises(ValueError):
        ToleranceConfig(opt_tol=0.0)
    t = DEFAULT_TOL.with_overrides(opt_tol=1e-6)
    assert t.opt_tol == 1e-6 and t.cluster_gap == DEFAULT_TOL.cluster_gap
    assert resolve(None) is DEFAULT_TOL


# --------------------------------------------------------------------------- input checks

def test_as_matrix_rejects_bad_input():
    with pytest.raises(NonFiniteError) as exc:
        la.as_matrix([[1.0, np.nan], [0.0, 1.0]])
    assert exc.value.invariant == "finite-entries"
    with pytest.raises(NotHermitianError):
        la.check_hermitian(np.array([[0, 1], [0, 0]]))


# --------------------------------------------------------------------------- pseudo-inverse

def test_pseudo_inverse_examples():
    np.testing.assert_allclose(la.pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_allclose(la.pseudo_inverse(np.eye(3)), np.eye(3))


@given(generators(), st.integers(1, 8), st.integers(1, 8))
def test_penrose_conditions(rng, m, n):
    O = random_matrix(rng, m, n)
    Op = la.pseudo_inverse(O)
    scale = 1 + np.linalg.norm(O) * np.linalg.norm(Op)
    assert max(la.penrose_residuals(O, Op)) < 1e-10 * scale ** 2
    np.testing.assert_allclose(la.pseudo_inverse(Op), O, atol=1e-9 * scale)


@given(generators(), st.integers(2, 6), st.data())
def test_power_pinv_commute(rng, d, data):
    r = data.draw(st.integers(1, d))
    A = random_psd(rng, d, r)
    P = la.support_projector(A)
    for x in (0.5, 1.0):
        Ax = la.psd_power(A, x)
        np.testing.assert_allclose(la.pseudo_inverse(Ax), la.psd_power(la.pseudo_inverse(A), x),
                                   atol=1e-9 * (1 + np.linalg.norm(la.pseudo_inverse(Ax))))
        np.testing.assert_allclose(la.psd_power(A, -x) @ Ax, P, atol=1e-9)


# --------------------------------------------------------------------------- sqrt / support

def test_psd_sqrt_examples():
    np.testing.assert_allclose(la.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    np.testing.assert_allclose(la.psd_sqrt(np.zeros((3, 3))), np.zeros((3, 3)))
    with pytest.raises(NotPSDError):
        la.psd_sqrt(np.diag([1.0, -0.1]))


def test_psd_sqrt_clips_roundoff():
    S = la.psd_sqrt(np.diag([1.0, -1e-12]))
    np.testing.assert_allclose(S, np.diag([1.0, 0.0]))


@given(generators())
def test_psd_sqrt_squares_back(rng):
    A = random_psd(rng, 5)
    S = la.psd_sqrt(A)
    np.testing.assert_allclose(S @ S, A, atol=1e-9 * np.linalg.norm(A))
    assert la.is_hermitian(S)


def test_support_projector_examples():
    np.testing.assert_allclose(la.support_projector(np.diag([0.7, 0.3, 0.0])), np.diag([1, 1, 0]))
    np.testing.assert_allclose(la.support_projector(np.eye(4)), np.eye(4))


@given(generators(), st.integers(1, 4))
def test_support_projector_properties(rng, r):
    A = random_psd(rng, 4, r)
    P = la.support_projector(A)
    assert la.numerical_rank(P) == r
    assert la.fro(P @ A - A) < 1e-9 * la.fro(A)
    assert la.commutator_norm(P, A) < 1e-10 * (1 + la.fro(A))
    np.testing.assert_allclose(P + la.null_projector(A), np.eye(4), atol=1e-12)


def test_null_space_and_complement():
    M = np.array([[1.0, 1.0], [1.0, 1.0]])
    N = la.null_space(M)
    assert N.shape == (2, 1)
    assert la.fro(M @ N) < 1e-12
    B = np.eye(3)[:, :1].astype(complex)
    C = la.complement_basis(B)
    assert C.shape == (3, 2)
    assert la.fro(la.dagger(B) @ C) < 1e-12


# --------------------------------------------------------------------------- clustering

def test_cluster_examples():
    sys = la.HermitianEigensystem(np.array([1.0, 1.0 + 1e-12, 3.0]), np.eye(3))
    assert [c.dim for c in la.cluster_eigenspaces(sys)] == [2, 1]
    sys = la.HermitianEigensystem(np.array([0.5, 1.0, 3.0]), np.eye(3))
    assert [c.dim for c in la.cluster_eigenspaces(sys)] == [1, 1, 1]


@given(generators(), st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_cluster_multiplicities(rng, mults):
    d = sum(mults)
    values = np.repeat(np.arange(1, len(mults) + 1, dtype=float), mults)
    V = haar_unitary(d, rng)
    H = (V * values) @ V.conj().T
    spaces = la.cluster_eigenspaces(la.hermitian_eig(H))
    assert [s.dim for s in spaces] == mults
    B = np.hstack([s.basis for s in spaces])
    np.testing.assert_allclose(B.conj().T @ B, np.eye(d), atol=1e-10)
    for s in spaces:
        assert la.fro(H @ s.basis - s.value * s.basis) < 1e-9
