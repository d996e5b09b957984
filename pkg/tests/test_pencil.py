import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fidopt import linalg as la
from fidopt.errors import SingularSumError
from fidopt.geomean import geometric_mean
from fidopt.instances import InstanceSpec, random_state
from fidopt.pencil import (INF, construct_polar_unitary, parallel_check, parallel_pair,
                           pencil_eigensystem)
from fidopt.states import DensityOperator, pure_state
from frozen import KET0, KETP, RHO_A, SIGMA_A, printed_unitary
from strategies import generators


def overlap(space_basis, vec):
    """|<v|P|v>| for the projector onto the space and a unit vector."""
    return float(np.linalg.norm(la.dagger(space_basis) @ vec))


# --------------------------------------------------------------------------- polar unitary

def test_commuting_diagonal_polar_unitary_is_identity():
    rho, sigma = DensityOperator(np.diag([0.6, 0.4])), DensityOperator(np.diag([0.3, 0.7]))
    U = construct_polar_unitary(rho, sigma)
    np.testing.assert_allclose(U.U, np.eye(2), atol=1e-12)
    assert U.residual(rho, sigma) < 1e-12


def test_fixture_polar_unitaries():
    rho, sigma = DensityOperator(RHO_A), DensityOperator(SIGMA_A)
    U = construct_polar_unitary(rho, sigma)
    assert U.residual(rho, sigma) < 1e-9 and U.unitarity() < 1e-10 and U.aligned
    Up = printed_unitary()
    target = la.psd_sqrt(rho.sqrt @ sigma.matrix @ rho.sqrt)
    assert la.fro(rho.sqrt @ sigma.sqrt @ Up - target) < 1e-9
    assert la.fro(Up.conj().T @ Up - np.eye(3)) < 1e-12


@given(generators())
def test_random_full_rank_polar_unitary(rng):
    rho, sigma = DensityOperator(random_state(4, 4, rng)), DensityOperator(random_state(4, 4, rng))
    U = construct_polar_unitary(rho, sigma)
    assert U.residual(rho, sigma) < 1e-9 and U.unitarity() < 1e-10


def test_singular_sum_rejected():
    rho = DensityOperator(np.diag([1.0, 0, 0]))
    sigma = DensityOperator(np.diag([0.5, 0.5, 0]))
    with pytest.raises(SingularSumError) as exc:
        construct_polar_unitary(rho, sigma)
    assert exc.value.invariant == "nonsingular-sum"


# --------------------------------------------------------------------------- eigensystem

@pytest.mark.parametrize("use_printed", [False, True])
def test_fixture_eigenpairs(use_printed):
    rho, sigma = DensityOperator(RHO_A), DensityOperator(SIGMA_A)
    U = printed_unitary() if use_printed else None
    es = pencil_eigensystem(rho, sigma, U)
    assert es.eigenvalues == pytest.approx([0.0, 1.0, INF])
    for sp, k in zip(es.spaces(), range(3)):
        assert sp.dim == 1
        assert overlap(sp.basis, np.eye(3)[:, k]) == pytest.approx(1.0, abs=1e-9)
        assert es.residual(sp) < 1e-9


@given(generators(), st.integers(2, 4))
def test_commuting_diagonal_eigenvalues(rng, d):
    p = rng.dirichlet(np.ones(d)) * 0.9 + 0.1 / d
    q = rng.dirichlet(np.ones(d)) * 0.9 + 0.1 / d
    es = pencil_eigensystem(np.diag(p), np.diag(q), np.eye(d))
    expected = np.sqrt(q / p)
    assert sorted(es.eigenvalues) == pytest.approx(sorted(expected), rel=1e-8)
    for sp in es.finite:
        for k in np.nonzero(np.isclose(expected, sp.value, rtol=1e-8))[0]:
            assert overlap(sp.basis, np.eye(d)[:, k]) == pytest.approx(1.0, abs=1e-8)


def test_pure_qubit_pair_structure():
    rho, sigma = pure_state(KET0), pure_state(KETP)
    es = pencil_eigensystem(rho, sigma)
    assert not es.regular
    zero = es.finite[0]
    assert zero.value == 0.0
    assert overlap(zero.basis, KETP) < 1e-9          # lambda = 0 eigenvector is orthogonal to sigma
    assert overlap(es.infinite, np.array([0, 1])) == pytest.approx(1.0, abs=1e-9)
    assert all(v >= 0 for v in es.eigenvalues)


@given(generators(), st.integers(2, 5), st.data())
def test_trivial_intersection_and_residuals(rng, d, data):
    ra = data.draw(st.integers(1, d))
    rb = data.draw(st.integers(max(1, d - ra), d))
    rho, sigma = InstanceSpec(d, ra, rb, int(rng.integers(2 ** 31))).generate()
    es = pencil_eigensystem(rho, sigma)
    spaces = es.spaces()
    for sp in spaces:
        assert es.residual(sp) < 1e-7
    for i in range(len(spaces)):
        for j in range(i + 1, len(spaces)):
            B = np.hstack([spaces[i].basis, spaces[j].basis])
            assert la.numerical_rank(B) == B.shape[1]


@given(generators(), st.integers(2, 5))
def test_full_rank_reduction(rng, d):
    rho = DensityOperator(random_state(d, d, rng))
    sigma = DensityOperator(random_state(d, int(rng.integers(1, d + 1)), rng))
    es = pencil_eigensystem(rho, sigma)
    gm = geometric_mean(rho.pinv, sigma.matrix)
    positive = [sp for sp in es.finite if sp.value > 0]
    assert [sp.value for sp in positive] == pytest.approx([sp.value for sp in gm.eigenspaces], rel=1e-7)
    for a, b in zip(positive, gm.eigenspaces):
        assert la.fro(a.basis @ la.dagger(a.basis) - b.basis @ la.dagger(b.basis)) < 1e-7


@given(generators(), st.integers(3, 5), st.data())
def test_commuting_support_split(rng, d, data):
    ra = data.draw(st.integers(1, d - 1))
    rb = data.draw(st.integers(d - ra, d))
    rho, sigma = InstanceSpec(d, ra, rb, int(rng.integers(2 ** 31)), "commuting-supports").generate()
    rho = DensityOperator(rho)
    es = pencil_eigensystem(rho, sigma)
    P = rho.support
    for sp in es.spaces():
        for v in sp.basis.T:
            assert min(np.linalg.norm(P @ v), np.linalg.norm(v - P @ v)) < 1e-8


# --------------------------------------------------------------------------- parallel check

def test_parallel_examples():
    rho = DensityOperator(np.diag([0.5, 0.5, 0.0]))
    sigma = DensityOperator(np.diag([0.2, 0.3, 0.5]))
    U = construct_polar_unitary(rho, sigma)
    r = parallel_check(np.diag([0, 0, 1.0]), rho, sigma, U)
    assert r.verdict and r.kappa is None
    full = DensityOperator(np.diag([0.6, 0.4]))
    s2 = DensityOperator(np.diag([0.3, 0.7]))
    gm = geometric_mean(full.pinv, s2.matrix)
    U2 = construct_polar_unitary(full, s2)
    for sp in gm.eigenspaces:
        r = parallel_check(sp.projector, full, s2, U2)
        assert r.verdict and r.kappa == pytest.approx(sp.value, rel=1e-9)
    a, b = pure_state(KET0), pure_state(KETP)
    assert not parallel_check(np.eye(2), a, b, construct_polar_unitary(a, b)).verdict


def test_parallel_pair_rejects_negative_ratio():
    A = np.eye(2)
    assert parallel_pair(A, 2 * A, 1.0).verdict
    assert not parallel_pair(A, -2 * A, 1.0).verdict
    assert parallel_pair(A, A, 0.0).kappa is None


@given(generators(), st.integers(2, 4))
def test_sum_escapes_eigenspace(rng, d):
    rho = DensityOperator(random_state(d, d, rng))
    sigma = DensityOperator(random_state(d, d, rng))
    U = construct_polar_unitary(rho, sigma)
    spaces = geometric_mean(rho.pinv, sigma.matrix).eigenspaces
    P = spaces[0].projector * rng.uniform(0.2, 1)
    Q = spaces[-1].projector * rng.uniform(0.2, 1)
    assert parallel_check(P, rho, sigma, U).verdict
    assert not parallel_check(P + Q, rho, sigma, U).verdict


def test_eigensystem_json():
    es = pencil_eigensystem(RHO_A, SIGMA_A)
    js = es.to_json()
    assert [e["lambda"] for e in js][-1] == "inf"
    assert all(len(e["basis"]) >= 1 for e in js)
