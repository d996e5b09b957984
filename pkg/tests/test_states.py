import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fidopt import linalg as la
from fidopt.errors import DimensionError, InvalidPovmError, InvalidStateError
from fidopt.instances import random_povm_elements, random_pvm_elements, random_state, random_stochastic
from fidopt.states import (CoarseGrainingMap, DensityOperator, Povm, coarse_grain, commuting_povms,
                           compatible, compress, embed, equivalent, is_simple, measure,
                           pure_state, simplify)
from frozen import KETP
from strategies import generators

Z = Povm.from_elements([np.diag([1, 0]), np.diag([0, 1])], ["0", "1"])
X = Povm.from_elements([np.outer(KETP, KETP), np.eye(2) - np.outer(KETP, KETP)], ["+", "-"])


# --------------------------------------------------------------------------- states

def test_density_operator_validation():
    with pytest.raises(InvalidStateError) as exc:
        DensityOperator(np.diag([0.5, 0.6]))
    assert exc.value.invariant == "unit-trace"
    with pytest.raises(InvalidStateError) as exc:
        DensityOperator(np.diag([1.2, -0.2]))
    assert exc.value.invariant == "positive-semidefinite"
    with pytest.raises(DimensionError):
        DensityOperator(np.ones((2, 3)))


def test_density_operator_spectral_data():
    rho = DensityOperator(np.diag([0.7, 0.3, 0.0]))
    assert rho.rank == 2 and not rho.is_pure
    np.testing.assert_allclose(rho.support, np.diag([1, 1, 0]))
    np.testing.assert_allclose(rho.pinv, np.diag([1 / 0.7, 1 / 0.3, 0]))
    assert pure_state([1, 1j]).is_pure


# --------------------------------------------------------------------------- POVM

def test_povm_validation():
    with pytest.raises(InvalidPovmError) as exc:
        Povm.from_elements([np.eye(2), np.eye(2)])
    assert exc.value.invariant == "completeness"
    with pytest.raises(InvalidPovmError):
        Povm.from_elements([np.diag([1.5, 1]), np.diag([-0.5, 0])])
    with pytest.raises(DimensionError):
        Povm.from_elements([np.eye(2), np.zeros((3, 3))])
    assert Z.is_pvm and X.is_pvm
    trine = Povm.from_elements([np.eye(2) / 3] * 3)
    assert not trine.is_pvm


def test_measure_examples():
    np.testing.assert_allclose(measure(Z, np.diag([1, 0])).probabilities, [1, 0])
    np.testing.assert_allclose(measure(Povm.from_elements([np.eye(2)]), np.eye(2) / 2).probabilities, [1])
    np.testing.assert_allclose(measure(X, np.diag([1, 0])).probabilities, [0.5, 0.5])
    assert measure(Z, np.diag([1, 0])).as_dict() == {"0": 1.0, "1": 0.0}


def test_coarse_grain_examples():
    E = Povm.from_elements([np.diag(v) for v in np.eye(3)], ["a", "b", "c"])
    assert equivalent(coarse_grain(E, np.eye(3)), E)
    one = coarse_grain(E, np.ones((1, 3)))
    np.testing.assert_allclose(one.elements[0], np.eye(3))
    merged = coarse_grain(E, [[1, 1, 0], [0, 0, 1]])
    assert merged.labels == ("a+b", "c")
    np.testing.assert_allclose(merged.elements[0], np.diag([1, 1, 0]))
    with pytest.raises(InvalidPovmError):
        CoarseGrainingMap([[0.5, 1], [0.4, 0]])


@given(generators(), st.integers(2, 4), st.integers(2, 5), st.integers(1, 4))
def test_coarse_graining_commutes_with_measurement(rng, d, k, j):
    E = Povm.from_elements(random_povm_elements(d, k, rng))
    S = random_stochastic(j, k, rng)
    rho = random_state(d, d, rng)
    A = coarse_grain(E, S)
    np.testing.assert_allclose(measure(A, rho).probabilities, S @ measure(E, rho).probabilities,
                               atol=1e-10)


def test_simplify_examples():
    P = np.diag([1.0, 0.0])
    E = Povm.from_elements([0.3 * P, 0.7 * P, np.eye(2) - P], ["a", "b", "c"])
    S = simplify(E)
    assert len(S) == 2 and S.labels == ("a+b", "c")
    assert not is_simple(E)
    assert is_simple(Z) and simplify(Z).labels == Z.labels


@given(generators(), st.integers(2, 4), st.integers(2, 4))
def test_simplify_removes_padding(rng, d, k):
    base = random_povm_elements(d, k, rng)
    w = rng.uniform(0.2, 0.8, size=k)
    padded = [w[i] * base[i] for i in range(k)] + [(1 - w[i]) * base[i] for i in range(k)]
    E = Povm.from_elements(padded)
    assert len(simplify(E)) == k
    assert equivalent(E, Povm.from_elements(base))


def test_equivalence_examples():
    assert equivalent(Z, Z.permuted([1, 0]))
    assert not equivalent(Z, X)
    E = Povm.from_elements([np.diag(v) for v in np.eye(3)])
    assert not equivalent(E, coarse_grain(E, [[1, 1, 0], [0, 0, 1]]))


@given(generators(), st.integers(2, 4), st.integers(2, 4))
def test_equivalence_reflexive_symmetric(rng, d, k):
    A = Povm.from_elements(random_povm_elements(d, k, rng))
    B = Povm.from_elements(random_povm_elements(d, k, rng))
    assert equivalent(A, A) and equivalent(A, A.relabeled([f"x{i}" for i in range(k)]))
    assert equivalent(A, B) == equivalent(B, A)


def test_commuting_examples():
    D = Povm.from_elements([np.diag([1, 0, 0]), np.diag([0, 1, 1])])
    D2 = Povm.from_elements([np.diag([1, 1, 0]), np.diag([0, 0, 1])])
    assert commuting_povms(D, D2) and compatible(D, D2)
    assert not commuting_povms(Z, X)
    assert compatible(Z, X) is False
    assert commuting_povms(X, Povm.from_elements([np.eye(2)]))
    trine = Povm.from_elements([(np.eye(2) + s) / 3 for s in
                                (np.diag([1, -1]), np.array([[-0.5, 0.866], [0.866, 0.5]]),
                                 np.array([[-0.5, -0.866], [-0.866, 0.5]]))])
    assert compatible(trine, X) is None


@given(generators(), st.integers(2, 4))
def test_pvm_compatibility_matches_commutation(rng, d):
    A = Povm.from_elements(random_pvm_elements(d, rng))
    B = Povm.from_elements(random_pvm_elements(d, rng))
    assert compatible(A, B) is False
    # a coarse graining of A commutes with A
    groups = CoarseGrainingMap.merge([[0], list(range(1, d))], d)
    C = coarse_grain(A, groups)
    assert commuting_povms(A, C) and compatible(A, C) is True


def test_embed_compress_roundtrip():
    B = np.eye(3)[:, :2].astype(complex)
    E = embed(X, B, [("rest", np.diag([0, 0, 1]))])
    assert len(E) == 3 and E.dim == 3
    back = compress(E, B)
    assert equivalent(back, X)


def test_measure_snaps_roundoff():
    E = Povm.from_elements([np.diag([1, 0]), np.diag([0, 1])])
    p = measure(E, np.diag([1.0, 1e-17]) / (1 + 1e-17)).probabilities
    assert p[1] == 0.0


@pytest.mark.parametrize("d", [2, 3])
def test_all_permutations_equivalent(d):
    E = Povm.from_elements([np.diag(v) for v in np.eye(d)])
    for perm in itertools.permutations(range(d)):
        assert equivalent(E, E.permuted(list(perm)))
    assert la.fro(sum(E.elements) - np.eye(d)) == 0
