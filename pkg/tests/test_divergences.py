import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fidopt.divergences import (bhattacharyya, classical_fidelity, divergence_report, fidelity,
                                fvdg_bounds, helstrom_success, induced_fidelity,
                                induced_trace_distance, total_variation, trace_distance)
from fidopt.instances import InstanceSpec, random_povm_elements, random_state, random_stochastic
from fidopt.optimal import restrict_to_joint_support
from fidopt.states import DensityOperator, Povm, coarse_grain, pure_state
from frozen import FROZEN, KET0, KETP, RHO_Q, RHO_T, SIGMA_Q, SIGMA_T
from strategies import generators

R0 = pure_state(KET0)
RP = pure_state(KETP)
Z = Povm.from_elements([np.diag([1, 0]), np.diag([0, 1])])
X = Povm.from_elements([RP.matrix, np.eye(2) - RP.matrix])
I2 = Povm.from_elements([np.eye(2)])


def test_classical_examples():
    assert classical_fidelity([0.5, 0.5], [0.5, 0.5]) == pytest.approx(1.0)
    assert classical_fidelity([1, 0], [0, 1]) == 0.0
    assert classical_fidelity([0.5, 0.5], [1, 0]) == pytest.approx(0.5)
    assert bhattacharyya([0.5, 0.5], [1, 0]) == pytest.approx(np.sqrt(0.5))
    assert total_variation([1, 0], [0, 1]) == pytest.approx(1.0)


def test_quantum_examples():
    assert fidelity(R0, R0) == pytest.approx(1.0)
    assert fidelity(R0, pure_state([0, 1])) == pytest.approx(0.0, abs=1e-15)
    assert fidelity(R0, RP) == pytest.approx(0.5, abs=1e-12)
    assert trace_distance(R0, R0) == pytest.approx(0.0, abs=1e-15)
    assert trace_distance(R0, pure_state([0, 1])) == pytest.approx(1.0)
    assert trace_distance(R0, RP) == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_induced_examples():
    assert induced_fidelity(I2, R0, RP) == pytest.approx(1.0)
    assert induced_fidelity(X, R0, RP) == pytest.approx(0.5, abs=1e-12)
    assert induced_fidelity(Z, R0, RP) == pytest.approx(0.5, abs=1e-12)
    a, b = DensityOperator(np.diag([0.9, 0.1])), DensityOperator(np.diag([0.5, 0.5]))
    assert induced_fidelity(Z, a, b) == pytest.approx((np.sqrt(0.45) + np.sqrt(0.05)) ** 2)
    assert induced_trace_distance(I2, R0, RP) == pytest.approx(0.0, abs=1e-15)
    assert induced_trace_distance(Z, R0, RP) == pytest.approx(0.5)


@pytest.mark.parametrize("rho,sigma,tag", [(RHO_Q, SIGMA_Q, "qubit"), (RHO_T, SIGMA_T, "qutrit")])
def test_frozen_reference_values(rho, sigma, tag):
    assert fidelity(rho, sigma) == pytest.approx(FROZEN[f"{tag}_F"], abs=1e-12)
    assert trace_distance(rho, sigma) == pytest.approx(FROZEN[f"{tag}_D"], abs=1e-12)
    assert helstrom_success(rho, sigma) == pytest.approx(0.5 * (1 + FROZEN[f"{tag}_D"]), abs=1e-12)


@given(generators(), st.integers(2, 4))
def test_helstrom_basis_saturates(rng, d):
    rho, sigma = random_state(d, d, rng), random_state(d, d, rng)
    _, V = np.linalg.eigh(rho - sigma)
    E = Povm.from_elements([np.outer(V[:, i], V[:, i].conj()) for i in range(d)])
    assert induced_trace_distance(E, rho, sigma) == pytest.approx(trace_distance(rho, sigma), abs=1e-10)


@given(generators(), st.integers(2, 5), st.data())
def test_symmetry_and_bounds(rng, d, data):
    r1, r2 = data.draw(st.integers(1, d)), data.draw(st.integers(1, d))
    rho, sigma = random_state(d, r1, rng), random_state(d, r2, rng)
    F, D = fidelity(rho, sigma), trace_distance(rho, sigma)
    assert abs(F - fidelity(sigma, rho)) <= 1e-10
    lo, hi = fvdg_bounds(F)
    assert lo - 1e-9 <= D <= hi + 1e-9
    E = Povm.from_elements(random_povm_elements(d, data.draw(st.integers(2, 6)), rng))
    assert induced_fidelity(E, rho, sigma) >= F - 1e-9
    assert induced_trace_distance(E, rho, sigma) <= D + 1e-9


@given(generators(), st.integers(2, 4), st.integers(2, 6), st.integers(1, 4))
def test_data_processing(rng, d, k, j):
    rho, sigma = random_state(d, d, rng), random_state(d, d, rng)
    B = Povm.from_elements(random_povm_elements(d, k, rng))
    A = coarse_grain(B, random_stochastic(j, k, rng))
    assert induced_fidelity(A, rho, sigma) >= induced_fidelity(B, rho, sigma) - 1e-10
    assert induced_trace_distance(A, rho, sigma) <= induced_trace_distance(B, rho, sigma) + 1e-10


@given(generators(), st.integers(3, 5))
def test_restriction_invariance(rng, d):

    rho, sigma = InstanceSpec(d, 1, d - 2, int(rng.integers(2 ** 31)), "singular-sum").generate()
    E = Povm.from_elements(random_povm_elements(d, 3, rng))
    Er, R = restrict_to_joint_support(E, rho, sigma)
    assert abs(induced_fidelity(E, rho, sigma) - induced_fidelity(Er, R.rho, R.sigma)) <= 1e-10


def test_report():
    rep = divergence_report(R0, RP, {"X": X})
    d = rep.to_dict()
    assert d["F"] == pytest.approx(0.5) and d["measurements"]["X"]["F_E"] == pytest.approx(0.5)
    assert d["fvdg_lower"] <= d["D"] <= d["fvdg_upper"] + 1e-12
