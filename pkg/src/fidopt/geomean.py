"""Operator geometric means with Moore-Penrose pseudo-inverse arguments.

Convention: ``M(A, B) = sqrt(A) sqrt(sqrt(A+) B sqrt(A+)) sqrt(A)``. The mean
``M(rho+, sigma)`` used to build canonical measurements is obtained by calling
``geometric_mean(pinv(rho), sigma)``; then ``sqrt(A+) = sqrt(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .config import ToleranceConfig, resolve

# Two support projectors at Frobenius distance below this are the same subspace.
SUBSPACE_ATOL = 1e-7
# Eigenvalues of P_A + P_B above 2 - INTERSECTION_GAP span supp A ∩ supp B.
INTERSECTION_GAP = 1e-9


@dataclass(frozen=True)
class GeometricMeanReport:
    """The mean together with its support data.

    Attributes
    ----------
    mean : ndarray
        ``M(A, B)``, PSD.
    support : ndarray
        Projector onto the support of the mean.
    pi_ab : ndarray
        Projector onto ``supp(P_A P_B P_A)``; equals ``support`` in exact arithmetic.
    eigenspaces : list of Eigenspace
        Clustered eigenspaces with positive eigenvalue, in ascending order.
    """

    mean: np.ndarray
    support: np.ndarray
    pi_ab: np.ndarray
    eigenspaces: list[la.Eigenspace]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.support).real))


def mean_matrix(A, B, tol: ToleranceConfig | None = None) -> np.ndarray:
    tol = resolve(tol)
    sA = la.psd_sqrt(A, tol)
    sAp = la.psd_power(A, -0.5, tol)
    B = la.as_matrix(B)
    C = la.hermitianize(sAp @ B @ sAp)
    # cut relative to the input scale, not to |C|: C may be pure round-off
    w, V = la.hermitian_eig(C)
    scale = np.linalg.norm(sAp, 2) ** 2 * np.linalg.norm(B, 2)
    w = np.where(w > la.rank_threshold(scale, len(w), tol), w, 0.0)
    inner = (V * np.sqrt(w)) @ la.dagger(V)
    return la.hermitianize(sA @ inner @ sA)


def positive_eigenspaces(M: np.ndarray, tol: ToleranceConfig | None = None) -> list[la.Eigenspace]:
    """Clustered eigenspaces of a PSD matrix, zero eigenspace excluded."""
    tol = resolve(tol)
    w, V = la.hermitian_eig(M)
    top = w[-1] if w.size else 0.0
    if top <= 0:
        return []
    keep = w > la.rank_threshold(top, len(w), tol)
    return la.cluster_eigenspaces(la.HermitianEigensystem(w[keep], V[:, keep]), tol)


def geometric_mean(A, B, tol: ToleranceConfig | None = None) -> GeometricMeanReport:
    tol = resolve(tol)
    M = mean_matrix(A, B, tol)
    spaces = positive_eigenspaces(M, tol)
    d = M.shape[0]
    if spaces:
        basis = np.hstack([s.basis for s in spaces])
        support = basis @ la.dagger(basis)
    else:
        support = np.zeros((d, d), dtype=complex)
    PA = la.support_projector(A, tol)
    PB = la.support_projector(B, tol)
    pi_ab = la.support_projector(la.hermitianize(PA @ PB @ PA), tol)
    return GeometricMeanReport(M, support, pi_ab, spaces)


def intersection_projector(PA: np.ndarray, PB: np.ndarray) -> np.ndarray:
    """Projector onto ``range(PA) ∩ range(PB)`` for orthogonal projectors."""
    w, V = np.linalg.eigh(la.hermitianize(PA + PB))
    B = V[:, w > 2.0 - INTERSECTION_GAP]
    return B @ la.dagger(B)


def span_projector(*bases: np.ndarray, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Projector onto the sum of the column spaces of ``bases``."""
    stacked = np.hstack(bases)
    if stacked.shape[1] == 0:
        d = stacked.shape[0]
        return np.zeros((d, d), dtype=complex)
    R = la.range_basis(stacked, tol)
    return R @ la.dagger(R)


def gm_equivalence_flags(A, B, tol: ToleranceConfig | None = None) -> tuple[bool, ...]:
    """Evaluate the nine statements equivalent to ``[P_A, P_B] = 0``.

    Every statement is computed independently, so a disagreement points at
    the numerically fragile one. In order:

    1. ``P_A`` and ``P_B`` commute.
    2. ``supp M(A,B) = supp A ∩ supp B``.
    3. ``supp M(A,B) <= supp B``.
    4. ``Null M(A,B) = Null A + Null B``.
    5. ``Null B <= Null M(A,B)``.
    6. ``M(B,A)`` and ``M(A,B)`` share their support.
    7. ``M(B+,A+)`` and ``M(A,B)`` share their support.
    8. ``M(B+,A+)`` is the pseudo-inverse of ``M(A,B)``.
    9. ``M(B+,A+)`` and ``M(A,B)`` commute.
    """
    tol = resolve(tol)
    A = la.as_matrix(A)
    B = la.as_matrix(B)
    d = A.shape[0]
    I = np.eye(d)
    PA = la.support_projector(A, tol)
    PB = la.support_projector(B, tol)
    M_ab = mean_matrix(A, B, tol)
    M_ba = mean_matrix(B, A, tol)
    M_inv = mean_matrix(la.psd_power(B, -1.0, tol), la.psd_power(A, -1.0, tol), tol)
    S_ab = la.support_projector(M_ab, tol)
    S_ba = la.support_projector(M_ba, tol)
    S_inv = la.support_projector(M_inv, tol)
    null_sum = span_projector(la.null_basis_psd(A, tol), la.null_basis_psd(B, tol), tol=tol)
    scale = 1.0 + la.fro(M_ab) * la.fro(M_inv)

    pinv_res = max(la.penrose_residuals(M_ab, M_inv))
    return (
        la.commutator_norm(PA, PB) <= SUBSPACE_ATOL,
        la.same_subspace(S_ab, intersection_projector(PA, PB), SUBSPACE_ATOL),
        la.subspace_contains(PB, S_ab, SUBSPACE_ATOL),
        la.same_subspace(I - S_ab, null_sum, SUBSPACE_ATOL),
        la.subspace_contains(I - S_ab, I - PB, SUBSPACE_ATOL),
        la.same_subspace(S_ab, S_ba, SUBSPACE_ATOL),
        la.same_subspace(S_ab, S_inv, SUBSPACE_ATOL),
        pinv_res <= SUBSPACE_ATOL * scale,
        la.commutator_norm(M_ab, M_inv) <= SUBSPACE_ATOL * scale,
    )
