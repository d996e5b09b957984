"""Dense complex matrix kernels.

Hermitian eigendecomposition, Moore-Penrose pseudo-inverse, PSD powers,
support projectors, null spaces and eigenvalue clustering. Everything here is
a pure function of its inputs; no caching, no global state.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import ToleranceConfig, resolve
from .errors import DimensionError, NonFiniteError, NotHermitianError, NotPSDError

HERMITIAN_ATOL = 1e-10


class HermitianEigensystem(NamedTuple):
    eigenvalues: np.ndarray   # ascending, real
    eigenvectors: np.ndarray  # unitary, columns


class Eigenspace(NamedTuple):
    value: float
    basis: np.ndarray  # orthonormal columns

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def as_matrix(A, square: bool = True) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteError("matrix has non-finite entries")
    return A


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def hermitianize(A: np.ndarray) -> np.ndarray:
    return (A + A.conj().T) / 2


def fro(A) -> float:
    return float(np.linalg.norm(A))


def is_hermitian(A: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return fro(A - dagger(A)) <= atol * (1.0 + fro(A))


def check_hermitian(A: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    A = as_matrix(A)
    if not is_hermitian(A, atol):
        raise NotHermitianError(
            f"matrix is not Hermitian (|A - A^dag|_F = {fro(A - dagger(A)):.3e})")
    return hermitianize(A)


def hermitian_eig(A) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    A = check_hermitian(A)
    w, V = np.linalg.eigh(A)
    return HermitianEigensystem(w, V)


def rank_threshold(s_max: float, dim: int, tol: ToleranceConfig | None = None) -> float:
    return resolve(tol).rank_rtol(dim) * s_max


def numerical_rank(O, tol: ToleranceConfig | None = None) -> int:
    O = as_matrix(O, square=False)
    if O.size == 0:
        return 0
    s = np.linalg.svd(O, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rank_threshold(s[0], max(O.shape), tol)))


def pseudo_inverse(O, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse by truncated SVD.

    Singular values at or below ``rank_tol_factor * s_max`` are treated as
    zero, so ``O O^+`` and ``O^+ O`` are exact projectors onto the numerical
    range and co-range.
    """
    O = as_matrix(O, square=False)
    W, s, Vh = np.linalg.svd(O, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((O.shape[1], O.shape[0]), dtype=complex)
    keep = s > rank_threshold(s[0], max(O.shape), tol)
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (dagger(Vh) * inv) @ dagger(W)


def _psd_spectrum(A, tol: ToleranceConfig | None):
    """Eigendecomposition of a PSD matrix with clipping and rank cut applied."""
    tol = resolve(tol)
    w, V = hermitian_eig(A)
    if w.size and w[0] < -tol.psd_clip:
        raise NotPSDError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    top = w[-1] if w.size else 0.0
    if top > 0:
        w[w <= rank_threshold(top, len(w), tol)] = 0.0
    return w, V


def psd_power(A, power: float, tol: ToleranceConfig | None = None) -> np.ndarray:
    """``A**power`` for PSD ``A``; negative powers act on the support only."""
    w, V = _psd_spectrum(A, tol)
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = w[pos] ** power
    return hermitianize((V * out) @ dagger(V))


def psd_sqrt(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    return psd_power(A, 0.5, tol)


def support_basis(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the support of a PSD matrix."""
    w, V = _psd_spectrum(A, tol)
    return V[:, w > 0]


def null_basis_psd(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    w, V = _psd_spectrum(A, tol)
    return V[:, w <= 0]


def support_projector(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Projector onto the support of a Hermitian PSD matrix."""
    B = support_basis(A, tol)
    return B @ dagger(B)


def null_projector(A, tol: ToleranceConfig | None = None) -> np.ndarray:
    A = as_matrix(A)
    return np.eye(A.shape[0]) - support_projector(A, tol)


def null_space(M, tol: ToleranceConfig | None = None, scale: float | None = None,
               rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical null space of a (possibly non-Hermitian) matrix.

    A right singular vector counts as null when its singular value is at most
    ``rtol * scale``; ``scale`` defaults to the largest singular value and
    ``rtol`` to the configured rank tolerance.
    """
    M = as_matrix(M, square=False)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    n = M.shape[1]
    s_full = np.zeros(n)
    s_full[: s.size] = s
    if scale is None:
        scale = s[0] if s.size else 0.0
    if rtol is None:
        rtol = resolve(tol).rank_rtol(max(M.shape))
    return dagger(Vh)[:, s_full <= rtol * scale]


def range_basis(M, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical column space."""
    M = as_matrix(M, square=False)
    W, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return W[:, :0]
    return W[:, s > rank_threshold(s[0], max(M.shape), tol)]


def complement_basis(basis: np.ndarray, within: np.ndarray | None = None,
                     tol: ToleranceConfig | None = None) -> np.ndarray:
    """Orthonormal basis of ``span(within)`` minus ``span(basis)``.

    ``within`` defaults to the whole space.
    """
    d = basis.shape[0]
    P = np.eye(d) if within is None else within @ dagger(within)
    R = P - basis @ dagger(basis)
    w, V = np.linalg.eigh(hermitianize(R))
    return V[:, w > 0.5]


def cluster_eigenspaces(system: HermitianEigensystem,
                        tol: ToleranceConfig | None = None) -> list[Eigenspace]:
    """Group (numerically) degenerate eigenvalues into eigenspaces.

    Consecutive eigenvalues closer than ``cluster_gap * (1 + |lambda|)`` share
    a cluster; the cluster value is the mean of its members.
    """
    tol = resolve(tol)
    w, V = system
    order = np.argsort(w)
    w, V = np.asarray(w)[order], np.asarray(V)[:, order]
    clusters: list[Eigenspace] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol.cluster_gap * (1.0 + abs(w[i - 1])):
            clusters.append(Eigenspace(float(np.mean(w[start:i])), V[:, start:i]))
            start = i
    return clusters


def commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return fro(A @ B - B @ A)


def penrose_residuals(O: np.ndarray, Op: np.ndarray) -> tuple[float, float, float, float]:
    """Frobenius residuals of the four Moore-Penrose conditions."""
    OOp = O @ Op
    OpO = Op @ O
    return (fro(OOp @ O - O), fro(OpO @ Op - Op),
            fro(OOp - dagger(OOp)), fro(OpO - dagger(OpO)))


def same_subspace(P: np.ndarray, Q: np.ndarray, atol: float) -> bool:
    """Projectors ``P`` and ``Q`` agree within ``atol`` in Frobenius norm."""
    return fro(P - Q) <= atol


def subspace_contains(P_big: np.ndarray, P_small: np.ndarray, atol: float) -> bool:
    """``range(P_small)`` lies inside ``range(P_big)`` (both projectors)."""
    return fro(P_small - P_big @ P_small) <= atol
