"""The pencil ``(sqrt(sigma), U sqrt(rho))`` and the polar unitary ``U``.

``U`` is any unitary with ``sqrt(rho) sqrt(sigma) U = sqrt(sqrt(rho) sigma sqrt(rho))``.
A POVM element ``E`` is compatible with optimality when ``sqrt(sigma) sqrt(E)``
and ``U sqrt(rho) sqrt(E)`` are parallel, that is, when ``E`` is supported in a
single pencil eigenspace with nonnegative eigenvalue (``inf`` included).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import linalg as la
from .config import ToleranceConfig, resolve
from .errors import SingularSumError
from .geomean import geometric_mean
from .states import DensityOperator, as_density, check_same_dim

INF = float("inf")
# Relative singular-value level at which K - lambda L counts as rank deficient.
NULLITY_RTOL = 1e-8
# Fixed probe points for the generic nullity of a possibly singular pencil.
PROBE_LAMBDAS = (0.2718281828, 1.4142135624, 7.3890560989)


@dataclass(frozen=True)
class PolarUnitary:
    """Unitary ``U`` in the polar relation, with the SVD it was built from.

    ``aligned`` records whether the zero-singular-value blocks were matched to
    the ``Null(rho)`` / ``supp(sigma)`` decomposition (possible exactly when the
    support projectors commute).
    """

    U: np.ndarray
    W: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray
    rank: int
    aligned: bool

    def residual(self, rho: DensityOperator, sigma: DensityOperator) -> float:
        target = la.psd_sqrt(la.hermitianize(rho.sqrt @ sigma.matrix @ rho.sqrt), rho.tol)
        return la.fro(rho.sqrt @ sigma.sqrt @ self.U - target)

    def unitarity(self) -> float:
        return la.fro(la.dagger(self.U) @ self.U - np.eye(self.U.shape[0]))


def is_sum_singular(rho: DensityOperator, sigma: DensityOperator,
                    tol: ToleranceConfig | None = None) -> bool:
    return la.numerical_rank(rho.matrix + sigma.matrix, tol) < rho.dim


def construct_polar_unitary(rho, sigma, tol: ToleranceConfig | None = None,
                            allow_singular_sum: bool = False) -> PolarUnitary:
    """Canonical ``U`` from a full SVD ``sqrt(rho) sqrt(sigma) = W S V^dag``.

    The nonzero singular pairs fix ``U`` on ``supp(rho)``: ``U = V W^dag``. The
    remaining columns are free. When ``P_rho`` and ``P_sigma`` commute they are
    chosen so that ``U`` maps ``Null(rho)`` onto ``supp(sigma)`` minus the
    singular directions and the rest of ``supp(rho)`` onto ``Null(sigma)``; this
    makes every pencil eigenvector lie in ``Null(rho)`` or ``supp(rho)``.

    Raises
    ------
    SingularSumError
        If ``rho + sigma`` is singular and ``allow_singular_sum`` is false.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    check_same_dim(rho, sigma)
    if not allow_singular_sum and is_sum_singular(rho, sigma, tol):
        raise SingularSumError(
            "rho + sigma is singular; restrict both states to supp(rho + sigma) first")
    X = rho.sqrt @ sigma.sqrt
    W, s, Vh = np.linalg.svd(X)
    V = la.dagger(Vh)
    d = rho.dim
    r = int(np.sum(s > la.rank_threshold(s[0], d, tol))) if s[0] > 0 else 0
    aligned = False
    if la.commutator_norm(rho.support, sigma.support) <= tol.equiv_tol:
        a_null = rho.null_basis
        b_rest = la.complement_basis(V[:, :r], sigma.support_basis)
        a_rest = la.complement_basis(W[:, :r], rho.support_basis)
        b_null = sigma.null_basis
        if (a_null.shape[1] == b_rest.shape[1] and a_rest.shape[1] == b_null.shape[1]
                and r + a_null.shape[1] + a_rest.shape[1] == d):
            W = np.hstack([W[:, :r], a_null, a_rest])
            V = np.hstack([V[:, :r], b_rest, b_null])
            aligned = True
    U = V @ la.dagger(W)
    return PolarUnitary(U, W, s, V, r, aligned)


def _nullity_scale(K: np.ndarray, L: np.ndarray, lam: float) -> float:
    return max(np.linalg.norm(K, 2), abs(lam) * np.linalg.norm(L, 2), 1e-300)


def pencil_null_space(K: np.ndarray, L: np.ndarray, lam: float,
                      rtol: float = NULLITY_RTOL) -> np.ndarray:
    """Orthonormal basis of ``Null(K - lam L)``; ``lam = inf`` gives ``Null(L)``."""
    if np.isinf(lam):
        return la.null_space(L, scale=np.linalg.norm(L, 2), rtol=rtol)
    return la.null_space(K - lam * L, scale=_nullity_scale(K, L, lam), rtol=rtol)


@dataclass(frozen=True)
class PencilEigensystem:
    """Nonnegative eigenvalues of a pencil ``(K, L)`` with eigenspace bases.

    Attributes
    ----------
    finite : list of Eigenspace
        Ascending nonnegative eigenvalues. An eigenvalue is listed when the
        nullity of ``K - lam L`` exceeds the generic nullity, plus the
        distinguished values the caller asked for.
    infinite : ndarray
        Basis of ``Null(L)``; zero columns when ``L`` is nonsingular.
    generic_nullity : int
        Nullity of ``K - lam L`` at generic ``lam``; positive for singular pencils,
        for which every ``lam`` is formally an eigenvalue.
    excluded : list of complex
        Negative or complex eigenvalues reported by the generalized eigensolver.
    """

    K: np.ndarray
    L: np.ndarray
    finite: list[la.Eigenspace]
    infinite: np.ndarray
    generic_nullity: int
    excluded: list[complex] = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return self.generic_nullity == 0

    @property
    def eigenvalues(self) -> list[float]:
        vals = [e.value for e in self.finite]
        if self.infinite.shape[1]:
            vals.append(INF)
        return vals

    def spaces(self) -> list[la.Eigenspace]:
        out = list(self.finite)
        if self.infinite.shape[1]:
            out.append(la.Eigenspace(INF, self.infinite))
        return out

    def eigenspace_at(self, lam: float) -> np.ndarray:
        return pencil_null_space(self.K, self.L, lam)

    def residual(self, space: la.Eigenspace) -> float:
        """Largest ``|(K - lam L) v|`` over the basis (``|L v|`` for ``inf``)."""
        if space.dim == 0:
            return 0.0
        if np.isinf(space.value):
            R = self.L @ space.basis
        else:
            R = (self.K - space.value * self.L) @ space.basis
        return float(np.max(np.linalg.norm(R, axis=0)))

    def to_json(self) -> list[dict]:
        out = []
        for sp in self.spaces():
            lam = "inf" if np.isinf(sp.value) else float(sp.value)
            out.append({"lambda": lam, "basis": [
                {"re": v.real.tolist(), "im": v.imag.tolist()} for v in sp.basis.T]})
        return out


def generic_nullity(K: np.ndarray, L: np.ndarray) -> int:
    return min(pencil_null_space(K, L, lam).shape[1] for lam in PROBE_LAMBDAS)


def _qz_candidates(K: np.ndarray, L: np.ndarray, tol: ToleranceConfig
                   ) -> tuple[list[float], list[complex]]:
    alpha, beta = scipy.linalg.eig(K, L, right=False, homogeneous_eigvals=True)
    accepted, excluded = [], []
    for a, b in zip(alpha, beta):
        if abs(b) <= 1e-13 * max(abs(a), 1.0):
            continue
        lam = complex(a / b)
        if abs(lam.imag) <= tol.opt_tol * (1.0 + abs(lam)) and lam.real >= -tol.opt_tol:
            accepted.append(max(lam.real, 0.0))
        else:
            excluded.append(lam)
    return accepted, excluded


def _merge_candidates(values: list[float], tol: ToleranceConfig) -> list[float]:
    merged: list[float] = []
    for v in sorted(values):
        if merged and v - merged[-1] <= tol.cluster_gap * (1.0 + abs(merged[-1])):
            continue
        merged.append(v)
    return merged


def build_eigensystem(K: np.ndarray, L: np.ndarray, distinguished: list[float],
                      candidates: list[float], tol: ToleranceConfig | None = None
                      ) -> PencilEigensystem:
    """Validate eigenvalue candidates of ``(K, L)`` by the nullity jump.

    ``distinguished`` values are always reported; ``candidates`` only when
    ``K - lam L`` loses more rank than at a generic ``lam``.
    """
    tol = resolve(tol)
    g = generic_nullity(K, L)
    qz, excluded = _qz_candidates(K, L, tol)
    keep = {float(v) for v in distinguished}
    for lam in _merge_candidates(list(candidates) + qz, tol):
        if any(abs(lam - v) <= tol.cluster_gap * (1.0 + v) for v in keep):
            continue
        if pencil_null_space(K, L, lam).shape[1] > g:
            keep.add(lam)
    finite = []
    for lam in sorted(keep):
        basis = pencil_null_space(K, L, lam)
        if basis.shape[1]:
            finite.append(la.Eigenspace(lam, basis))
    infinite = pencil_null_space(K, L, INF)
    return PencilEigensystem(K, L, finite, infinite, g, excluded)


def pencil_eigensystem(rho, sigma, U: PolarUnitary | np.ndarray | None = None,
                       tol: ToleranceConfig | None = None) -> PencilEigensystem:
    """Eigensystem of ``(sqrt(sigma), U sqrt(rho))``.

    Always reported: ``0`` whenever ``sigma`` is singular, the positive
    eigenvalues of ``M(rho+, sigma)`` and the reciprocals of the positive
    eigenvalues of ``M(sigma+, rho)``; these carry the elements of both
    canonical PVMs even when the pencil is singular. Further finite
    nonnegative eigenvalues come from a QZ solve, kept on a nullity jump.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    if U is None:
        U = construct_polar_unitary(rho, sigma, tol)
    Um = U.U if isinstance(U, PolarUnitary) else np.asarray(U, dtype=complex)
    K = sigma.sqrt
    L = Um @ rho.sqrt
    distinguished = [0.0] if sigma.rank < sigma.dim else []
    distinguished += [sp.value for sp in geometric_mean(rho.pinv, sigma.matrix, tol).eigenspaces]
    distinguished += [1.0 / sp.value
                      for sp in geometric_mean(sigma.pinv, rho.matrix, tol).eigenspaces]
    return build_eigensystem(K, L, _merge_candidates(distinguished, tol), [], tol)


class ParallelResult(NamedTuple):
    verdict: bool
    kappa: float | None   # None marks the infinite branch
    residual: float


def parallel_check(E, rho, sigma, U: PolarUnitary | np.ndarray,
                   tol: ToleranceConfig | None = None) -> ParallelResult:
    """Test whether ``sqrt(sigma) sqrt(E)`` and ``U sqrt(rho) sqrt(E)`` are parallel.

    With ``A = U sqrt(rho) sqrt(E)`` and ``B = sqrt(sigma) sqrt(E)``, the element
    passes when ``|A| <= opt_tol |sqrt(E)|`` (infinite eigenvalue, ``kappa`` is
    ``None``) or when ``B = kappa A`` with ``kappa >= 0`` up to a relative
    residual of ``opt_tol``. Norms are Frobenius; residuals are divided by
    ``|sqrt(E)|`` so the test is invariant under rescaling ``E``.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    Um = U.U if isinstance(U, PolarUnitary) else np.asarray(U, dtype=complex)
    sE = la.psd_sqrt(E, tol)
    return parallel_pair(Um @ rho.sqrt @ sE, sigma.sqrt @ sE, la.fro(sE), tol)


def parallel_pair(A: np.ndarray, B: np.ndarray, scale: float,
                  tol: ToleranceConfig | None = None) -> ParallelResult:
    """``A = 0`` or ``B = kappa A`` with ``kappa >= 0``, residuals relative to ``scale``."""
    tol = resolve(tol)
    if scale == 0.0:
        return ParallelResult(True, None, 0.0)
    nA = la.fro(A)
    if nA <= tol.opt_tol * scale:
        return ParallelResult(True, None, nA / scale)
    kappa = np.vdot(A, B).real / nA ** 2
    residual = la.fro(B - kappa * A) / scale
    ok = kappa >= -tol.opt_tol and residual <= tol.opt_tol
    return ParallelResult(bool(ok), max(float(kappa), 0.0), float(residual))
