"""Optimal measurements when ``sigma`` is pure.

Then optimality depends on ``rho`` only through ``P_rho``: an element is
admissible iff it lies in an eigenspace of the pencil ``(P_rho sigma, P_rho)``
with nonnegative eigenvalue. For two pure qubit states this becomes a
statement about the Bloch sphere: rank-one elements must point into the major
arc ``N -> A -> B -> M`` of the great circle through the states, where ``A``,
``B`` represent ``rho``, ``sigma`` and ``M = -A``, ``N = -B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from . import linalg as la
from .config import ToleranceConfig, resolve
from .errors import DimensionError, InfeasibleError, InvalidPovmError, InvalidStateError
from .geomean import SUBSPACE_ATOL
from .pencil import (INF, PencilEigensystem, build_eigensystem, construct_polar_unitary,
                     parallel_check, parallel_pair, pencil_null_space)
from .states import DensityOperator, Povm, as_density, check_same_dim

PAULI = np.array([[[0, 1], [1, 0]],
                  [[0, -1j], [1j, 0]],
                  [[1, 0], [0, -1]]], dtype=complex)
UNIT_ATOL = 1e-10
ARC_RESIDUAL_ATOL = 1e-9


def _require_pure_sigma(rho: DensityOperator, sigma: DensityOperator, tol: ToleranceConfig):
    check_same_dim(rho, sigma)
    if not sigma.is_pure:
        raise InvalidStateError("sigma must be a pure state", "pure-sigma")
    if la.fro(rho.matrix @ sigma.matrix) <= tol.opt_tol:
        raise InvalidStateError("rho sigma = 0: the states are perfectly distinguishable",
                                "nonorthogonal-states")


def pure_pencil(rho, sigma, tol: ToleranceConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """The pair ``(P_rho sigma, P_rho)``."""
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    return rho.support @ sigma.matrix, rho.support


def pure_pencil_eigensystem(rho, sigma, tol: ToleranceConfig | None = None) -> PencilEigensystem:
    """Eigenstructure of ``(P_rho sigma, P_rho)`` for pure ``sigma``.

    The eigenvalues ``0`` (eigenspace ``Null(sigma)``) and ``1`` (``supp(sigma)``)
    are always reported, ``inf`` carries ``Null(P_rho)``. The pencil is singular
    whenever ``rho`` is, so any other ``lam >= 0`` is reachable through
    ``eigenspace_at``.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    _require_pure_sigma(rho, sigma, tol)
    K, L = pure_pencil(rho, sigma, tol)
    return build_eigensystem(K, L, [0.0, 1.0], [], tol)


def pure_criterion(E: Povm, rho, sigma, tol: ToleranceConfig | None = None) -> bool:
    """Every element lies in a ``(P_rho sigma, P_rho)`` eigenspace with ``lam >= 0``.

    Orthogonal states (``rho sigma = 0``, so ``F = 0``) bypass the pencil: an
    element is admissible iff it never fires for both states.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    check_same_dim(rho, sigma)
    if not sigma.is_pure:
        raise InvalidStateError("sigma must be a pure state", "pure-sigma")
    if la.fro(rho.matrix @ sigma.matrix) <= tol.opt_tol:
        return all(np.trace(rho.matrix @ X).real * np.trace(sigma.matrix @ X).real
                   <= tol.opt_tol * np.trace(X).real ** 2 for X in E.elements)
    K, L = pure_pencil(rho, sigma, tol)
    for X in E.elements:
        sX = la.psd_sqrt(X, tol)
        if not parallel_pair(L @ sX, K @ sX, la.fro(sX), tol).verdict:
            return False
    return True


# --------------------------------------------------------------------------- Bloch sphere

@dataclass(frozen=True)
class BlochPoint:
    """Unit vector on the Bloch sphere."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float).reshape(3)
        if abs(np.linalg.norm(v) - 1.0) > UNIT_ATOL:
            raise InvalidStateError(f"Bloch vector has norm {np.linalg.norm(v):.12g}",
                                    "unit-bloch-vector")
        object.__setattr__(self, "vec", v)

    @classmethod
    def normalized(cls, v) -> "BlochPoint":
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    def __neg__(self) -> "BlochPoint":
        return BlochPoint(-self.vec)

    def tolist(self) -> list[float]:
        return self.vec.tolist()


def to_bloch(state) -> np.ndarray:
    """Bloch vector ``(x, y, z)`` of a qubit operator ``(I + x X + y Y + z Z) / 2``."""
    M = state.matrix if isinstance(state, DensityOperator) else la.as_matrix(state)
    if M.shape != (2, 2):
        raise DimensionError("Bloch coordinates need a qubit operator")
    return np.einsum("kij,ji->k", PAULI, M).real


def from_bloch(point) -> DensityOperator:
    """Pure qubit state for a unit Bloch vector."""
    p = point if isinstance(point, BlochPoint) else BlochPoint(point)
    return DensityOperator((np.eye(2) + np.einsum("k,kij->ij", p.vec, PAULI)) / 2)


def bloch_roundtrip(x):
    """State to Bloch point, or Bloch point to state, depending on the input."""
    if isinstance(x, BlochPoint):
        return from_bloch(x)
    arr = x.matrix if isinstance(x, DensityOperator) else np.asarray(x)
    if arr.shape == (3,):
        return from_bloch(arr)
    return BlochPoint.normalized(to_bloch(arr))


def element_point(X: np.ndarray, tol: ToleranceConfig | None = None) -> BlochPoint | None:
    """Direction of a rank-one qubit element, ``None`` for rank zero or two."""
    if la.numerical_rank(X, tol) != 1:
        return None
    return BlochPoint.normalized(to_bloch(X / np.trace(X).real))


@dataclass(frozen=True)
class ArcSpec:
    """Major arc ``N -> A -> B -> M`` on the great circle through ``A`` and ``B``.

    Angular coordinate: ``phi = atan2(p . e2, p . e1)`` with ``e1 = A`` and
    ``e2 = normal x A``, so ``A`` sits at 0, ``B`` at ``gamma``, ``M`` at ``pi``
    and ``N`` at ``gamma - pi``.
    """

    A: BlochPoint
    B: BlochPoint
    normal: np.ndarray
    gamma: float

    @classmethod
    def from_points(cls, A, B) -> "ArcSpec":
        A = A if isinstance(A, BlochPoint) else BlochPoint(A)
        B = B if isinstance(B, BlochPoint) else BlochPoint(B)
        n = np.cross(A.vec, B.vec)
        s = np.linalg.norm(n)
        if s <= 1e-9:
            raise InvalidStateError("degenerate arc: A = +-B", "noncommuting-pair")
        gamma = float(np.arctan2(s, A.vec @ B.vec))
        return cls(A, B, n / s, gamma)

    @classmethod
    def from_states(cls, rho, sigma) -> "ArcSpec":
        return cls.from_points(bloch_roundtrip(as_density(rho)), bloch_roundtrip(as_density(sigma)))

    @property
    def M(self) -> BlochPoint:
        return -self.A

    @property
    def N(self) -> BlochPoint:
        return -self.B

    @property
    def e2(self) -> np.ndarray:
        return np.cross(self.normal, self.A.vec)

    def angle(self, p) -> float:
        v = p.vec if isinstance(p, BlochPoint) else np.asarray(p, dtype=float)
        return float(np.arctan2(v @ self.e2, v @ self.A.vec))

    def arc_parameter(self, p) -> float:
        """Angle travelled from ``N`` towards ``A``, in ``[0, 2 pi)``."""
        return float((self.angle(p) - (self.gamma - np.pi)) % (2 * np.pi))

    @property
    def length(self) -> float:
        return 2 * np.pi - self.gamma

    def point_at(self, t: float) -> BlochPoint:
        """Point at arc parameter ``t`` (0 at ``N``, ``length`` at ``M``)."""
        phi = t + self.gamma - np.pi
        return BlochPoint.normalized(np.cos(phi) * self.A.vec + np.sin(phi) * self.e2)


def on_major_arc(p, arc: ArcSpec, tol: float = 1e-9) -> bool:
    """``p`` lies on the great circle and on the closed arc ``N -> A -> B -> M``."""
    v = p.vec if isinstance(p, BlochPoint) else np.asarray(p, dtype=float)
    if abs(v @ arc.normal) > tol:
        return False
    t = arc.arc_parameter(v)
    return t <= arc.length + tol or t >= 2 * np.pi - tol


def arc_povm(points: Sequence, arc: ArcSpec, tol: float = 1e-9) -> Povm:
    """Rank-one POVM ``{w_i |p_i><p_i|}`` through the given arc points.

    The weights solve ``sum w_i = 2`` and ``sum w_i p_i = 0`` by nonnegative
    least squares; zero weights are dropped.

    Raises
    ------
    InvalidPovmError
        If a point is off the arc or fewer than two points are given.
    InfeasibleError
        If no nonnegative weights reach the identity (residual above ``1e-9``).
    """
    pts = [p if isinstance(p, BlochPoint) else BlochPoint.normalized(p) for p in points]
    if len(pts) < 2:
        raise InvalidPovmError("an arc POVM needs at least two points", "arc-points")
    for p in pts:
        if not on_major_arc(p, arc, tol):
            raise InvalidPovmError(f"point {p.tolist()} is off the major arc", "on-major-arc")
    A = np.vstack([np.ones(len(pts)), np.array([p.vec for p in pts]).T])
    b = np.array([2.0, 0.0, 0.0, 0.0])
    w, residual = nnls(A, b)
    if residual > ARC_RESIDUAL_ATOL:
        raise InfeasibleError(f"no nonnegative weights complete the POVM "
                              f"(residual {residual:.3e})")
    keep = [i for i in range(len(pts)) if w[i] > ARC_RESIDUAL_ATOL]
    els = [w[i] * from_bloch(pts[i]).matrix for i in keep]
    return Povm.from_elements(els, [f"p{i}" for i in keep])


# --------------------------------------------------------------------- pure-mixed reduction

@dataclass(frozen=True)
class PureMixedReduction:
    """Reduction of ``(rho, sigma)`` with pure ``sigma`` to a pair of pure qubit states.

    ``basis`` spans ``V = Null(rho) + supp(sigma)`` (two dimensional) and
    ``pi2`` projects onto it. ``varrho = pi2 P_rho pi2`` is pure and satisfies
    ``varrho sigma = P_rho sigma``. ``rho_red`` and ``sigma_red`` are
    ``varrho`` and ``sigma`` written in ``basis``.
    """

    rho: DensityOperator
    sigma: DensityOperator
    basis: np.ndarray
    pi2: np.ndarray
    varrho: DensityOperator
    rho_red: DensityOperator
    sigma_red: DensityOperator
    tol: ToleranceConfig

    def forward(self, E: Povm) -> Povm:
        """Lift a POVM for the reduced pair: embed, adjoin ``1 - pi2``, merge in ``Null(sigma)``."""
        Q = self.basis
        els = [Q @ X @ la.dagger(Q) for X in E.elements] + [np.eye(self.rho.dim) - self.pi2]
        labels = list(E.labels) + ["perp"]
        null_idx = [i for i, X in enumerate(els)
                    if np.trace(self.sigma.matrix @ X).real <= self.tol.opt_tol * np.trace(X).real]
        if len(null_idx) > 1:
            merged = sum(els[i] for i in null_idx)
            name = "+".join(labels[i] for i in null_idx)
            first = null_idx[0]
            els = [merged if i == first else X for i, X in enumerate(els) if i == first or i not in null_idx]
            labels = [name if i == first else lab for i, lab in enumerate(labels)
                      if i == first or i not in null_idx]
        return Povm.from_elements(els, labels, self.tol)

    def backward(self, E: Povm) -> Povm:
        """``pi2 E pi2`` written on ``V``, zero elements dropped."""
        Q = self.basis
        pairs = [(lab, la.hermitianize(la.dagger(Q) @ X @ Q)) for lab, X in E]
        pairs = [(lab, X) for lab, X in pairs if la.fro(X) > self.tol.opt_tol]
        return Povm.from_elements([X for _, X in pairs], [lab for lab, _ in pairs], self.tol)

    def eigmap_residual(self, lam: float) -> float:
        """Distance between the two sides of ``P_lam = P'_lam + (1 - pi2) delta_{lam, 0}``."""
        K, L = pure_pencil(self.rho, self.sigma, self.tol)
        full = pencil_null_space(K, L, lam)
        Q = self.basis
        Kr = la.dagger(Q) @ self.varrho.matrix @ self.sigma.matrix @ Q
        Lr = la.dagger(Q) @ self.varrho.matrix @ Q
        red = Q @ pencil_null_space(Kr, Lr, lam)
        rhs = red @ la.dagger(red)
        if lam == 0:
            rhs = rhs + np.eye(self.rho.dim) - self.pi2
        return la.fro(full @ la.dagger(full) - rhs)


def reduce_pure_mixed(rho, sigma, tol: ToleranceConfig | None = None) -> PureMixedReduction:
    """Build the two-dimensional reduction for pure ``sigma`` and mixed ``rho``.

    Raises
    ------
    InvalidStateError
        If ``sigma`` is not pure, ``rho`` has rank below two, ``sigma``
        commutes with ``P_rho`` or ``rho + sigma`` is singular.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    _require_pure_sigma(rho, sigma, tol)
    if rho.rank < 2:
        raise InvalidStateError("rho must have rank at least two", "mixed-rho")
    if la.commutator_norm(sigma.matrix, rho.support) <= SUBSPACE_ATOL:
        raise InvalidStateError("sigma commutes with the support projector of rho",
                                "noncommuting-support")
    if la.numerical_rank(rho.matrix + sigma.matrix, tol) < rho.dim:
        raise InvalidStateError("rho + sigma is singular", "nonsingular-sum")
    Q = la.range_basis(np.hstack([rho.null_basis, sigma.support_basis]), tol)
    if Q.shape[1] != 2:
        raise InvalidStateError(f"Null(rho) + supp(sigma) has dimension {Q.shape[1]}, not 2",
                                "reduction-dimension")
    pi2 = Q @ la.dagger(Q)
    varrho = as_density(la.hermitianize(pi2 @ rho.support @ pi2), tol)
    rho_red = as_density(la.hermitianize(la.dagger(Q) @ varrho.matrix @ Q), tol)
    sigma_red = as_density(la.hermitianize(la.dagger(Q) @ sigma.matrix @ Q), tol)
    return PureMixedReduction(rho, sigma, Q, pi2, varrho, rho_red, sigma_red, tol)


def arc_sweep(rho, sigma, lambdas: Sequence[float],
              tol: ToleranceConfig | None = None) -> list[tuple[float, float, float, float, float]]:
    """Bloch points of the ``(P_rho sigma, P_rho)`` eigenvectors for two pure qubit states.

    Returns rows ``(lam, x, y, z, kappa)``. ``kappa`` is the proportionality
    constant of the resulting rank-one element under the general pencil test
    (``inf`` on the infinite branch), which equals ``lam / sqrt(F)``.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    if rho.dim != 2 or not rho.is_pure:
        raise InvalidStateError("the arc sweep needs two pure qubit states", "pure-qubit-pair")
    _require_pure_sigma(rho, sigma, tol)
    K, L = pure_pencil(rho, sigma, tol)
    U = construct_polar_unitary(rho, sigma, tol, allow_singular_sum=True)
    rows = []
    for lam in lambdas:
        lam = float(lam)
        basis = la.null_basis_psd(L, tol) if np.isinf(lam) else pencil_null_space(K, L, lam)
        v = basis[:, :1]
        X = v @ la.dagger(v)
        x, y, z = to_bloch(X)
        kappa = parallel_check(X, rho, sigma, U, tol).kappa
        rows.append((lam, float(x), float(y), float(z), INF if kappa is None else float(kappa)))
    return rows
