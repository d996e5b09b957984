"""Fidelity-optimal measurements: construction, verification and the dichotomy."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .config import ToleranceConfig, resolve
from .divergences import fidelity, induced_fidelity
from .errors import (IdenticalStatesError, InvalidPovmError, OptimalityDiagnosticWarning,
                     SingularSumError)
from .geomean import SUBSPACE_ATOL, geometric_mean
from .pencil import PolarUnitary, construct_polar_unitary, is_sum_singular, parallel_check
from .states import (DensityOperator, Povm, as_density, check_same_dim, commuting_povms,
                     compatible, equivalent, is_simple)

GAP_FACTOR = 10.0


def _check_distinct(rho: DensityOperator, sigma: DensityOperator, tol: ToleranceConfig):
    if la.fro(rho.matrix - sigma.matrix) <= tol.opt_tol:
        raise IdenticalStatesError("states must be distinct")


def weakly_commute(rho: DensityOperator, sigma: DensityOperator) -> bool:
    """``P_rho`` and ``P_sigma`` commute (supports at principal angles 0 or pi/2)."""
    return la.commutator_norm(rho.support, sigma.support) <= SUBSPACE_ATOL


def build_canonical_pvm(rho, sigma, tol: ToleranceConfig | None = None,
                        allow_singular_sum: bool = False) -> Povm:
    """The simple PVM built from the spectral data of ``M(rho+, sigma)``.

    Elements, in order: eigenprojectors of ``M(rho+, sigma)`` for its positive
    eigenvalues (descending), the rest of ``supp(rho)``, then ``Null(rho)``.
    Elements of rank zero are omitted. All elements come from one orthonormal
    basis, so they are exactly orthogonal and sum to the identity to round-off.

    Raises
    ------
    IdenticalStatesError
        If ``rho`` and ``sigma`` coincide within ``opt_tol``.
    SingularSumError
        If ``rho + sigma`` is singular and ``allow_singular_sum`` is false.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    check_same_dim(rho, sigma)
    _check_distinct(rho, sigma, tol)
    if not allow_singular_sum and is_sum_singular(rho, sigma, tol):
        raise SingularSumError(
            "rho + sigma is singular; restrict both states to supp(rho + sigma) first")
    gm = geometric_mean(rho.pinv, sigma.matrix, tol)
    blocks, labels = [], []
    for k, sp in enumerate(reversed(gm.eigenspaces)):
        blocks.append(sp.basis)
        labels.append(f"eig{k}")
    used = np.hstack(blocks) if blocks else np.zeros((rho.dim, 0), dtype=complex)
    rest = la.complement_basis(used, rho.support_basis)
    if rest.shape[1]:
        blocks.append(rest)
        labels.append("supp-rest")
    null = la.complement_basis(np.hstack([used, rest]))
    if null.shape[1]:
        blocks.append(null)
        labels.append("null")
    elements = [B @ la.dagger(B) for B in blocks]
    return Povm.from_elements(elements, labels, tol)


@dataclass(frozen=True)
class ElementRecord:
    label: str
    passed: bool
    kappa: float | None
    residual: float
    eigenspace: int | str | None  # group index, "inf", or None when the element fails

    def to_dict(self) -> dict:
        return {"label": self.label, "passed": self.passed,
                "kappa": self.kappa, "residual": self.residual,
                "eigenspace": self.eigenspace}


@dataclass(frozen=True)
class OptimalityVerdict:
    """Outcome of the structural F-optimality test, cross-checked numerically.

    ``is_f_optimal`` requires every element to pass the parallel test and the
    gap ``F_E - F`` to stay within ``10 * opt_tol``; the purely structural
    outcome is kept in ``structural``.
    """

    is_f_optimal: bool
    is_minimal: bool
    is_simple: bool
    structural: bool
    F: float
    F_E: float
    elements: list[ElementRecord]
    diagnostics: list[str] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.F_E - self.F

    def to_dict(self) -> dict:
        return {"criterion": "fidelity", "is_f_optimal": self.is_f_optimal,
                "is_minimal": self.is_minimal, "is_simple": self.is_simple,
                "structural": self.structural, "F": self.F, "F_E": self.F_E,
                "gap": self.gap, "elements": [e.to_dict() for e in self.elements],
                "diagnostics": list(self.diagnostics)}


def _merge_groups(elements: Sequence[np.ndarray], passes: Sequence[bool], merge_ok) -> list[int]:
    """Connected components of the pairwise merge relation among passing elements."""
    n = len(elements)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if passes[i] and passes[j] and merge_ok(i, j):
                parent[find(i)] = find(j)
    return [find(i) for i in range(n)]


def verify_f_optimal(E: Povm, rho, sigma, tol: ToleranceConfig | None = None,
                     U: PolarUnitary | np.ndarray | None = None) -> OptimalityVerdict:
    """Decide F-optimality and minimality of ``E`` for the pair ``(rho, sigma)``.

    Each element gets a parallel test against the canonical polar unitary.
    Minimality asks that ``E`` is simple and that no sum ``E_i + E_j`` still
    passes the parallel test: a passing sum means both elements lie in one
    pencil eigenspace and can be merged without losing optimality.

    A singular ``rho + sigma`` is accepted; the parallel criterion does not
    need the sum to be invertible.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    check_same_dim(rho, sigma)
    if U is None:
        U = construct_polar_unitary(rho, sigma, tol, allow_singular_sum=True)
    checks = [parallel_check(X, rho, sigma, U, tol) for X in E.elements]
    passes = [c.verdict for c in checks]
    structural = all(passes)
    els = E.elements
    merged = {}

    def merge_ok(i, j):
        if (i, j) not in merged:
            merged[i, j] = parallel_check(els[i] + els[j], rho, sigma, U, tol).verdict
        return merged[i, j]

    groups = _merge_groups(els, passes, merge_ok)
    simple = is_simple(E, tol)
    minimal = structural and simple and len(set(groups)) == len(els)

    finite_groups = sorted({g for g, c in zip(groups, checks) if c.verdict and c.kappa is not None},
                           key=lambda g: min(c.kappa for gg, c in zip(groups, checks)
                                             if gg == g and c.kappa is not None))
    index = {g: k for k, g in enumerate(finite_groups)}
    records = []
    for lab, c, g in zip(E.labels, checks, groups):
        if not c.verdict:
            space = None
        elif c.kappa is None:
            space = "inf"
        else:
            space = index[g]
        records.append(ElementRecord(lab, c.verdict, c.kappa, c.residual, space))

    F = fidelity(rho, sigma)
    F_E = induced_fidelity(E, rho, sigma)
    diagnostics = []
    gap_ok = abs(F_E - F) <= GAP_FACTOR * tol.opt_tol
    if structural and not gap_ok:
        msg = (f"parallel test passes but F_E - F = {F_E - F:.3e} exceeds "
               f"{GAP_FACTOR:g} * opt_tol; reporting not optimal")
        diagnostics.append(msg)
        warnings.warn(msg, OptimalityDiagnosticWarning, stacklevel=2)
    elif not structural and gap_ok:
        worst = max(c.residual for c in checks if not c.verdict)
        diagnostics.append(f"parallel test fails (worst residual {worst:.3e}) although "
                           f"F_E - F = {F_E - F:.3e} is within {GAP_FACTOR:g} * opt_tol")
    optimal = structural and gap_ok
    return OptimalityVerdict(optimal, minimal and optimal, simple, structural,
                             F, F_E, records, diagnostics)


def is_refinement(E: Povm, P: Povm, tol: ToleranceConfig | None = None) -> bool:
    """Every element of ``E`` is supported in a single element of the PVM ``P``."""
    tol = resolve(tol)
    for X in E.elements:
        sX = la.psd_sqrt(X, tol)
        n = la.fro(sX)
        if n == 0.0:
            continue
        if not any(la.fro(sX - Q @ sX) <= tol.equiv_tol * n for Q in P.elements):
            return False
    return True


def mean_eigenspace_criterion(E: Povm, rho, sigma, tol: ToleranceConfig | None = None) -> bool:
    """For nonsingular ``rho``: each element lies in one eigenspace of ``M(rho^-1, sigma)``.

    The eigenspace is read off from the Rayleigh quotient ``tr(E M) / tr(E)``;
    the element passes when ``|M sqrt(E) - mu sqrt(E)| <= opt_tol |sqrt(E)|``
    relative to ``1 + |M|``.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    M = geometric_mean(rho.pinv, sigma.matrix, tol).mean
    scale = 1.0 + np.linalg.norm(M, 2)
    for X in E.elements:
        sX = la.psd_sqrt(X, tol)
        n = la.fro(sX)
        if n == 0.0:
            continue
        mu = np.trace(X @ M).real / np.trace(X).real
        if la.fro(M @ sX - mu * sX) > tol.opt_tol * n * scale:
            return False
    return True


@dataclass(frozen=True)
class DichotomyReport:
    """The five equivalent statements on the pair of canonical PVMs.

    Attributes
    ----------
    weak_commutativity : bool
        ``P_rho`` and ``P_sigma`` commute.
    commuting_flag : bool
        The two canonical PVMs commute.
    compatible_flag : bool
        The two canonical PVMs are compatible (decided by commutation).
    equivalent_flag : bool
        The two canonical PVMs are equivalent.
    unique_minimal : bool
        Every element of ``M(sigma, rho)`` merges with exactly one element of
        ``M(rho, sigma)`` and vice versa, so both name the same minimal POVM.
    """

    weak_commutativity: bool
    commuting_flag: bool
    compatible_flag: bool
    equivalent_flag: bool
    unique_minimal: bool
    M_rho_sigma: Povm
    M_sigma_rho: Povm

    @property
    def consistent(self) -> bool:
        return len({self.weak_commutativity, self.commuting_flag, self.compatible_flag,
                    self.equivalent_flag, self.unique_minimal}) == 1

    def statements(self) -> tuple[bool, bool, bool, bool, bool]:
        return (self.weak_commutativity, self.commuting_flag, self.compatible_flag,
                self.equivalent_flag, self.unique_minimal)


def merge_matching(E1: Povm, E2: Povm, rho, sigma, U, tol: ToleranceConfig) -> bool:
    """Elements of ``E1`` and ``E2`` pair up one-to-one under the merge test."""
    hits = np.array([[parallel_check(A + B, rho, sigma, U, tol).verdict
                      for B in E2.elements] for A in E1.elements])
    return (len(E1) == len(E2) and bool(np.all(hits.sum(axis=0) == 1))
            and bool(np.all(hits.sum(axis=1) == 1)))


def classify_dichotomy(rho, sigma, tol: ToleranceConfig | None = None) -> DichotomyReport:
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    M_rs = build_canonical_pvm(rho, sigma, tol)
    M_sr = build_canonical_pvm(sigma, rho, tol)
    U = construct_polar_unitary(rho, sigma, tol)
    report = DichotomyReport(
        weak_commutativity=weakly_commute(rho, sigma),
        commuting_flag=commuting_povms(M_rs, M_sr, tol),
        compatible_flag=bool(compatible(M_rs, M_sr, tol)),
        equivalent_flag=equivalent(M_rs, M_sr, tol),
        unique_minimal=merge_matching(M_rs, M_sr, rho, sigma, U, tol),
        M_rho_sigma=M_rs,
        M_sigma_rho=M_sr,
    )
    if not report.consistent:
        warnings.warn(f"dichotomy statements disagree: {report.statements()}",
                      OptimalityDiagnosticWarning, stacklevel=2)
    return report


def merge_by_eigenspace(elements: Sequence[np.ndarray], labels: Sequence[str], rho, sigma,
                        U, tol: ToleranceConfig) -> Povm:
    """Greedily merge elements whose sum stays parallel (same pencil eigenspace)."""
    sums: list[np.ndarray] = []
    names: list[list[str]] = []
    for lab, X in zip(labels, elements):
        if la.fro(X) <= tol.opt_tol:
            continue
        for g in range(len(sums)):
            if parallel_check(sums[g] + X, rho, sigma, U, tol).verdict:
                sums[g] = sums[g] + X
                names[g].append(lab)
                break
        else:
            sums.append(np.array(X, dtype=complex))
            names.append([lab])
    return Povm.from_elements(sums, ["+".join(n) for n in names], tol)


def mixing_family(E1: Povm, E2: Povm, p: float, rho, sigma,
                  tol: ToleranceConfig | None = None) -> Povm:
    """Minimal F-optimal coarse graining of ``p E1 ⊔ (1 - p) E2``.

    Raises
    ------
    InvalidPovmError
        If ``p`` is outside ``[0, 1]`` or either input is not minimal F-optimal.
    """
    tol = resolve(tol)
    if not 0.0 <= p <= 1.0:
        raise InvalidPovmError(f"mixing weight {p} outside [0, 1]", "probability")
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    U = construct_polar_unitary(rho, sigma, tol, allow_singular_sum=True)
    for name, E in (("first", E1), ("second", E2)):
        v = verify_f_optimal(E, rho, sigma, tol, U)
        if not v.is_minimal:
            raise InvalidPovmError(f"{name} POVM is not minimal F-optimal", "f-optimal-minimal")
    elements = [p * X for X in E1.elements] + [(1.0 - p) * X for X in E2.elements]
    labels = [f"1:{lab}" for lab in E1.labels] + [f"2:{lab}" for lab in E2.labels]
    return merge_by_eigenspace(elements, labels, rho, sigma, U, tol)


@dataclass(frozen=True)
class Restriction:
    """Isometric restriction to ``supp(rho + sigma)``.

    ``basis`` has orthonormal columns spanning the support; ``gamma0`` projects
    onto ``Null(rho + sigma)``.
    """

    basis: np.ndarray
    gamma0: np.ndarray
    rho: DensityOperator
    sigma: DensityOperator

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def compress(self, X: np.ndarray) -> np.ndarray:
        return la.dagger(self.basis) @ X @ self.basis

    def embed(self, X: np.ndarray) -> np.ndarray:
        return self.basis @ X @ la.dagger(self.basis)

    def extend(self, C: Povm, weights: Sequence[float] | None = None) -> Povm:
        """``{C_j + a_j Gamma_0}`` on the full space; weights default to uniform."""
        n = len(C)
        a = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
        if a.shape != (n,) or np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise InvalidPovmError("extension weights must be a probability vector",
                                   "probability")
        els = [self.embed(X) + w * self.gamma0 for X, w in zip(C.elements, a)]
        return Povm.from_elements(els, C.labels, C.tol)


def restrict_to_joint_support(E: Povm, rho, sigma, tol: ToleranceConfig | None = None
                              ) -> tuple[Povm, Restriction]:
    """Compress ``E`` and both states onto ``supp(rho + sigma)``."""
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    d = rho.dim
    if is_sum_singular(rho, sigma, tol):
        Q = la.support_basis(rho.matrix + sigma.matrix, tol)
    else:
        Q = np.eye(d, dtype=complex)
    gamma0 = np.eye(d) - Q @ la.dagger(Q)
    r = as_density(la.hermitianize(la.dagger(Q) @ rho.matrix @ Q), tol)
    s = as_density(la.hermitianize(la.dagger(Q) @ sigma.matrix @ Q), tol)
    restriction = Restriction(Q, gamma0, r, s)
    E_r = Povm.from_elements([restriction.compress(X) for X in E.elements], E.labels, tol)
    return E_r, restriction
