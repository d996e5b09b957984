"""Density operators, POVMs, coarse graining and outcome distributions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import linalg as la
from .config import ToleranceConfig, resolve
from .errors import DimensionError, InvalidPovmError, InvalidStateError, NotPSDError

TRACE_ATOL = 1e-10
PVM_ATOL = 1e-9
STOCHASTIC_ATOL = 1e-12
NEGATIVE_PROB_ATOL = 1e-12


def probability_floor(dim: int) -> float:
    """Probabilities at or below this are round-off and are snapped to zero."""
    return 16 * dim * float(np.finfo(float).eps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive unit-trace operator with lazily cached spectral data."""

    matrix: np.ndarray
    tol: ToleranceConfig = field(default=None, repr=False)

    def __post_init__(self):
        tol = resolve(self.tol)
        object.__setattr__(self, "tol", tol)
        M = la.as_matrix(self.matrix)
        try:
            M = la.check_hermitian(M)
        except la.NotHermitianError as exc:
            raise InvalidStateError(str(exc), "hermitian") from None
        tr = np.trace(M).real
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvalidStateError(f"trace is {tr:.12g}, expected 1", "unit-trace")
        w = np.linalg.eigvalsh(M)
        if w[0] < -tol.psd_clip:
            raise InvalidStateError(f"min eigenvalue {w[0]:.3e} is negative",
                                    "positive-semidefinite")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> la.HermitianEigensystem:
        return la.hermitian_eig(self.matrix)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return la.psd_sqrt(self.matrix, self.tol)

    @cached_property
    def pinv(self) -> np.ndarray:
        return la.psd_power(self.matrix, -1.0, self.tol)

    @cached_property
    def support(self) -> np.ndarray:
        return la.support_projector(self.matrix, self.tol)

    @cached_property
    def support_basis(self) -> np.ndarray:
        return la.support_basis(self.matrix, self.tol)

    @cached_property
    def null_basis(self) -> np.ndarray:
        return la.null_basis_psd(self.matrix, self.tol)

    @property
    def null_projector(self) -> np.ndarray:
        return np.eye(self.dim) - self.support

    @property
    def rank(self) -> int:
        return self.support_basis.shape[1]

    @property
    def is_pure(self) -> bool:
        return self.rank == 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_density(x, tol: ToleranceConfig | None = None) -> DensityOperator:
    if isinstance(x, DensityOperator):
        return x
    return DensityOperator(np.asarray(x, dtype=complex), resolve(tol))


def pure_state(vec) -> DensityOperator:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()))


def check_same_dim(*states: DensityOperator) -> int:
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite list of labeled positive operators summing to the identity.

    ``is_pvm`` is detected on construction: all elements are projectors and
    mutually orthogonal within ``1e-9``.
    """

    labels: tuple[str, ...]
    elements: tuple[np.ndarray, ...]
    tol: ToleranceConfig = field(default=None, repr=False)
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        tol = resolve(self.tol)
        object.__setattr__(self, "tol", tol)
        if len(self.labels) != len(self.elements):
            raise InvalidPovmError("labels and elements differ in length")
        if not self.elements:
            raise InvalidPovmError("a POVM needs at least one element")
        els = []
        for E in self.elements:
            E = la.as_matrix(E)
            if not la.is_hermitian(E):
                raise InvalidPovmError("POVM element is not Hermitian", "hermitian")
            els.append(la.hermitianize(E))
        dims = {E.shape[0] for E in els}
        if len(dims) != 1:
            raise DimensionError(f"POVM elements have mixed dimensions {sorted(dims)}")
        for E in els:
            E.setflags(write=False)
        object.__setattr__(self, "elements", tuple(els))
        object.__setattr__(self, "labels", tuple(str(lab) for lab in self.labels))
        if self.validate:
            self._validate()

    def _validate(self):
        tol = self.tol
        for lab, E in zip(self.labels, self.elements):
            w = np.linalg.eigvalsh(E)
            if w[0] < -tol.psd_clip:
                raise InvalidPovmError(
                    f"element {lab!r} has negative eigenvalue {w[0]:.3e}",
                    "positive-semidefinite")
        dev = la.fro(sum(self.elements) - np.eye(self.dim))
        if dev > max(tol.opt_tol, 1e-9):
            raise InvalidPovmError(f"elements sum to identity only within {dev:.3e}",
                                   "completeness")

    @classmethod
    def from_elements(cls, elements: Iterable, labels: Sequence[str] | None = None,
                      tol: ToleranceConfig | None = None, validate: bool = True) -> "Povm":
        elements = [np.asarray(E, dtype=complex) for E in elements]
        if labels is None:
            labels = [f"E{i}" for i in range(len(elements))]
        return cls(tuple(labels), tuple(elements), tol, validate)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.labels, self.elements))

    @cached_property
    def is_pvm(self) -> bool:
        for i, E in enumerate(self.elements):
            if la.fro(E @ E - E) > PVM_ATOL:
                return False
            for F in self.elements[i + 1:]:
                if la.fro(E @ F) > PVM_ATOL:
                    return False
        return True

    def relabeled(self, labels: Sequence[str]) -> "Povm":
        return Povm(tuple(labels), self.elements, self.tol, validate=False)

    def permuted(self, order: Sequence[int]) -> "Povm":
        return Povm(tuple(self.labels[i] for i in order),
                    tuple(self.elements[i] for i in order), self.tol, validate=False)

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)


@dataclass(frozen=True)
class OutcomeDistribution:
    labels: tuple[str, ...]
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or len(p) != len(self.labels):
            raise DimensionError("probabilities and labels differ in length")
        object.__setattr__(self, "probabilities", p)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probabilities.tolist()))


@dataclass(frozen=True)
class CoarseGrainingMap:
    """Stochastic matrix ``S``; rows index coarse outcomes, columns fine ones.

    Every column sums to one, so ``A_j = sum_k S[j, k] B_k`` is again a POVM.
    """

    matrix: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        if S.ndim != 2:
            raise DimensionError("coarse-graining matrix must be 2-d")
        if np.any(S < 0):
            raise InvalidPovmError("coarse-graining matrix has negative entries",
                                   "stochastic")
        if np.max(np.abs(S.sum(axis=0) - 1.0)) > STOCHASTIC_ATOL:
            raise InvalidPovmError("coarse-graining matrix columns must sum to 1",
                                   "stochastic")
        object.__setattr__(self, "matrix", S)

    @classmethod
    def merge(cls, groups: Sequence[Sequence[int]], n_fine: int) -> "CoarseGrainingMap":
        S = np.zeros((len(groups), n_fine))
        for j, g in enumerate(groups):
            S[j, list(g)] = 1.0
        return cls(S)


def measure(E: Povm, rho) -> OutcomeDistribution:
    """Outcome distribution ``p_m = Re tr(E_m rho)``.

    Values within round-off of zero (including small negatives) are snapped to
    zero; a negative value beyond ``1e-12`` means the inputs are inconsistent.
    """
    rho = as_density(rho, E.tol)
    if rho.dim != E.dim:
        raise DimensionError(f"POVM acts on dimension {E.dim}, state on {rho.dim}")
    p = np.einsum("mij,ji->m", E.stacked(), rho.matrix).real
    if np.any(p < -NEGATIVE_PROB_ATOL):
        raise NotPSDError(f"negative outcome probability {p.min():.3e}")
    p[p <= probability_floor(E.dim)] = 0.0
    return OutcomeDistribution(E.labels, p)


def coarse_grain(E: Povm, S: CoarseGrainingMap | np.ndarray,
                 labels: Sequence[str] | None = None) -> Povm:
    if not isinstance(S, CoarseGrainingMap):
        S = CoarseGrainingMap(S)
    M = S.matrix
    if M.shape[1] != len(E):
        raise DimensionError(f"coarse graining expects {M.shape[1]} outcomes, POVM has {len(E)}")
    new = np.einsum("jk,kab->jab", M, E.stacked())
    if labels is None:
        labels = ["+".join(E.labels[k] for k in np.nonzero(row)[0]) or f"C{j}"
                  for j, row in enumerate(M)]
    return Povm.from_elements(new, labels, E.tol)


def _proportional(Ei: np.ndarray, Ej: np.ndarray, rtol: float) -> bool:
    nj = np.vdot(Ej, Ej).real
    if nj == 0.0:
        return False
    c = np.vdot(Ej, Ei).real / nj
    if c < 0:
        return False
    return la.fro(Ei - c * Ej) <= rtol * la.fro(Ei)


def simplify(E: Povm, tol: ToleranceConfig | None = None) -> Povm:
    """Drop zero elements and merge mutually proportional ones.

    Merged elements carry labels joined with ``"+"``.
    """
    tol = resolve(tol if tol is not None else E.tol)
    labels: list[list[str]] = []
    reps: list[np.ndarray] = []
    sums: list[np.ndarray] = []
    for lab, X in E:
        if la.fro(X) <= tol.opt_tol:
            continue
        for g, R in enumerate(reps):
            if _proportional(X, R, tol.opt_tol):
                sums[g] = sums[g] + X
                labels[g].append(lab)
                break
        else:
            reps.append(X)
            sums.append(X.copy())
            labels.append([lab])
    return Povm.from_elements(sums, ["+".join(g) for g in labels], E.tol, validate=False)


def is_simple(E: Povm, tol: ToleranceConfig | None = None) -> bool:
    return len(simplify(E, tol)) == len(E)


def equivalent(E1: Povm, E2: Povm, tol: ToleranceConfig | None = None) -> bool:
    """Two POVMs are equivalent iff their simplifications agree up to relabeling.

    The element matching is an optimal assignment on Frobenius distances,
    accepted when every matched pair is within ``equiv_tol``.
    """
    tol = resolve(tol if tol is not None else E1.tol)
    if E1.dim != E2.dim:
        return False
    A, B = simplify(E1, tol).elements, simplify(E2, tol).elements
    if len(A) != len(B):
        return False
    cost = np.array([[la.fro(a - b) for b in B] for a in A])
    rows, cols = linear_sum_assignment(cost)
    return bool(np.all(cost[rows, cols] <= tol.equiv_tol))


def commuting_povms(E1: Povm, E2: Povm, tol: ToleranceConfig | None = None) -> bool:
    tol = resolve(tol if tol is not None else E1.tol)
    return all(la.commutator_norm(A, B) <= tol.opt_tol
               for A in E1.elements for B in E2.elements)


def compatible(E1: Povm, E2: Povm, tol: ToleranceConfig | None = None) -> bool | None:
    """Joint measurability, decided only where commutation settles it.

    Commuting POVMs are always compatible. For two PVMs compatibility is
    equivalent to commutation. Otherwise the answer is ``None`` (undecided).
    """
    if commuting_povms(E1, E2, tol):
        return True
    if E1.is_pvm and E2.is_pvm:
        return False
    return None


def embed(E: Povm, basis: np.ndarray, extra: Sequence[tuple[str, np.ndarray]] = ()) -> Povm:
    """Map a POVM on ``span(basis)`` into the full space and append ``extra``."""
    B = np.asarray(basis)
    els = [B @ X @ la.dagger(B) for X in E.elements]
    labels = list(E.labels)
    for lab, X in extra:
        els.append(X)
        labels.append(lab)
    return Povm.from_elements(els, labels, E.tol)


def compress(E: Povm, basis: np.ndarray, drop_zero: bool = True) -> Povm:
    """Compress ``E`` onto ``span(basis)``: ``E_m -> B^dag E_m B``."""
    B = np.asarray(basis)
    pairs = [(lab, la.dagger(B) @ X @ B) for lab, X in E]
    if drop_zero:
        pairs = [(lab, X) for lab, X in pairs if la.fro(X) > E.tol.opt_tol]
    return Povm.from_elements([X for _, X in pairs], [lab for lab, _ in pairs], E.tol)
