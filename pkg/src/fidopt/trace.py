"""Measurements that are optimal for the trace distance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .config import ToleranceConfig, resolve
from .divergences import induced_trace_distance, trace_distance
from .errors import IdenticalStatesError, InvalidPovmError, OptimalityDiagnosticWarning
from .states import Povm, as_density, check_same_dim

GAP_FACTOR = 10.0


@dataclass(frozen=True)
class JordanSplit:
    """``rho - sigma = Q_plus - Q_minus`` with orthogonal positive parts.

    ``P_plus``, ``P_minus`` and ``P_zero`` project onto the positive, negative
    and zero eigenspaces of ``rho - sigma`` and sum to the identity.
    """

    Q_plus: np.ndarray
    Q_minus: np.ndarray
    P_plus: np.ndarray
    P_minus: np.ndarray
    P_zero: np.ndarray


def jordan_split(rho, sigma, tol: ToleranceConfig | None = None) -> JordanSplit:
    """Eigendecomposition of ``rho - sigma`` grouped by sign.

    Eigenvalues with magnitude at most ``rank_tol_factor * max|eig|`` form the
    zero band.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    check_same_dim(rho, sigma)
    w, V = la.hermitian_eig(rho.matrix - sigma.matrix)
    top = np.max(np.abs(w))
    if top <= tol.opt_tol:
        raise IdenticalStatesError("states must be distinct")
    cut = la.rank_threshold(top, len(w), tol)
    pos, neg = w > cut, w < -cut
    zero = ~(pos | neg)

    def proj(mask):
        B = V[:, mask]
        return B @ la.dagger(B)

    Qp = (V[:, pos] * w[pos]) @ la.dagger(V[:, pos])
    Qm = -(V[:, neg] * w[neg]) @ la.dagger(V[:, neg])
    return JordanSplit(Qp, Qm, proj(pos), proj(neg), proj(zero))


@dataclass(frozen=True)
class TraceVerdict:
    is_t_optimal: bool
    structural: bool
    D: float
    D_E: float
    element_sides: list[str | None]  # "plus-null", "minus-null", or None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.D - self.D_E

    def to_dict(self) -> dict:
        return {"criterion": "trace", "is_t_optimal": self.is_t_optimal,
                "structural": self.structural, "D": self.D, "D_E": self.D_E,
                "gap": self.gap, "element_sides": list(self.element_sides),
                "diagnostics": list(self.diagnostics)}


def verify_t_optimal(E: Povm, rho, sigma, tol: ToleranceConfig | None = None) -> TraceVerdict:
    """Each element must be supported in ``Null(Q_plus)`` or in ``Null(Q_minus)``.

    The test is ``|Q_plus E| <= opt_tol |Q_plus| |E|`` (or the same with
    ``Q_minus``), cross-checked against ``|D_E - D| <= 10 opt_tol``.
    """
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    js = jordan_split(rho, sigma, tol)
    nP, nM = la.fro(js.Q_plus), la.fro(js.Q_minus)
    sides = []
    for X in E.elements:
        nX = la.fro(X)
        if la.fro(js.Q_plus @ X) <= tol.opt_tol * nP * nX:
            sides.append("plus-null")
        elif la.fro(js.Q_minus @ X) <= tol.opt_tol * nM * nX:
            sides.append("minus-null")
        else:
            sides.append(None)
    structural = all(s is not None for s in sides)
    D = trace_distance(rho, sigma)
    D_E = induced_trace_distance(E, rho, sigma)
    gap_ok = abs(D - D_E) <= GAP_FACTOR * tol.opt_tol
    diagnostics = []
    if structural and not gap_ok:
        msg = f"support test passes but D - D_E = {D - D_E:.3e}; reporting not optimal"
        diagnostics.append(msg)
        warnings.warn(msg, OptimalityDiagnosticWarning, stacklevel=2)
    elif not structural and gap_ok:
        diagnostics.append(f"support test fails although D - D_E = {D - D_E:.3e}")
    return TraceVerdict(structural and gap_ok, structural, D, D_E, sides, diagnostics)


def check_q0(Q0: np.ndarray, js: JordanSplit, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Validate ``0 <= Q0 <= P_zero`` (which also puts ``Q0`` inside ``Null(rho - sigma)``)."""
    tol = resolve(tol)
    Q0 = la.check_hermitian(Q0)
    if np.linalg.eigvalsh(Q0)[0] < -tol.psd_clip:
        raise InvalidPovmError("Q0 is not positive semidefinite", "q0-positive")
    if la.fro(Q0 - js.P_zero @ Q0 @ js.P_zero) > tol.opt_tol * (1.0 + la.fro(Q0)):
        raise InvalidPovmError("Q0 is not supported in Null(rho - sigma)", "q0-support")
    if np.linalg.eigvalsh(js.P_zero - Q0)[0] < -tol.psd_clip:
        raise InvalidPovmError("Q0 exceeds the zero-eigenspace projector", "q0-interval")
    return Q0


def minimal_t_optimal(rho, sigma, Q0: np.ndarray | None = None,
                      tol: ToleranceConfig | None = None) -> Povm:
    """Binary POVM ``{P_plus + Q0, 1 - P_plus - Q0}``; ``Q0 = 0`` by default."""
    tol = resolve(tol)
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    js = jordan_split(rho, sigma, tol)
    d = rho.dim
    Q0 = np.zeros((d, d), dtype=complex) if Q0 is None else check_q0(Q0, js, tol)
    first = js.P_plus + Q0
    return Povm.from_elements([first, np.eye(d) - first], ["plus", "minus"], tol)


def q0_family(rho, sigma, lambdas, tol: ToleranceConfig | None = None) -> list[Povm]:
    """``minimal_t_optimal`` with ``Q0 = lam P_zero`` for each ``lam`` in ``[0, 1]``."""
    js = jordan_split(rho, sigma, tol)
    return [minimal_t_optimal(rho, sigma, lam * js.P_zero, tol) for lam in lambdas]
