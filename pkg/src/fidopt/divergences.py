"""Classical and quantum fidelity and trace distance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimensionError
from .states import DensityOperator, OutcomeDistribution, Povm, as_density, check_same_dim, measure


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, OutcomeDistribution) and isinstance(q, OutcomeDistribution):
        if p.labels != q.labels:
            raise DimensionError("outcome labels differ")
        p, q = p.probabilities, q.probabilities
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    q = np.clip(np.asarray(q, dtype=float), 0.0, None)
    if p.shape != q.shape:
        raise DimensionError(f"distributions have shapes {p.shape} and {q.shape}")
    return p, q


def bhattacharyya(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.sum(np.sqrt(p * q)))


def classical_fidelity(p, q) -> float:
    """Squared Bhattacharyya coefficient ``(sum_m sqrt(p_m q_m))**2``."""
    return bhattacharyya(p, q) ** 2


def total_variation(p, q) -> float:
    p, q = _pair(p, q)
    return 0.5 * float(np.sum(np.abs(p - q)))


def fidelity(rho, sigma) -> float:
    """Quantum fidelity, the squared nuclear norm of ``sqrt(rho) sqrt(sigma)``.

    Symmetric in its arguments up to round-off, because ``sqrt(rho) sqrt(sigma)``
    and its adjoint share singular values.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    check_same_dim(rho, sigma)
    s = np.linalg.svd(rho.sqrt @ sigma.sqrt, compute_uv=False)
    return float(np.clip(np.sum(s) ** 2, 0.0, 1.0))


def trace_distance(rho, sigma) -> float:
    rho, sigma = as_density(rho), as_density(sigma)
    check_same_dim(rho, sigma)
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(np.clip(0.5 * np.sum(np.abs(w)), 0.0, 1.0))


def induced_fidelity(E: Povm, rho, sigma) -> float:
    return classical_fidelity(measure(E, rho), measure(E, sigma))


def induced_trace_distance(E: Povm, rho, sigma) -> float:
    return total_variation(measure(E, rho), measure(E, sigma))


def fvdg_bounds(F: float) -> tuple[float, float]:
    """Fuchs-van de Graaf interval ``1 - sqrt(F) <= D <= sqrt(1 - F)``."""
    F = min(max(F, 0.0), 1.0)
    return 1.0 - np.sqrt(F), float(np.sqrt(1.0 - F))


def helstrom_success(rho, sigma) -> float:
    """Best success probability for equiprobable binary discrimination."""
    return 0.5 * (1.0 + trace_distance(rho, sigma))


@dataclass(frozen=True)
class DivergenceReport:
    F: float
    D: float
    fvdg_lower: float
    fvdg_upper: float
    induced: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"F": self.F, "D": self.D, "fvdg_lower": self.fvdg_lower,
                "fvdg_upper": self.fvdg_upper, "measurements": self.induced}


def divergence_report(rho: DensityOperator, sigma: DensityOperator,
                      povms: Mapping[str, Povm] | None = None) -> DivergenceReport:
    F = fidelity(rho, sigma)
    D = trace_distance(rho, sigma)
    lo, hi = fvdg_bounds(F)
    induced = {}
    for name, E in (povms or {}).items():
        induced[name] = {"F_E": induced_fidelity(E, rho, sigma),
                         "D_E": induced_trace_distance(E, rho, sigma)}
    return DivergenceReport(F, D, float(lo), hi, induced)
