"""Brute-force bounds on the induced fidelity and trace distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .divergences import fidelity, trace_distance
from .errors import DimensionError
from .instances import random_povm_elements, rng_for
from .pure import to_bloch
from .states import as_density


@dataclass(frozen=True)
class OracleReport:
    mode: str
    best_fidelity: float
    best_trace_distance: float
    F: float
    D: float

    @property
    def fidelity_gap(self) -> float:
        return self.best_fidelity - self.F

    @property
    def trace_gap(self) -> float:
        return self.D - self.best_trace_distance

    def to_dict(self) -> dict:
        return {"mode": self.mode, "min_induced_fidelity": self.best_fidelity,
                "max_induced_trace_distance": self.best_trace_distance,
                "F": self.F, "D": self.D, "fidelity_gap": self.fidelity_gap,
                "trace_gap": self.trace_gap, "backend": _kernels.backend()}


def grid_directions(n: int) -> np.ndarray:
    """Unit vectors of the ``n x n`` angle grid, shape ``(n, n, 3)``."""
    t = np.pi * np.arange(n) / (n - 1)
    f = 2 * np.pi * np.arange(n) / n
    st = np.sin(t)[:, None]
    return np.stack([st * np.cos(f)[None, :], st * np.sin(f)[None, :],
                     np.cos(t)[:, None] * np.ones((1, n))], axis=-1)


@dataclass(frozen=True)
class QubitGrid:
    """Induced fidelity ``F`` and total variation ``T`` on the direction grid."""

    n: int
    F: np.ndarray
    T: np.ndarray

    def directions(self) -> np.ndarray:
        return grid_directions(self.n)

    def near_optimal(self, target: float, atol: float) -> np.ndarray:
        """Directions whose PVM ``{u, -u}`` reaches ``F <= target + atol``."""
        return self.directions()[self.F <= target + atol]


def qubit_grid(rho, sigma, n: int) -> QubitGrid:
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != 2 or sigma.dim != 2:
        raise DimensionError("the qubit grid oracle needs d = 2")
    F, T = _kernels.qubit_grid(to_bloch(rho), to_bloch(sigma), n)
    return QubitGrid(n, F, T)


def qubit_grid_oracle(rho, sigma, n: int) -> OracleReport:
    g = qubit_grid(rho, sigma, n)
    return OracleReport(f"qubit-grid:{n}", float(g.F.min()), float(g.T.max()),
                        fidelity(rho, sigma), trace_distance(rho, sigma))


def random_povm_oracle(rho, sigma, k: int, seed: int = 0) -> OracleReport:
    """Best induced values over ``k`` random POVMs with 2 to ``2d`` outcomes."""
    rho, sigma = as_density(rho), as_density(sigma)
    d = rho.dim
    rng = rng_for(seed)
    states = np.stack([rho.matrix, sigma.matrix])
    best_f, best_t = 1.0, 0.0
    for _ in range(k):
        m = int(rng.integers(2, 2 * d + 1))
        P = _kernels.probabilities(random_povm_elements(d, m, rng), states)
        P = np.clip(P, 0.0, None)
        best_f = min(best_f, float(_kernels.bc_rows(P[:1], P[1:])[0] ** 2))
        best_t = max(best_t, float(_kernels.tv_rows(P[:1], P[1:])[0]))
    return OracleReport(f"random-povm:{k}", best_f, best_t,
                        fidelity(rho, sigma), trace_distance(rho, sigma))
