"""Seeded instance corpora shared by the test modules."""

from __future__ import annotations

import numpy as np

from fidopt.instances import InstanceSpec, rng_for
from fidopt.optimal import restrict_to_joint_support
from fidopt.states import DensityOperator, Povm

MAX_DIM = 6


def feasible_ranks(structure: str, d: int) -> list[tuple[int, int]]:
    """Rank pairs giving a nonsingular ``rho + sigma`` (after restriction for singular sums)."""
    if structure == "pure-sigma":
        return [(r, 1) for r in range(max(d - 1, 1), d + 1)]
    if structure == "singular-sum":
        return [(a, b) for a in range(1, d) for b in range(1, d)] if d >= 3 else []
    return [(a, b) for a in range(1, d + 1) for b in range(1, d + 1) if a + b >= d]


def spec_stream(structure: str, n: int, seed: int = 0, dims=range(2, MAX_DIM + 1)):
    """``n`` specs cycling through dimensions and all feasible rank pairs."""
    rng = rng_for(seed)
    combos = [(d, a, b) for d in dims for a, b in feasible_ranks(structure, d)]
    for i in range(n):
        d, a, b = combos[i % len(combos)]
        yield InstanceSpec(d, a, b, int(rng.integers(2 ** 32)), structure)


def nonsingular_pair(spec: InstanceSpec) -> tuple[DensityOperator, DensityOperator]:
    """The generated pair, restricted to ``supp(rho + sigma)`` for singular sums."""
    rho, sigma = spec.generate()
    if spec.structure != "singular-sum":
        return DensityOperator(rho), DensityOperator(sigma)
    d = spec.dim
    _, R = restrict_to_joint_support(Povm.from_elements([np.eye(d)], ["I"]), rho, sigma)
    return R.rho, R.sigma
