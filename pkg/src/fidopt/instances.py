"""Seeded random instances: state pairs, POVMs and stochastic maps.

All randomness flows through ``numpy.random.Generator`` with the PCG64 bit
generator, so the same seed gives bit-identical matrices.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import unitary_group

from . import linalg as la
from .errors import FidoptError

PRNG = "PCG64"
STRUCTURES = ("generic", "commuting-supports", "commuting-states", "pure-sigma", "singular-sum")


class InfeasibleSpecError(FidoptError):
    invariant = "instance-spec"


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(d, random_state=rng)


def random_spectrum(r: int, rng: np.random.Generator) -> np.ndarray:
    """``r`` eigenvalues bounded away from zero, normalized to sum one."""
    w = 0.2 + rng.random(r)
    return w / w.sum()


def state_on(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state on ``span(basis)``, embedded in the ambient space."""
    r = basis.shape[1]
    V = basis @ haar_unitary(r, rng)
    return la.hermitianize((V * random_spectrum(r, rng)) @ la.dagger(V))


def random_state(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    return state_on(haar_unitary(d, rng)[:, :rank], rng)


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for a random pair ``(rho, sigma)``.

    ``structure`` is one of ``generic``, ``commuting-supports`` (support
    projectors commute, the states in general do not), ``commuting-states``,
    ``pure-sigma`` and ``singular-sum``.
    """

    dim: int
    rank_rho: int
    rank_sigma: int
    seed: int = 0
    structure: str = "generic"

    def __post_init__(self):
        if self.dim < 1:
            raise InfeasibleSpecError("dim must be positive")
        for name in ("rank_rho", "rank_sigma"):
            r = getattr(self, name)
            if not 1 <= r <= self.dim:
                raise InfeasibleSpecError(f"{name}={r} outside [1, {self.dim}]")
        if self.structure not in STRUCTURES:
            raise InfeasibleSpecError(f"unknown structure {self.structure!r}")
        s, d, rr, rs = self.structure, self.dim, self.rank_rho, self.rank_sigma
        if s in ("commuting-supports", "commuting-states") and rr + rs < d:
            raise InfeasibleSpecError(f"{s} needs rank_rho + rank_sigma >= dim")
        if s == "pure-sigma" and (rs != 1 or rr < d - 1):
            raise InfeasibleSpecError("pure-sigma needs rank_sigma = 1 and rank_rho >= dim - 1")
        if s == "singular-sum" and (d < 3 or max(rr, rs) > d - 1):
            # for d = 2 a singular sum forces rho = sigma
            raise InfeasibleSpecError("singular-sum needs dim >= 3 and both ranks <= dim - 1")

    def to_dict(self) -> dict:
        return asdict(self)

    def generate(self) -> tuple[np.ndarray, np.ndarray]:
        return generate_pair(self)


def generate_pair(spec: InstanceSpec) -> tuple[np.ndarray, np.ndarray]:
    rng = rng_for(spec.seed)
    d, rr, rs = spec.dim, spec.rank_rho, spec.rank_sigma
    W = haar_unitary(d, rng)
    if spec.structure in ("generic", "pure-sigma"):
        return state_on(W[:, :rr], rng), state_on(haar_unitary(d, rng)[:, :rs], rng)
    if spec.structure == "commuting-supports":
        both = rr + rs - d
        only_r = rr - both
        # columns: [supp rho only | intersection | supp sigma only]
        rho = state_on(W[:, :rr], rng)
        sigma = state_on(W[:, only_r:only_r + rs], rng)
        return rho, sigma
    if spec.structure == "commuting-states":
        p = np.zeros(d)
        q = np.zeros(d)
        p[:rr] = random_spectrum(rr, rng)
        q[d - rs:] = random_spectrum(rs, rng)
        return (la.hermitianize((W * p) @ la.dagger(W)),
                la.hermitianize((W * q) @ la.dagger(W)))
    # singular-sum: both states live in a proper subspace of dimension k
    k = min(rr + rs, d - 1)
    S = W[:, :k]
    rho = state_on(S @ haar_unitary(k, rng)[:, :rr], rng)
    sigma = state_on(S @ haar_unitary(k, rng)[:, :rs], rng)
    return rho, sigma


def singular_difference_pair(d: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Pair with ``rho - sigma`` singular: ``rho = (tau + a)/2``, ``sigma = (tau + b)/2``.

    ``a`` and ``b`` share a ``(d-1)``-dimensional support, so the difference
    vanishes on its orthogonal complement.
    """
    if d < 3:
        raise InfeasibleSpecError("a singular difference with distinct states needs d >= 3")
    tau = random_state(d, d, rng)
    S = haar_unitary(d, rng)[:, : d - 1]
    a = state_on(S, rng)
    b = state_on(S, rng)
    return (tau + a) / 2, (tau + b) / 2


def random_povm_elements(d: int, k: int, rng: np.random.Generator,
                         rank: int | None = None) -> np.ndarray:
    """``k`` random POVM elements ``S^{-1/2} G G^dag S^{-1/2}`` from Ginibre ``G``."""
    r = d if rank is None else rank
    G = rng.standard_normal((k, d, r)) + 1j * rng.standard_normal((k, d, r))
    X = G @ np.conj(np.transpose(G, (0, 2, 1)))
    Sm = la.psd_power(X.sum(axis=0), -0.5)
    return np.array([la.hermitianize(Sm @ x @ Sm) for x in X])


def random_pvm_elements(d: int, rng: np.random.Generator, k: int | None = None) -> np.ndarray:
    """Projectors onto ``k`` blocks of a Haar-random basis (rank-one when ``k = d``)."""
    k = d if k is None else k
    W = haar_unitary(d, rng)
    cuts = np.sort(rng.choice(np.arange(1, d), size=k - 1, replace=False)) if k > 1 else []
    blocks = np.split(np.arange(d), cuts)
    return np.array([W[:, b] @ la.dagger(W[:, b]) for b in blocks])


def random_stochastic(k_out: int, k_in: int, rng: np.random.Generator) -> np.ndarray:
    """Column-stochastic ``k_out x k_in`` matrix with Dirichlet columns."""
    S = rng.dirichlet(np.ones(k_out), size=k_in).T
    return S / S.sum(axis=0, keepdims=True)
