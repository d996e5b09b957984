"""Monte-Carlo estimation of induced Bhattacharyya coefficient and total variation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .divergences import bhattacharyya, total_variation
from .instances import PRNG, rng_for
from .states import Povm, measure

SE_FACTOR = 5.0
ABS_FLOOR = 1e-9

CSV_HEADER = ("shots", "seed", "prng", "bc_hat", "se_bc", "fidelity_hat", "se_fidelity",
              "tv_hat", "se_tv", "bc_exact", "tv_exact")


@dataclass(frozen=True)
class SampleReport:
    """Empirical estimates from ``shots`` draws under each state.

    Standard errors come from the delta method with plug-in frequencies.
    """

    shots: int
    seed: int
    bc_hat: float
    se_bc: float
    tv_hat: float
    se_tv: float
    bc_exact: float
    tv_exact: float

    @property
    def fidelity_hat(self) -> float:
        return self.bc_hat ** 2

    @property
    def se_fidelity(self) -> float:
        return 2.0 * self.bc_hat * self.se_bc

    def bc_within(self, target: float, k: float = SE_FACTOR) -> bool:
        return abs(self.bc_hat - target) <= max(k * self.se_bc, ABS_FLOOR)

    def tv_within(self, target: float, k: float = SE_FACTOR) -> bool:
        return abs(self.tv_hat - target) <= max(k * self.se_tv, ABS_FLOOR)

    def csv_row(self) -> tuple:
        return (self.shots, self.seed, PRNG, self.bc_hat, self.se_bc, self.fidelity_hat,
                self.se_fidelity, self.tv_hat, self.se_tv, self.bc_exact, self.tv_exact)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(fidelity_hat=self.fidelity_hat, se_fidelity=self.se_fidelity, prng=PRNG)
        return d


def bc_standard_error(p: np.ndarray, q: np.ndarray, n_p: int, n_q: int) -> float:
    """Delta-method standard error of ``sum sqrt(p q)`` from two multinomial samples."""
    bc = float(np.sum(np.sqrt(p * q)))
    q_on_p = float(q[p > 0].sum())
    p_on_q = float(p[q > 0].sum())
    var = max(q_on_p - bc ** 2, 0.0) / (4 * n_p) + max(p_on_q - bc ** 2, 0.0) / (4 * n_q)
    return float(np.sqrt(var))


def tv_standard_error(p: np.ndarray, q: np.ndarray, n_p: int, n_q: int) -> float:
    """Delta-method standard error of ``sum |p - q| / 2``."""
    s = np.sign(p - q) / 2
    var_p = (np.sum(p * s ** 2) - np.sum(p * s) ** 2) / n_p
    var_q = (np.sum(q * s ** 2) - np.sum(q * s) ** 2) / n_q
    return float(np.sqrt(max(var_p, 0.0) + max(var_q, 0.0)))


def sample_counts(p: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    return rng.multinomial(shots, p / p.sum())


def sample_report(E: Povm, rho, sigma, shots: int, seed: int) -> SampleReport:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p = measure(E, rho).probabilities
    q = measure(E, sigma).probabilities
    rng = rng_for(seed)
    ph = sample_counts(p, shots, rng) / shots
    qh = sample_counts(q, shots, rng) / shots
    return SampleReport(
        shots=shots, seed=seed,
        bc_hat=bhattacharyya(ph, qh), se_bc=bc_standard_error(ph, qh, shots, shots),
        tv_hat=total_variation(ph, qh), se_tv=tv_standard_error(ph, qh, shots, shots),
        bc_exact=bhattacharyya(p, q), tv_exact=total_variation(p, q))
