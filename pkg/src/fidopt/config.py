"""Numerical tolerances shared by every module."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

ENV_PROFILE = "FIDOPT_TOL_PROFILE"


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds that turn exact-arithmetic statements into numerical tests.

    Attributes
    ----------
    rank_tol_factor : float or None
        Singular values (or eigenvalues of PSD operators) below
        ``rank_tol_factor * s_max`` count as zero. ``None`` means
        ``d * machine_epsilon``.
    cluster_gap : float
        Eigenvalues within ``cluster_gap * (1 + |lambda|)`` of each other are
        merged into one eigenspace.
    psd_clip : float
        Negative eigenvalues down to ``-psd_clip`` are clipped to zero.
    opt_tol : float
        Relative residual tolerance of the parallel and support tests.
    equiv_tol : float
        Frobenius distance below which two POVM elements are matched when
        deciding equivalence.
    """

    rank_tol_factor: float | None = 1e-10
    cluster_gap: float = 1e-8
    psd_clip: float = 1e-10
    opt_tol: float = 1e-9
    equiv_tol: float = 1e-7

    def __post_init__(self):
        for name in ("cluster_gap", "psd_clip", "opt_tol", "equiv_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rank_tol_factor is not None and not self.rank_tol_factor > 0:
            raise ValueError("rank_tol_factor must be strictly positive")

    def rank_rtol(self, dim: int) -> float:
        if self.rank_tol_factor is None:
            return max(dim, 1) * float(np.finfo(float).eps)
        return self.rank_tol_factor

    def with_overrides(self, **kwargs) -> "ToleranceConfig":
        return replace(self, **kwargs)


PROFILES = {
    "strict": ToleranceConfig(rank_tol_factor=None, cluster_gap=1e-10,
                              psd_clip=1e-12, opt_tol=1e-11, equiv_tol=1e-9),
    "default": ToleranceConfig(),
    "loose": ToleranceConfig(rank_tol_factor=1e-8, cluster_gap=1e-6,
                             psd_clip=1e-8, opt_tol=1e-7, equiv_tol=1e-5),
}

DEFAULT_TOL = PROFILES["default"]


def get_profile(name: str | None = None) -> ToleranceConfig:
    """Look up a named profile; ``None`` falls back to ``$FIDOPT_TOL_PROFILE``."""
    if name is None:
        name = os.environ.get(ENV_PROFILE, "default")
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; "
                         f"choose from {sorted(PROFILES)}") from None


def resolve(tol: ToleranceConfig | None) -> ToleranceConfig:
    return DEFAULT_TOL if tol is None else tol
