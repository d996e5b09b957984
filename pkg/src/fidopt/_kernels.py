"""Hot loops for batch evaluation, compiled with numba when available.

Every kernel has a pure-numpy twin with identical semantics. Set
``FIDOPT_NUMBA=0`` to force the numpy versions (useful for debugging and for
checking that both agree).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

ENV_FLAG = "FIDOPT_NUMBA"


# ------------------------------------------------------------------ numpy reference

def probabilities_numpy(elements: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``out[n, m] = Re tr(E_m rho_n)`` for stacks of elements and states."""
    return np.einsum("mij,nji->nm", elements, states).real


def bc_rows_numpy(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(P, 0, None) * np.clip(Q, 0, None)).sum(axis=1)


def tv_rows_numpy(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return 0.5 * np.abs(P - Q).sum(axis=1)


def qubit_grid_numpy(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Induced fidelity and total variation over projective qubit measurements.

    The measurement direction is ``(sin t cos f, sin t sin f, cos t)`` with
    ``t_i = pi i / (n - 1)`` and ``f_j = 2 pi j / n``.
    """
    t = np.pi * np.arange(n) / (n - 1)
    f = 2 * np.pi * np.arange(n) / n
    st, ct = np.sin(t)[:, None], np.cos(t)[:, None]
    u = np.stack([st * np.cos(f)[None, :], st * np.sin(f)[None, :], ct * np.ones((1, n))])
    p = np.clip(0.5 * (1 + np.einsum("k,kij->ij", a, u)), 0.0, 1.0)
    q = np.clip(0.5 * (1 + np.einsum("k,kij->ij", b, u)), 0.0, 1.0)
    F = (np.sqrt(p * q) + np.sqrt((1 - p) * (1 - q))) ** 2
    return F, np.abs(p - q)


# ------------------------------------------------------------------ numba versions

if njit is not None:

    @njit(cache=True)
    def probabilities_numba(elements, states):
        m, d = elements.shape[0], elements.shape[1]
        n = states.shape[0]
        out = np.empty((n, m))
        for s in range(n):
            for k in range(m):
                acc = 0.0
                for i in range(d):
                    for j in range(d):
                        z = elements[k, i, j] * states[s, j, i]
                        acc += z.real
                out[s, k] = acc
        return out

    @njit(cache=True)
    def bc_rows_numba(P, Q):
        n, m = P.shape
        out = np.empty(n)
        for i in range(n):
            acc = 0.0
            for k in range(m):
                x = P[i, k] * Q[i, k]
                if x > 0.0:
                    acc += math.sqrt(x)
            out[i] = acc
        return out

    @njit(cache=True)
    def tv_rows_numba(P, Q):
        n, m = P.shape
        out = np.empty(n)
        for i in range(n):
            acc = 0.0
            for k in range(m):
                acc += abs(P[i, k] - Q[i, k])
            out[i] = 0.5 * acc
        return out

    @njit(cache=True)
    def qubit_grid_numba(a, b, n):
        F = np.empty((n, n))
        T = np.empty((n, n))
        for i in range(n):
            t = math.pi * i / (n - 1)
            st, ct = math.sin(t), math.cos(t)
            for j in range(n):
                f = 2.0 * math.pi * j / n
                u0, u1 = st * math.cos(f), st * math.sin(f)
                p = min(max(0.5 * (1.0 + a[0] * u0 + a[1] * u1 + a[2] * ct), 0.0), 1.0)
                q = min(max(0.5 * (1.0 + b[0] * u0 + b[1] * u1 + b[2] * ct), 0.0), 1.0)
                r = math.sqrt(p * q) + math.sqrt((1.0 - p) * (1.0 - q))
                F[i, j] = r * r
                T[i, j] = abs(p - q)
        return F, T

else:  # pragma: no cover
    probabilities_numba = bc_rows_numba = tv_rows_numba = qubit_grid_numba = None


NUMPY_KERNELS = {
    "probabilities": probabilities_numpy,
    "bc_rows": bc_rows_numpy,
    "tv_rows": tv_rows_numpy,
    "qubit_grid": qubit_grid_numpy,
}
NUMBA_KERNELS = {
    "probabilities": probabilities_numba,
    "bc_rows": bc_rows_numba,
    "tv_rows": tv_rows_numba,
    "qubit_grid": qubit_grid_numba,
}


def numba_enabled() -> bool:
    return njit is not None and os.environ.get(ENV_FLAG, "1") != "0"


def kernels(use_numba: bool | None = None) -> dict:
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba and njit is None:
        raise RuntimeError("numba is not installed")
    return NUMBA_KERNELS if use_numba else NUMPY_KERNELS


def backend() -> str:
    return "numba" if numba_enabled() else "numpy"


def probabilities(elements: np.ndarray, states: np.ndarray) -> np.ndarray:
    return kernels()["probabilities"](np.ascontiguousarray(elements, dtype=complex),
                                      np.ascontiguousarray(states, dtype=complex))


def bc_rows(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return kernels()["bc_rows"](np.ascontiguousarray(P, dtype=float),
                                np.ascontiguousarray(Q, dtype=float))


def tv_rows(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return kernels()["tv_rows"](np.ascontiguousarray(P, dtype=float),
                                np.ascontiguousarray(Q, dtype=float))


def qubit_grid(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    if n < 2:
        raise ValueError("grid needs n >= 2")
    return kernels()["qubit_grid"](np.asarray(a, dtype=float), np.asarray(b, dtype=float), int(n))
