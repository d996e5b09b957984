"""Regenerate the frozen reference values used in the test suite.

Independent of the package: 50-digit mpmath arithmetic with ``sqrtm`` and
eigen-solvers from mpmath only. Run ``python3 tests/oracles/generate_frozen.py``
and paste the printed dictionary into ``tests/frozen.py``.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 50

RHO_Q = [[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]]
SIGMA_Q = [[0.4, 0.1j], [-0.1j, 0.6]]
RHO_T = [[0.5, 0.1, 0.05j], [0.1, 0.3, 0.0], [-0.05j, 0.0, 0.2]]
SIGMA_T = [[0.2, 0.0, 0.1], [0.0, 0.3, -0.05j], [0.1, 0.05j, 0.5]]
GM_A = [[2.0, 1.0], [1.0, 3.0]]
GM_B = [[1.0, -0.5j], [0.5j, 2.0]]


def M(x):
    return mp.matrix([[mp.mpc(complex(v).real, complex(v).imag) for v in row] for row in x])


def herm_sqrt(A):
    A = (A + A.H) / 2
    w, V = mp.eighe(A)
    return V * mp.diag([mp.sqrt(max(x, 0)) for x in w]) * V.H


def fidelity(r, s):
    sr = herm_sqrt(r)
    inner = herm_sqrt(sr * s * sr)
    return mp.re(sum(inner[i, i] for i in range(inner.rows))) ** 2


def trace_distance(r, s):
    w, _ = mp.eighe((r - s + (r - s).H) / 2)
    return sum(abs(x) for x in w) / 2


def geometric_mean(A, B):
    sA = herm_sqrt(A)
    sAi = mp.inverse(sA)
    return sA * herm_sqrt(sAi * B * sAi) * sA


def mean_eigs(r, s):
    """Eigenvalues of M(rho^-1, sigma), ascending."""
    w, _ = mp.eighe(geometric_mean(mp.inverse(r), s))
    return sorted(w)


def main():
    out = {}
    for tag, (r, s) in {"qubit": (RHO_Q, SIGMA_Q), "qutrit": (RHO_T, SIGMA_T)}.items():
        r, s = M(r), M(s)
        out[f"{tag}_F"] = float(fidelity(r, s))
        out[f"{tag}_D"] = float(trace_distance(r, s))
        out[f"{tag}_mean_eigs"] = [float(x) for x in mean_eigs(r, s)]
    G = geometric_mean(M(GM_A), M(GM_B))
    out["gm_AB"] = [[complex(G[i, j]) for j in range(2)] for i in range(2)]
    for k, v in out.items():
        print(f"    {k!r}: {v!r},")


if __name__ == "__main__":
    main()
