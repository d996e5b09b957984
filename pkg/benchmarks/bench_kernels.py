"""Compare the numba and numpy batch kernels.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is called once
to trigger compilation before timing.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from fidopt import _kernels
from fidopt.instances import random_povm_elements, random_state, rng_for


def cases(rng):
    d, m, n = 4, 8, 2000
    elements = random_povm_elements(d, m, rng)
    states = np.stack([random_state(d, d, rng) for _ in range(n)])
    P = _kernels.probabilities_numpy(elements, states)
    Q = np.roll(P, 1, axis=0)
    a = np.array([0.0, 0.0, 1.0])
    b = np.array([1.0, 0.0, 0.0])
    return {
        "probabilities": (elements, states),
        "bc_rows": (P, Q),
        "tv_rows": (P, Q),
        "qubit_grid": (a, b, 720),
    }


def _outputs(out) -> tuple:
    return out if isinstance(out, tuple) else (out,)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    inputs = cases(rng_for(0))
    fast, ref = _kernels.kernels(True), _kernels.kernels(False)
    print(f"{'kernel':<14}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}  max|diff|")
    for name, arg in inputs.items():
        out_fast = fast[name](*arg)  # compile
        out_ref = ref[name](*arg)
        diff = max(float(np.max(np.abs(x - y)))
                   for x, y in zip(_outputs(out_fast), _outputs(out_ref)))
        t_ref = min(timeit.repeat(lambda: ref[name](*arg), number=1, repeat=args.repeat))
        t_fast = min(timeit.repeat(lambda: fast[name](*arg), number=1, repeat=args.repeat))
        print(f"{name:<14}{1e3 * t_ref:>12.3f}{1e3 * t_fast:>12.3f}{t_ref / t_fast:>10.2f}  {diff:.1e}")


if __name__ == "__main__":
    main()
