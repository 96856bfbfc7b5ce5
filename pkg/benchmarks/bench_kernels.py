"""Compare the compiled kernels with the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat 20]

Times each hot kernel on both backends, then a full EEP solve with the
package routed through each backend in turn.
"""

import argparse
import timeit

import numpy as np

from interp_lab import _kernels_py, eep, linalg
from interp_lab.geometry import InterpolationInstance

try:
    from interp_lab import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _cases(rng):
    a = rng.standard_normal((12, 12))
    a = a + a.T
    pts = rng.standard_normal((6, 4))
    y = 0.01 * rng.standard_normal(6)
    g = 0.01 * rng.standard_normal((6, 4))
    h = rng.standard_normal((30, 30))
    h = h @ h.T + np.eye(30)
    b = rng.standard_normal(30)
    return {
        "jacobi_eigen 12x12": lambda k: k.jacobi_eigen(a, 100, 1e-12),
        "pair_slacks p=6 n=4": lambda k: k.pair_slacks(pts, y, g, 1.0),
        "barrier_terms p=6 n=4": lambda k: k.barrier_terms(pts, y, g, 1.0),
        "cholesky_solve 30x30": lambda k: k.cholesky_solve(h, b, 0.0),
    }


def _eep_solve(kern, inst):
    linalg.kernels, eep.kernels = kern, kern
    return eep.solve(eep.build(inst), 1e-8)


def best_of(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    backends = {"python": _kernels_py}
    if _kernels_c is not None:
        backends["cython"] = _kernels_c
    else:
        print("compiled extension not built; timing the fallback only")
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in _cases(rng).items():
        rows.append((name, {b: best_of(lambda k=k: fn(k), args.repeat) for b, k in backends.items()}))
    saved = linalg.kernels, eep.kernels
    try:
        for label, inst in [
            ("EEP solve n=2", InterpolationInstance([[-0.3, 1.0], [-1.1, -0.5], [1.0, 0.0]], [2.0, 2.0])),
            ("EEP solve n=4", InterpolationInstance(np.vstack([np.eye(4), np.zeros(4)]), [1.0, 1.0, -0.5, 0.3])),
        ]:
            rows.append((label, {b: best_of(lambda k=k: _eep_solve(k, inst), max(3, args.repeat // 4))
                                 for b, k in backends.items()}))
    finally:
        linalg.kernels, eep.kernels = saved
    names = list(backends)
    print(f"{'kernel':<24}" + "".join(f"{n + ' (us)':>16}" for n in names) + ("    speedup" if len(names) > 1 else ""))
    for name, t in rows:
        line = f"{name:<24}" + "".join(f"{t[n] * 1e6:>16.1f}" for n in names)
        if len(names) > 1:
            line += f"    {t['python'] / t['cython']:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
