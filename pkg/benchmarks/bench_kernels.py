"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is checked for agreement before timing; the first numba call
(compilation) is excluded.
"""

import argparse
import time

import numpy as np

from collective_noise import _accel, _kernels
from collective_noise.lindblad_core import all_blocks
from collective_noise.markov_chain import _ratios, labels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    blocks = [(b.n, b.m, b.d) for b in all_blocks(40)]

    def tri(f):
        return lambda: [f(n, m, d, 1.0) for n, m, d in blocks]

    lam = np.sort(np.random.default_rng(0).uniform(1e-3, 1, size=400))
    R, ws = _ratios(256)
    lab = labels(256).astype(np.int64)
    wsf = ws.astype(np.float64)
    return [
        (f"block_tridiagonal x{len(blocks)} blocks (N=40)",
         tri(_kernels._block_tridiagonal_numpy), tri(_kernels._block_tridiagonal_numba)),
        ("log_quotient_matrix 400x400",
         lambda: _kernels._log_quotient_numpy(lam), lambda: _kernels._log_quotient_numba(lam)),
        ("phi_from_ratios N=256",
         lambda: _kernels._phi_numpy(lab, R, wsf, 1.0), lambda: _kernels._phi_numba(lab, R, wsf, 1.0)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not _accel.NUMBA_AVAILABLE:
        print("numba not installed; nothing to compare")
        return 0
    print(f"{'kernel':44s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, f_np, f_nb in cases():
        a, b = f_np(), f_nb()  # warm-up and compile
        a = a if isinstance(a, list) else [a]
        b = b if isinstance(b, list) else [b]
        for x, y in zip(a, b):
            for u, v in zip(x if isinstance(x, tuple) else (x,), y if isinstance(y, tuple) else (y,)):
                assert np.allclose(u, v, rtol=1e-12), name
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:44s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:8.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
