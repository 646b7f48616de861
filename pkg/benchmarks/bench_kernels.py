"""Numba vs pure-numpy timings for the hot kernels.

Run ``python3 benchmarks/bench_kernels.py [--quick]``.  Each kernel is
called once per backend to warm up (JIT compilation and caches), then timed
over ``--repeat`` runs; the minimum is reported together with a check that
both backends returned the same result.
"""
import argparse
import math
import time

import numpy as np

from arithokounkov import _kernels
from arithokounkov.normed_module import fs_coefficient_bounds, fs_l2_weights


def _cases(quick):
    rng = np.random.default_rng(7)
    m = 4 if quick else 5
    bounds = np.array([math.comb(m, j) for j in range(m + 1)], dtype=np.int64)
    coeffs = rng.integers(-50, 51, size=(20_000 if quick else 200_000, 7))
    coeffs[coeffs[:, 0] == 0, 0] = 1
    emb = np.array([[1.0, 1.4142135623730951], [1.0, -1.4142135623730951]], dtype=complex)
    n = 2
    t2 = math.exp(2.0)
    cb = [int(math.sqrt(float(b) * t2)) for b in fs_coefficient_bounds(n)]
    w = [float(x) for x in fs_l2_weights(n)]
    return [
        ("box_valuation_scan", lambda: _kernels.box_valuation_scan(bounds, 2, [0, 1, _kernels.INF])),
        ("nu_batch", lambda: _kernels.nu_batch(coeffs, 3, 1)),
        ("classify_plane", lambda: _kernels.classify_plane((-300, 300), (-200, 200), emb,
                                                            [900.0, 900.0], [900.0, 900.0])),
        ("fs_enumerate", lambda: _kernels.fs_enumerate(cb, w, t2, t2, 10 ** 8)[0]),
    ]


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':<20} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}  same")
    for name, fn in _cases(args.quick):
        times, results = {}, {}
        for be in ("numba", "numpy"):
            with _kernels.use_backend(be):
                results[be] = fn()
                best = float("inf")
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    fn()
                    best = min(best, time.perf_counter() - t0)
                times[be] = best
        same = _same(results["numba"], results["numpy"])
        print(f"{name:<20} {times['numba']:>10.4f} {times['numpy']:>10.4f} "
              f"{times['numpy'] / times['numba']:>8.1f}  {same}")


if __name__ == "__main__":
    main()
