#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot kernels (facet acceptance counting and shell counting
for the finite-difference oracle) on synthetic workloads of increasing
size and prints the speedup.  Run after `pip install -e .`:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from radsurf._kernels import _fallback

try:
    from radsurf._kernels import _core
except ImportError:
    _core = None


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _workload(n, k, d, seed):
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n, d))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    scales = rng.exponential(2.0, n)
    normals = rng.standard_normal((k, d))
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    base = 0.3 * rng.standard_normal(k)
    offsets = np.abs(rng.standard_normal(k)) + 0.2
    pts = rng.standard_normal((n, d))
    return (
        np.ascontiguousarray(dirs),
        np.ascontiguousarray(scales),
        np.ascontiguousarray(normals),
        np.ascontiguousarray(base),
        np.ascontiguousarray(offsets),
        np.ascontiguousarray(pts),
    )


def main():
    if _core is None:
        print("compiled kernels not built; rerun `pip install -e .`")
        return
    print(f"{'kernel':<22}{'n':>8}{'k':>6}{'d':>6}"
          f"{'fallback':>12}{'compiled':>12}{'speedup':>9}")
    for n, k, d in [(65536, 8, 16), (65536, 64, 64), (65536, 256, 256)]:
        dirs, scales, normals, base, offsets, pts = _workload(n, k, d, 0)

        t_f = _time(_fallback.facet_accept_count,
                    dirs, scales, normals, base, offsets)
        t_c = _time(_core.facet_accept_count,
                    dirs, scales, normals, base, offsets)
        a = _fallback.facet_accept_count(dirs, scales, normals, base, offsets)
        b = _core.facet_accept_count(dirs, scales, normals, base, offsets)
        assert a == b, f"backend mismatch: {a} != {b}"
        print(f"{'facet_accept_count':<22}{n:>8}{k:>6}{d:>6}"
              f"{t_f * 1e3:>10.1f}ms{t_c * 1e3:>10.1f}ms{t_f / t_c:>8.2f}x")

        t_f = _time(_fallback.polytope_shell_counts, pts, normals, offsets, 0.05)
        t_c = _time(_core.polytope_shell_counts, pts, normals, offsets, 0.05)
        a = _fallback.polytope_shell_counts(pts, normals, offsets, 0.05)
        b = _core.polytope_shell_counts(pts, normals, offsets, 0.05)
        assert a == b, f"backend mismatch: {a} != {b}"
        print(f"{'polytope_shell_counts':<22}{n:>8}{k:>6}{d:>6}"
              f"{t_f * 1e3:>10.1f}ms{t_c * 1e3:>10.1f}ms{t_f / t_c:>8.2f}x")


if __name__ == "__main__":
    main()
