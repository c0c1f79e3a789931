"""Compare the compiled extension against the pure-numpy fallback.

Times the three hot paths (delta-function scatter, gather, red-black sweeps)
on benchmark-representative sizes and prints the speedups.  Run after an
editable install:

    python scripts/benchmark_backends.py
"""

import time

import numpy as np

from ifed._core import fallback

try:
    from ifed._core import _compiled as compiled
except ImportError:
    compiled = None


def timeit(fn, *args, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_scatter(mod, npts, support, shape):
    rng = np.random.default_rng(0)
    field = np.zeros(shape)
    i0 = rng.integers(2, shape[0] - support - 2, npts)
    j0 = rng.integers(2, shape[1] - support - 2, npts)
    wx = rng.random((npts, support))
    wy = rng.random((npts, support))
    vals = rng.random(npts)
    return timeit(mod.scatter_stencil, field, i0, j0, wx, wy, vals)


def bench_gather(mod, npts, support, shape):
    rng = np.random.default_rng(0)
    field = rng.random(shape)
    i0 = rng.integers(2, shape[0] - support - 2, npts)
    j0 = rng.integers(2, shape[1] - support - 2, npts)
    wx = rng.random((npts, support))
    wy = rng.random((npts, support))
    return timeit(mod.gather_stencil, field, i0, j0, wx, wy)


def bench_rbgs(mod, shape, sweeps=4):
    rng = np.random.default_rng(0)
    x = rng.random((shape[0] + 2, shape[1] + 2))
    rhs = rng.random(shape)

    def run():
        for color in (0, 1) * sweeps:
            mod.rbgs_sweep(x, rhs, 1e-4, color)

    return timeit(run)


def main():
    if compiled is None:
        print("compiled extension not built; showing fallback only")
    cases = [
        ("scatter 4k pts, 3x3, 512x256", bench_scatter, (4000, 3, (513, 256))),
        ("scatter 4k pts, 6x6, 512x256", bench_scatter, (4000, 6, (513, 256))),
        ("gather  4k pts, 3x3, 512x256", bench_gather, (4000, 3, (513, 256))),
        ("rbgs    8 sweeps, 512x256", bench_rbgs, ((512, 256),)),
        ("rbgs    8 sweeps, 128x64", bench_rbgs, ((128, 64),)),
    ]
    print(f"{'case':38s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn, args in cases:
        t_np = fn(fallback, *args)
        if compiled is not None:
            t_cy = fn(compiled, *args)
            print(f"{name:38s} {t_np * 1e3:9.3f}ms {t_cy * 1e3:9.3f}ms "
                  f"{t_np / t_cy:7.1f}x")
        else:
            print(f"{name:38s} {t_np * 1e3:9.3f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
