"""Bisection search for the largest stable penalty/stabilization constant.

The paper-style parameters (tether stiffness, wall stiffness, numerical bulk
modulus) are set "approximately as large as stable"; this script reproduces
that procedure: it bisects one config key between a stable low value and an
unstable high value, declaring a run unstable when it fails (CFL guard, NaN,
solver breakdown) within a short horizon.

    python scripts/stability_edge.py --benchmark band --key c_kappa \
        --lo 0.05 --hi 16 --t 0.02 --n 32
"""

import argparse
import sys
import tempfile

from ifed.bench import BenchmarkConfig, run_benchmark
from ifed.fluid import SolverError
from ifed.structure import ElementInversionError


def stable(benchmark, key, value, horizon, n, extra):
    params = {key: value, "t_end": horizon, "n": n, "sample_every": 50}
    params.update(extra)
    with tempfile.TemporaryDirectory() as tmp:
        try:
            run_benchmark(BenchmarkConfig(benchmark, tmp, params))
        except (SolverError, ElementInversionError, FloatingPointError):
            return False
    return True


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--benchmark", required=True)
    ap.add_argument("--key", required=True)
    ap.add_argument("--lo", type=float, required=True)
    ap.add_argument("--hi", type=float, required=True)
    ap.add_argument("--t", type=float, default=0.02, help="test horizon")
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--iters", type=int, default=8)
    ap.add_argument("overrides", nargs="*", metavar="key=value")
    args = ap.parse_args()
    extra = dict(tok.split("=", 1) for tok in args.overrides)

    lo, hi = args.lo, args.hi
    if not stable(args.benchmark, args.key, lo, args.t, args.n, extra):
        print(f"{args.key} = {lo} already unstable; lower --lo")
        return 1
    if stable(args.benchmark, args.key, hi, args.t, args.n, extra):
        print(f"{args.key} = {hi} still stable; raise --hi")
        return 1
    for _ in range(args.iters):
        mid = (lo * hi) ** 0.5
        ok = stable(args.benchmark, args.key, mid, args.t, args.n, extra)
        print(f"{args.key} = {mid:.6g}: {'stable' if ok else 'unstable'}")
        lo, hi = (mid, hi) if ok else (lo, mid)
    print(f"stability edge: {args.key} in ({lo:.6g}, {hi:.6g})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
