"""Command-line interface.

    ifed run --benchmark <name> --kernel <id> --mfac <x> --n <N>
             [--config file] [--out dir] [--extended] [--jobs k] [key=value...]
    ifed sweep --benchmark <name> --grid kernels=...,mfacs=...,ns=...
             [--out dir] [--jobs k]
    ifed verify-kernels

Exit codes: 0 success, 2 solver failure, 3 configuration error.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_CONFIG = 3


def _build_config(args, overrides):
    from .config import BenchmarkConfig, ConfigError, load_config

    params = {}
    if args.config:
        params.update(load_config(args.config))
    benchmark = params.pop("benchmark", None)
    if args.benchmark:
        benchmark = args.benchmark
    if not benchmark:
        raise ConfigError("no benchmark selected (flag or config file)")
    out = params.pop("out", "out")
    if args.out:
        out = args.out
    for flag in ("kernel", "mfac", "n"):
        val = getattr(args, flag, None)
        if val is not None:
            params[flag] = val
    if getattr(args, "extended", False):
        params["extended"] = True
    params.update(overrides)
    return BenchmarkConfig(str(benchmark), Path(out), params)


def _parse_overrides(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_run(args) -> int:
    from ..fluid import SolverError
    from ..structure import ElementInversionError
    from .cases import run_benchmark
    from .config import ConfigError

    try:
        overrides = _parse_overrides(args.overrides)
        cfg = _build_config(args, overrides)
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_benchmark(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ElementInversionError) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    for key, value in result.summary.items():
        print(f"{key} = {value}")
    print(f"outputs in {result.out_dir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .config import ConfigError

    try:
        grid = {}
        for part in args.grid.split(";") if ";" in args.grid else \
                _split_grid(args.grid):
            k, v = part.split("=", 1)
            grid[k.strip()] = [x.strip() for x in v.split(",") if x.strip()]
        kernels = grid.get("kernels", [args.kernel or "bspline3"])
        mfacs = grid.get("mfacs", [str(args.mfac or 2.0)])
        ns = grid.get("ns", [str(args.n or 16)])
        if not args.benchmark:
            raise ConfigError("sweep requires --benchmark")
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    jobs = []
    out_root = Path(args.out or "out")
    for kern in kernels:
        for mfac in mfacs:
            for n in ns:
                out = out_root / args.benchmark / f"{kern}_m{mfac}_n{n}"
                cmd = [sys.executable, "-m", "ifed.bench.cli", "run",
                       "--benchmark", args.benchmark, "--kernel", kern,
                       "--mfac", mfac, "--n", n, "--out", str(out)]
                if args.extended:
                    cmd.append("--extended")
                cmd += args.overrides
                jobs.append(cmd)

    max_par = max(1, args.jobs)
    running, failures = [], 0
    queue = list(jobs)
    while queue or running:
        while queue and len(running) < max_par:
            cmd = queue.pop(0)
            print("launch:", " ".join(cmd[3:]))
            running.append(subprocess.Popen(cmd))
        done = [p for p in running if p.poll() is not None]
        for p in done:
            running.remove(p)
            if p.returncode != 0:
                failures += 1
        if running and not done:
            running[0].wait()
    if failures:
        print(f"{failures} sweep job(s) failed", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _split_grid(text):
    """Split 'kernels=a,b,mfacs=1,2' on the key boundaries."""
    parts, current = [], ""
    for chunk in text.split(","):
        if "=" in chunk and current:
            parts.append(current)
            current = chunk
        elif current:
            current += "," + chunk
        else:
            current = chunk
    if current:
        parts.append(current)
    return parts


def cmd_verify_kernels(_args) -> int:
    import numpy as np

    from ..kernels import (
        KERNEL_SPECS,
        KernelId,
        bspline_phi,
        even_odd_sums,
        moment_sum,
        sum_of_squares,
    )

    rng = np.random.default_rng(0)
    rs = rng.uniform(0.0, 1.0, 1000)
    failures = 0

    def check(label, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        failures += 0 if ok else 1

    for kernel in KernelId:
        spec = KERNEL_SPECS[kernel]
        m0 = np.max(np.abs(moment_sum(kernel, 0, rs) - 1.0))
        m1 = np.max(np.abs(moment_sum(kernel, 1, rs)))
        check(f"{kernel.value}: zeroth moment (err {m0:.2e})", m0 < 1e-12)
        check(f"{kernel.value}: first moment (err {m1:.2e})", m1 < 1e-12)
        if spec.satisfies_even_odd:
            even, odd = even_odd_sums(kernel, rs)
            err = max(np.max(np.abs(even - 0.5)), np.max(np.abs(odd - 0.5)))
            check(f"{kernel.value}: even-odd (err {err:.2e})", err < 1e-12)
        if spec.second_moment is not None:
            err = np.max(np.abs(moment_sum(kernel, 2, rs) - spec.second_moment))
            check(f"{kernel.value}: second moment (err {err:.2e})", err < 1e-10)
        if spec.sum_of_squares is not None:
            ss = sum_of_squares(kernel, rs)
            err = np.max(np.abs(ss - spec.sum_of_squares))
            check(f"{kernel.value}: sum of squares (err {err:.2e})", err < 1e-12)

    from ._kernel_oracle import bspline_reference

    for order in range(1, 6):
        xs = np.linspace(-3.2, 3.2, 1001)
        err = np.max(np.abs(bspline_phi(order, xs) - bspline_reference(order, xs)))
        check(f"bspline degree {order} vs convolution recursion "
              f"(err {err:.2e})", err < 1e-8)
    return EXIT_OK if failures == 0 else EXIT_SOLVER


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ifed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one benchmark")
    p_run.add_argument("--benchmark")
    p_run.add_argument("--kernel")
    p_run.add_argument("--mfac")
    p_run.add_argument("--n")
    p_run.add_argument("--config")
    p_run.add_argument("--out")
    p_run.add_argument("--extended", action="store_true")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("overrides", nargs="*", metavar="key=value")
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="fan out a parameter grid")
    p_sweep.add_argument("--benchmark")
    p_sweep.add_argument("--grid", required=True,
                         help="kernels=...,mfacs=...,ns=...")
    p_sweep.add_argument("--kernel")
    p_sweep.add_argument("--mfac")
    p_sweep.add_argument("--n")
    p_sweep.add_argument("--out")
    p_sweep.add_argument("--extended", action="store_true")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("overrides", nargs="*", metavar="key=value")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_verify = sub.add_parser("verify-kernels",
                              help="standalone kernel property suite")
    p_verify.set_defaults(fn=cmd_verify_kernels)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
