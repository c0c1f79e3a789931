"""ifed-plot: render solver outputs into figures.

    ifed-plot timeseries --in series.csv --columns c_d,c_l --out lift_drag.svg
    ifed-plot convergence --in run1/summary.csv run2/summary.csv \
        --column l2 --out convergence.svg
    ifed-plot field --in final.ifedfield --out speed.svg

SVG output is the default (deterministic bytes); pass --png for raster.
"""

from __future__ import annotations

import argparse
import sys

from .plots import plot_convergence, plot_field_magnitude, plot_timeseries
from .schemas import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ifed-plot", description=__doc__)
    sub = parser.add_subparsers(dest="kind", required=True)

    p_ts = sub.add_parser("timeseries")
    p_ts.add_argument("--in", dest="inputs", nargs="+", required=True)
    p_ts.add_argument("--columns", required=True,
                      help="comma-separated column names")
    p_ts.add_argument("--out", required=True)
    p_ts.add_argument("--title")
    p_ts.add_argument("--labels", help="comma-separated legend prefixes")
    p_ts.add_argument("--png", action="store_true")

    p_cv = sub.add_parser("convergence")
    p_cv.add_argument("--in", dest="inputs", nargs="+", required=True)
    p_cv.add_argument("--column", default="l2")
    p_cv.add_argument("--out", required=True)
    p_cv.add_argument("--title")
    p_cv.add_argument("--png", action="store_true")

    p_f = sub.add_parser("field")
    p_f.add_argument("--in", dest="inputs", nargs="+", required=True)
    p_f.add_argument("--out", required=True)
    p_f.add_argument("--title")
    p_f.add_argument("--png", action="store_true")

    args = parser.parse_args(argv)
    out = args.out
    if args.png and out.endswith(".svg"):
        out = out[:-4] + ".png"

    try:
        if args.kind == "timeseries":
            labels = args.labels.split(",") if args.labels else None
            plot_timeseries(args.inputs, args.columns.split(","), out,
                            title=args.title, labels=labels)
        elif args.kind == "convergence":
            _, slope = plot_convergence(args.inputs, out, column=args.column,
                                        title=args.title)
            print(f"fitted slope: {slope:.3f}")
        else:
            _, argmax = plot_field_magnitude(args.inputs[0], out,
                                             title=args.title)
            print(f"peak speed at cell {argmax}")
    except (SchemaError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
