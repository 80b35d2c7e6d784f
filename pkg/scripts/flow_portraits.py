#!/usr/bin/env python3
"""Integrate the power-law coupling flow along rotated contours and render
phase portraits.

For each contour angle the flow (g, gamma) is integrated from a common
initial point; trajectories are written as CSV plus an SVG overlay of the
straight-contour and rotated-contour portraits.

Usage: python3 scripts/flow_portraits.py [--N 2] [--outdir portraits]
"""
import argparse
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cflow.cli import main as cli_main  # noqa: E402
from cflow.svg import render_svg        # noqa: E402


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=2)
    ap.add_argument("--gamma0", type=float, default=0.5)
    ap.add_argument("--ginv0", type=float, default=1.0)
    ap.add_argument("--s-max", type=float, default=1.2)
    ap.add_argument("--outdir", default="portraits")
    args = ap.parse_args(argv)

    os.makedirs(args.outdir, exist_ok=True)
    csvs = []
    for tag, angle in [("axis", 0.0), ("rotated", math.pi / 4)]:
        out = os.path.join(args.outdir, f"npower_{tag}.csv")
        code = cli_main(["flow", "--variant", "n-power",
                         "--N", str(args.N),
                         "--gamma0", str(args.gamma0),
                         "--ginv0", str(args.ginv0),
                         "--angle", str(angle),
                         "--s_max", str(args.s_max),
                         "--n_points", "121", "--out", out])
        print(f"{tag} contour (angle {angle:.3f}): exit {code} -> {out}")
        csvs.append(out)
    overlay = os.path.join(args.outdir, "npower_overlay.svg")
    render_svg(csvs[0], overlay, overlay_csv=csvs[1])
    print(f"overlay portrait -> {overlay}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
