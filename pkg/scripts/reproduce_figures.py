#!/usr/bin/env python3
"""Run every figure preset and export the plotting CSVs.

Desk scale by default (20 realizations, 200 parameter-search draws); pass
--paper-scale to restore the configured counts. Figure rendering afterwards:

    cd frontend && npm run render -- --figure fig4 --in ../figure-data --out ../figures
"""

import argparse
import sys
from pathlib import Path

from qnphase.cli import main as qnphase_main

FIGURES = [f"fig{i}" for i in range(2, 10)]


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--figures", nargs="*", default=FIGURES, choices=FIGURES)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--export-dir", default="figure-data")
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--paper-scale", action="store_true")
    args = parser.parse_args(argv)

    scenarios = Path(__file__).resolve().parent.parent / "scenarios"
    for fig in args.figures:
        command = "qcr-search" if fig == "fig9" else "run"
        cli = [command, str(scenarios / f"{fig}.json"),
               "--out-dir", args.out_dir, "--threads", str(args.threads), "--overwrite"]
        if args.paper_scale:
            cli.append("--paper-scale")
        print(f"== {fig} ==", flush=True)
        code = qnphase_main(cli)
        if code != 0:
            return code
        code = qnphase_main(["export-figure-data", args.out_dir, fig,
                             "--out-dir", args.export_dir, "--overwrite"])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
