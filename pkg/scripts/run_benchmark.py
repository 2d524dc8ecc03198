"""Batch-solve benchmark files (GSRC ``.blocks`` or native) and tabulate.

    python scripts/run_benchmark.py bench/*.blocks --mode case2 --cluster-size 30 \
        --unit-scale 0.001 --out results/bench

Instances above ``--cluster-size`` blocks go through the clustered pipeline.
A per-instance timeout or backend error is recorded as a table row, not a crash.
"""

import argparse
import logging
from fractions import Fraction
from pathlib import Path

from floorplan.cli import load_instance
from floorplan.clustering import plan_clusters, solve_clustered
from floorplan.errors import FloorplanError
from floorplan.model import Mode
from floorplan.placement_io import write_placement
from floorplan.report import emit_table, render_svg
from floorplan.solver import BackendConfig, minimize_area


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("inputs", nargs="+")
    ap.add_argument("--mode", choices=[m.value for m in Mode])
    ap.add_argument("--cluster-size", type=int, default=30)
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--unit-scale", type=Fraction, default=Fraction(1))
    ap.add_argument("--out", default="results/bench")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = BackendConfig(timeout=args.timeout, jobs=args.jobs)
    mode = Mode(args.mode) if args.mode else None
    reports = []
    for path in args.inputs:
        try:
            inst = load_instance(path, None, mode)
            runs = out / "runs" / inst.name
            if len(inst.blocks) > args.cluster_size:
                placement, report = solve_clustered(inst, plan_clusters(inst, args.cluster_size),
                                                    config=config, transcript_dir=runs)
            else:
                placement, report = minimize_area(inst, config=config, transcript_dir=runs)
        except FloorplanError as exc:
            logging.error("%s: %s", path, exc)
            continue
        reports.append(report)
        if placement is not None:
            (out / f"{inst.name}.pl").write_text(write_placement(placement))
            (out / f"{inst.name}.svg").write_text(render_svg(placement, labels=len(inst.blocks) <= 50))
        logging.info("%s: %s", inst.name, report.status.value)
    if reports:
        (out / "table.csv").write_text(emit_table(reports, "csv", args.unit_scale))
        print(emit_table(reports, "text", args.unit_scale))


if __name__ == "__main__":
    main()
