"""Solve the five-block worked examples in every mode and draw them.

    python scripts/run_worked_examples.py [--out results/examples] [--soft-timeout 30]

Writes one SVG and one placement file per run, plus table.txt / table.csv.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from floorplan.cli import with_mode
from floorplan.ingest import parse_native
from floorplan.model import Mode
from floorplan.placement_io import write_placement
from floorplan.report import emit_table, render_svg
from floorplan.solver import BackendConfig, Strategy, minimize_area

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/examples")
    ap.add_argument("--soft-timeout", type=float, default=30.0, help="seconds per soft query")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    hard = parse_native((FIXTURES / "five.native").read_text())
    soft = parse_native((FIXTURES / "five_soft.native").read_text())
    runs = [
        ("case1", hard, None, BackendConfig(), None),
        ("case2", with_mode(hard, Mode.CASE2), None, BackendConfig(), None),
        ("case3", soft, Strategy.BISECT, BackendConfig(timeout=args.soft_timeout), Fraction(1)),
    ]
    reports = []
    for label, inst, strategy, config, tol in runs:
        placement, report = minimize_area(inst, strategy, config, tol, out / "runs" / label)
        print(f"{label}: {report.status.value} area={float(report.area or 0):.2f} "
              f"in {report.wall_time:.1f}s")
        reports.append(report)
        if placement is not None:
            (out / f"{label}.svg").write_text(render_svg(placement, shade_dead_space=True))
            (out / f"{label}.pl").write_text(write_placement(placement))
    (out / "table.txt").write_text(emit_table(reports))
    (out / "table.csv").write_text(emit_table(reports, "csv"))
    print(emit_table(reports))


if __name__ == "__main__":
    main()
