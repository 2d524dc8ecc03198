"""Write the seeded synthetic hard-block instances used by the clustering checks.

    python scripts/make_synthetic.py [--out tests/fixtures]

syn40: 40 blocks, sides 1..8 (rng seed 40)
ctl12: 12 blocks, sides 1..6 (rng seed 12)
"""

import argparse
import random
from pathlib import Path

from floorplan.ingest import serialize_native
from floorplan.model import Block, CoordSort, Mode, ProblemInstance

SPECS = {"syn40": (40, 8, 40), "ctl12": (12, 6, 12)}


def synthetic(name: str, n: int, side: int, seed: int) -> ProblemInstance:
    rng = random.Random(seed)
    blocks = tuple(Block.hard(f"m{k}", rng.randint(1, side), rng.randint(1, side))
                   for k in range(1, n + 1))
    return ProblemInstance(name, blocks, Mode.CASE1, CoordSort.INT)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (n, side, seed) in SPECS.items():
        path = out / f"{name}.native"
        path.write_text(serialize_native(synthetic(name, n, side, seed)))
        print(path)


if __name__ == "__main__":
    main()
