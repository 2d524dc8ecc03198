import os
import shutil
from fractions import Fraction
from pathlib import Path

import hypothesis
import pytest

from floorplan.model import Block, CoordSort, Mode, ProblemInstance

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

FIXTURES = Path(__file__).resolve().parent / "fixtures"
HAVE_SOLVER = shutil.which(os.environ.get("FLOORPLAN_BACKEND", "z3")) is not None

needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver executable on PATH")


def hard(*dims, mode=Mode.CASE1, name="t"):
    make = Block.hard if mode is Mode.CASE1 else Block.rotatable
    return ProblemInstance(name, tuple(make(f"b{k}", w, h) for k, (w, h) in enumerate(dims, 1)), mode)


def soft(*areas, band=(Fraction(1, 10), 10), name="s"):
    blocks = tuple(Block.soft(f"s{k}", a, *band) for k, a in enumerate(areas, 1))
    return ProblemInstance(name, blocks, Mode.CASE3, CoordSort.REAL)


FIVE_HARD = [(10, 15), (8, 6), (9, 5), (9, 7), (7, 8)]
FIVE_SOFT = [150, 48, 45, 63, 56]


@pytest.fixture
def fixtures_dir():
    return FIXTURES
