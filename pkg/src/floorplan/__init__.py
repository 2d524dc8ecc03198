"""Area-minimal floorplanning of rectangular blocks through SMT queries."""

from .model import (BigMParams, Block, BlockKind, CoordSort, Mode, PlacedBlock, Placement,
                    ProblemInstance, SolveReport, Status, big_m_params, placement_box,
                    rects_disjoint)
from .encoder import ConstraintSystem, emit_smtlib, encode, encode_case1, encode_case2, encode_case3
from .solver import BackendConfig, Dialect, Strategy, minimize_area
from .validator import brute_force_optimum, dead_space, validate

__all__ = [
    "BigMParams", "Block", "BlockKind", "CoordSort", "Mode", "PlacedBlock", "Placement",
    "ProblemInstance", "SolveReport", "Status", "big_m_params", "placement_box", "rects_disjoint",
    "ConstraintSystem", "emit_smtlib", "encode", "encode_case1", "encode_case2", "encode_case3",
    "BackendConfig", "Dialect", "Strategy", "minimize_area",
    "brute_force_optimum", "dead_space", "validate",
]
