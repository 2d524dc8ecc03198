"""Domain types and pure geometry shared by every stage of the pipeline.

All model-side numbers are ``fractions.Fraction``; floats appear only when
rendering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import BadDimension, DuplicateId, InstanceEmpty, ModeMismatch

Number = int | str | Fraction


def to_fraction(value: Number | float) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # go through repr so 0.1 means one tenth, not its binary neighbour
        return Fraction(repr(value))
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """``p`` for integers, ``p/q`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def sqrt_upper(value: Fraction) -> Fraction:
    """Smallest integer that is >= sqrt(value)."""
    n = math.ceil(value)
    s = math.isqrt(n)
    if s * s < n:
        s += 1
    return Fraction(s)


class BlockKind(enum.Enum):
    HARD = "hard"
    ROTATABLE = "rot"
    SOFT = "soft"


class Mode(enum.Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"


class CoordSort(enum.Enum):
    INT = "int"
    REAL = "real"


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class Block:
    id: str
    kind: BlockKind
    width: Fraction | None = None
    height: Fraction | None = None
    area: Fraction | None = None
    aspect_min: Fraction | None = None
    aspect_max: Fraction | None = None

    def __post_init__(self):
        if self.kind is BlockKind.SOFT:
            if self.area is None or self.area <= 0:
                raise BadDimension(self.id, f"soft block {self.id!r} needs a positive area")
            if self.aspect_min is None or self.aspect_max is None:
                raise BadDimension(self.id, f"soft block {self.id!r} needs an aspect band")
            if not 0 < self.aspect_min <= self.aspect_max:
                raise BadDimension(self.id, f"soft block {self.id!r} has an empty aspect band")
        else:
            if self.width is None or self.height is None or self.width <= 0 or self.height <= 0:
                raise BadDimension(self.id)

    @classmethod
    def hard(cls, id: str, width: Number, height: Number) -> "Block":
        return cls(id, BlockKind.HARD, to_fraction(width), to_fraction(height))

    @classmethod
    def rotatable(cls, id: str, width: Number, height: Number) -> "Block":
        return cls(id, BlockKind.ROTATABLE, to_fraction(width), to_fraction(height))

    @classmethod
    def soft(cls, id: str, area: Number, aspect_min: Number = Fraction(1, 10),
             aspect_max: Number = 10) -> "Block":
        return cls(id, BlockKind.SOFT, area=to_fraction(area),
                   aspect_min=to_fraction(aspect_min), aspect_max=to_fraction(aspect_max))

    @property
    def is_soft(self) -> bool:
        return self.kind is BlockKind.SOFT

    @property
    def block_area(self) -> Fraction:
        if self.is_soft:
            return self.area
        return self.width * self.height

    def sizing_dims(self) -> tuple[Fraction, Fraction]:
        """Dimensions used for big-M sizing; a sound bound for soft blocks."""
        if not self.is_soft:
            return self.width, self.height
        # h <= sqrt(A * amax) and w <= sqrt(A / amin) for any admissible shape
        side = max(sqrt_upper(self.area * self.aspect_max), sqrt_upper(self.area / self.aspect_min))
        return side, side

    def with_id(self, new_id: str) -> "Block":
        return Block(new_id, self.kind, self.width, self.height, self.area,
                     self.aspect_min, self.aspect_max)


_MODE_KINDS = {
    Mode.CASE1: {BlockKind.HARD},
    Mode.CASE2: {BlockKind.HARD, BlockKind.ROTATABLE},
    Mode.CASE3: {BlockKind.SOFT},
}


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    blocks: tuple[Block, ...]
    mode: Mode
    coordinate_sort: CoordSort = CoordSort.INT

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise InstanceEmpty(f"instance {self.name!r} has no blocks")
        seen = set()
        for b in self.blocks:
            if b.id in seen:
                raise DuplicateId(b.id)
            seen.add(b.id)
            if b.kind not in _MODE_KINDS[self.mode]:
                raise ModeMismatch(b.id, f"block {b.id!r} of kind {b.kind.value} "
                                         f"not allowed under {self.mode.value}")
        if self.mode is Mode.CASE3 and self.coordinate_sort is not CoordSort.REAL:
            raise ModeMismatch(None, "case3 (soft blocks) requires real coordinates")
        if self.coordinate_sort is CoordSort.INT:
            for b in self.blocks:
                if b.width.denominator != 1 or b.height.denominator != 1:
                    raise BadDimension(b.id, f"block {b.id!r} has non-integral dimensions "
                                             "under integer coordinates")

    @property
    def ids(self) -> list[str]:
        return [b.id for b in self.blocks]

    def block(self, block_id: str) -> Block:
        for b in self.blocks:
            if b.id == block_id:
                return b
        raise KeyError(block_id)

    @property
    def total_block_area(self) -> Fraction:
        return sum((b.block_area for b in self.blocks), Fraction(0))

    @property
    def is_integral(self) -> bool:
        return self.coordinate_sort is CoordSort.INT


@dataclass(frozen=True)
class BigMParams:
    W: Fraction
    H: Fraction

    @property
    def M(self) -> Fraction:
        return max(self.W, self.H)


def big_m_params(instance: ProblemInstance | Sequence[Block]) -> BigMParams:
    """W = sum of widths, H = sum of heights (soft blocks use a safe bound)."""
    blocks = instance.blocks if isinstance(instance, ProblemInstance) else tuple(instance)
    if not blocks:
        raise InstanceEmpty("cannot size big-M constants for an empty instance")
    dims = [b.sizing_dims() for b in blocks]
    return BigMParams(sum((w for w, _ in dims), Fraction(0)),
                      sum((h for _, h in dims), Fraction(0)))


def placement_box(instance: ProblemInstance, rotate_all: bool = False) -> tuple[Fraction, Fraction]:
    """Region every block position is confined to.

    Without rotation this is W x H.  When blocks may turn, a row of turned
    blocks can be wider than W (and a column taller than H), so the box is
    R x R with R the larger of the two sums of effective sides when every
    rotatable block contributes its longer side.  R >= M = max(W, H).
    """
    bounds = big_m_params(instance)
    if instance.mode is not Mode.CASE2 and not rotate_all:
        return bounds.W, bounds.H
    across = down = Fraction(0)
    for b in instance.blocks:
        w, h = b.sizing_dims()
        if b.kind is BlockKind.ROTATABLE or (rotate_all and b.kind is BlockKind.HARD):
            w = h = max(w, h)
        across += w
        down += h
    side = max(bounds.M, across, down)
    return side, side


class Rect(NamedTuple):
    x: Fraction
    y: Fraction
    w: Fraction
    h: Fraction


def rects_disjoint(a: Sequence, b: Sequence) -> bool:
    """True when the rectangles ``(x, y, w, h)`` share at most boundary."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return (ax + aw <= bx or ay + ah <= by
            or ax >= bx + bw or ay >= by + bh)


@dataclass(frozen=True)
class PlacedBlock:
    id: str
    x: Fraction
    y: Fraction
    w: Fraction
    h: Fraction
    rotated: bool = False

    @property
    def rect(self) -> Rect:
        return Rect(self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class Placement:
    instance_name: str
    region_c: Fraction
    region_d: Fraction
    entries: tuple[PlacedBlock, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def area(self) -> Fraction:
        return self.region_c * self.region_d

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def entry(self, block_id: str) -> PlacedBlock:
        for e in self.entries:
            if e.id == block_id:
                return e
        raise KeyError(block_id)


@dataclass(frozen=True)
class SolveReport:
    instance_name: str
    block_count: int
    area: Fraction | None
    total_block_area: Fraction
    dead_space_pct: Fraction | None
    wall_time: float
    solver_queries: int
    status: Status
    strategy: str = ""

    @classmethod
    def from_placement(cls, placement: Placement | None, instance: ProblemInstance,
                       status: Status, wall_time: float, queries: int,
                       strategy: str = "") -> "SolveReport":
        total = instance.total_block_area
        if placement is None:
            return cls(instance.name, len(instance.blocks), None, total, None,
                       wall_time, queries, status, strategy)
        area = placement.area
        return cls(instance.name, len(instance.blocks), area, total,
                   100 * (area - total) / area, wall_time, queries, status, strategy)


def stack_diagonally(blocks: Iterable[Block]) -> list[Rect]:
    """Every block strictly up-and-right of the previous one; fits in W x H."""
    out, x, y = [], Fraction(0), Fraction(0)
    for b in blocks:
        out.append(Rect(x, y, b.width, b.height))
        x += b.width
        y += b.height
    return out
