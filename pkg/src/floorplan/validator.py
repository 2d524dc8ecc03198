"""Geometry-only checks on placements, dead-space metrics and exhaustive oracles.

Nothing here reads a ConstraintSystem or big-M constant: a placement is judged
purely on its coordinates and the instance's block data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import InstanceMismatch, OracleTooLarge
from .model import (Block, BlockKind, Mode, PlacedBlock, Placement, ProblemInstance,
                    big_m_params, placement_box)

REAL_TOL = Fraction(1, 10**6)


@dataclass(frozen=True)
class Violation:
    rule: str           # Overlap | Boundary | Rotation | Dimension | Area | Aspect
    ids: tuple[str, ...]
    margin: Fraction
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule} {','.join(self.ids)} margin={float(self.margin):.6g} {self.detail}".rstrip()


def default_tol(instance: ProblemInstance) -> Fraction:
    return Fraction(0) if instance.is_integral else REAL_TOL


def _overlap(a: PlacedBlock, b: PlacedBlock) -> Fraction:
    """Smallest penetration depth; <= 0 means the rectangles are disjoint."""
    ox = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    oy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    return min(ox, oy)


def validate(placement: Placement, instance: ProblemInstance,
             tol: Fraction | None = None) -> list[Violation]:
    if sorted(placement.ids) != sorted(instance.ids) or len(set(placement.ids)) != len(placement.ids):
        raise InstanceMismatch(f"placement {placement.instance_name!r} does not cover "
                               f"exactly the blocks of {instance.name!r}")
    tol = default_tol(instance) if tol is None else Fraction(tol)
    c, d = placement.region_c, placement.region_d
    slack = tol * max(abs(c), abs(d), Fraction(1))
    out: list[Violation] = []

    for e in placement.entries:
        b = instance.block(e.id)
        if e.w <= 0 or e.h <= 0:
            out.append(Violation("Dimension", (e.id,), -min(e.w, e.h), "non-positive size"))
            continue
        over = max(-e.x, -e.y, e.x + e.w - c, e.y + e.h - d)
        if over > slack:
            out.append(Violation("Boundary", (e.id,), over))
        out.extend(_shape_violations(e, b, instance.mode, tol))

    for a, b in combinations(placement.entries, 2):
        depth = _overlap(a, b)
        if depth > slack:
            out.append(Violation("Overlap", (a.id, b.id), depth))
    return out


def _shape_violations(e: PlacedBlock, b: Block, mode: Mode, tol: Fraction) -> list[Violation]:
    if b.kind is BlockKind.SOFT:
        out = []
        err = abs(e.w * e.h - b.area)
        if err > tol * b.area:
            out.append(Violation("Area", (e.id,), err))
        lo, hi = b.aspect_min * e.w, b.aspect_max * e.w
        if e.h < lo * (1 - tol):
            out.append(Violation("Aspect", (e.id,), lo - e.h, "below band"))
        if e.h > hi * (1 + tol):
            out.append(Violation("Aspect", (e.id,), e.h - hi, "above band"))
        return out
    upright = (e.w, e.h) == (b.width, b.height)
    turned = (e.w, e.h) == (b.height, b.width)
    if not (upright or turned):
        return [Violation("Dimension", (e.id,), abs(e.w - b.width) + abs(e.h - b.height))]
    if mode is Mode.CASE2 and b.kind is BlockKind.ROTATABLE:
        if b.width != b.height and e.rotated != turned:
            return [Violation("Rotation", (e.id,), Fraction(0), "flag disagrees with dimensions")]
        return []
    if not upright or e.rotated:
        return [Violation("Rotation", (e.id,), Fraction(0), "block may not rotate")]
    return []


def dead_space(placement: Placement, instance: ProblemInstance) -> tuple[Fraction, Fraction]:
    area = placement.region_c * placement.region_d
    return area, 100 * (area - instance.total_block_area) / area


# -- exhaustive oracles -----------------------------------------------------

def _orientations(b: Block, allow_rotation: bool) -> list[tuple[int, int]]:
    w, h = int(b.width), int(b.height)
    if allow_rotation and b.kind is not BlockKind.HARD and w != h:
        return [(w, h), (h, w)]
    return [(w, h)]


def brute_force_optimum(instance: ProblemInstance, allow_rotation: bool
                        ) -> tuple[Fraction, Placement]:
    """Minimal bounding-box area over every integer placement, with a witness.

    Positions range over the whole ``[0, W] x [0, H]`` box, or the larger
    ``placement_box`` when rotation is allowed.  Under ``allow_rotation`` Hard
    blocks of a case2 instance keep their orientation; a case1 instance has
    every block treated as rotatable.
    """
    blocks = instance.blocks
    if any(b.is_soft or b.width.denominator != 1 or b.height.denominator != 1 for b in blocks):
        raise OracleTooLarge("oracle needs integer hard dimensions")
    rotate_all = allow_rotation and instance.mode is Mode.CASE1
    if allow_rotation:
        cap_w, cap_h = placement_box(instance, rotate_all)
    else:
        bounds = big_m_params(instance)
        cap_w, cap_h = bounds.W, bounds.H
    cap_w, cap_h = int(cap_w), int(cap_h)
    if len(blocks) > 5 or cap_w * cap_h > 10_000:
        raise OracleTooLarge(f"{len(blocks)} blocks in a {cap_w}x{cap_h} box")

    order = sorted(range(len(blocks)), key=lambda k: -blocks[k].block_area)
    shapes = []
    for k in order:
        b = blocks[k]
        if rotate_all:
            b = Block.rotatable(b.id, b.width, b.height)
        shapes.append(_orientations(b, allow_rotation))

    # cheap valid incumbents: everything in one row, or in one column
    best = [cap_w * cap_h + 1, None]
    for row in (True, False):
        choice = [min(s, key=lambda wh: wh[1] if row else wh[0]) for s in shapes]
        pos, off = [], 0
        for w, h in choice:
            pos.append((off, 0, w, h) if row else (0, off, w, h))
            off += w if row else h
        bw = max(p[0] + p[2] for p in pos)
        bh = max(p[1] + p[3] for p in pos)
        if bw <= cap_w and bh <= cap_h and bw * bh < best[0]:
            best[:] = [bw * bh, list(pos)]

    n = len(shapes)
    placed: list[tuple[int, int, int, int]] = []

    def free(x, y, w, h):
        for px, py, pw, ph in placed:
            if x < px + pw and px < x + w and y < py + ph and py < y + h:
                return False
        return True

    def search(k, bw, bh, touch_x, touch_y):
        if k == n:
            if touch_x and touch_y and bw * bh < best[0]:
                best[:] = [bw * bh, list(placed)]
            return
        last = k == n - 1
        for w, h in shapes[k]:
            x_range = [0] if (last and not touch_x) else range(cap_w - w + 1)
            y_range = [0] if (last and not touch_y) else range(cap_h - h + 1)
            for y in y_range:
                nh = max(bh, y + h)
                if max(bw, w) * nh >= best[0]:
                    break
                for x in x_range:
                    nw = max(bw, x + w)
                    if nw * nh >= best[0]:
                        break
                    if free(x, y, w, h):
                        placed.append((x, y, w, h))
                        search(k + 1, nw, nh, touch_x or x == 0, touch_y or y == 0)
                        placed.pop()

    search(0, 0, 0, False, False)
    area, rects = best
    entries = {}
    for k, (x, y, w, h) in zip(order, rects):
        b = blocks[k]
        turned = (w, h) != (b.width, b.height)
        entries[b.id] = PlacedBlock(b.id, Fraction(x), Fraction(y), Fraction(w), Fraction(h), turned)
    bw = max(r[0] + r[2] for r in rects)
    bh = max(r[1] + r[3] for r in rects)
    witness = Placement(instance.name, Fraction(bw), Fraction(bh),
                        tuple(entries[b.id] for b in blocks))
    return Fraction(area), witness


def _pareto(shapes):
    out = []
    for w, h in sorted(set(shapes)):
        if not out or h < out[-1][1]:
            out.append((w, h))
    return out


def slicing_optimum(blocks, allow_rotation: bool = False) -> Fraction:
    """Best bounding-box area over all slicing floorplans of ``blocks``.

    Every subset keeps its Pareto front of (width, height) shapes; a subset's
    shapes come from every split into two parts joined side by side or on top
    of each other.  Any slicing floorplan is a valid packing, so the result
    bounds the true optimum from above.
    """
    blocks = list(blocks)
    n = len(blocks)
    if n > 12:
        raise OracleTooLarge(f"slicing enumeration over {n} blocks")
    front: dict[int, list] = {}
    for k, b in enumerate(blocks):
        opts = [(b.width, b.height)]
        if allow_rotation and b.kind is not BlockKind.HARD:
            opts.append((b.height, b.width))
        front[1 << k] = _pareto(opts)
    for mask in range(1, 1 << n):
        if mask in front:
            continue
        shapes = []
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if sub < rest:
                for w1, h1 in front[sub]:
                    for w2, h2 in front[rest]:
                        shapes.append((w1 + w2, max(h1, h2)))
                        shapes.append((max(w1, w2), h1 + h2))
            sub = (sub - 1) & mask
        front[mask] = _pareto(shapes)
    return min(w * h for w, h in front[(1 << n) - 1])
