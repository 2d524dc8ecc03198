"""Readers for GSRC bookshelf ``.blocks`` files and the native instance format.

Native format::

    instance <name> mode <case1|case2|case3> sort <int|real>
    hard <id> <w> <h>
    rot  <id> <w> <h>
    soft <id> <area> <amin> <amax>

``#`` starts a comment.  Numbers may be integers, decimals or ``p/q``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (BadDimension, CountMismatch, DuplicateId, FormatError,
                     ModeMismatch, NonRectangularBlock)
from .model import (Block, BlockKind, CoordSort, Mode, ProblemInstance,
                    format_rational)


@dataclass
class ParseDiagnostics:
    source_path: str = "<string>"
    warnings: list[tuple[int, str]] = field(default_factory=list)

    def warn(self, line: int, message: str) -> None:
        self.warnings.append((line, message))


def _number(token: str, line: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(line, f"expected a number, got {token!r}") from None


_COUNT_RE = re.compile(r"^(NumSoftRectangularBlocks|NumHardRectilinearBlocks|NumTerminals)\s*:\s*(\d+)\s*$")
_VERTEX_RE = re.compile(r"\(\s*(-?[\d.]+)\s*,\s*(-?[\d.]+)\s*\)")


def parse_gsrc_blocks(text: str, source_path: str = "<string>",
                      force_aspect: tuple[Fraction, Fraction] | None = None
                      ) -> tuple[list[Block], ParseDiagnostics]:
    """Parse a bookshelf ``.blocks`` file.

    Terminals are skipped with a warning.  Declared block counts must match
    what was parsed; a partial parse is always an error.
    """
    diag = ParseDiagnostics(source_path)
    counts: dict[str, int] = {}
    blocks: list[Block] = []
    seen: set[str] = set()
    n_soft = n_hard = n_term = 0
    header_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen and line.startswith("UCSC"):
            header_seen = True
            continue
        m = _COUNT_RE.match(line)
        if m:
            counts[m.group(1)] = int(m.group(2))
            continue
        parts = line.split()
        if len(parts) < 2:
            raise FormatError(lineno, f"unrecognised line {raw!r}")
        name, kind = parts[0], parts[1]
        if kind == "terminal":
            n_term += 1
            diag.warn(lineno, f"terminal {name!r} skipped")
            continue
        if name in seen:
            raise DuplicateId(name)
        if kind == "softrectangular":
            if len(parts) != 5:
                raise FormatError(lineno, "softrectangular needs <area> <minAspect> <maxAspect>")
            area, amin, amax = (_number(t, lineno) for t in parts[2:5])
            if force_aspect is not None:
                amin, amax = force_aspect
            if area <= 0 or not 0 < amin <= amax:
                raise BadDimension(name)
            blocks.append(Block(name, BlockKind.SOFT, area=area, aspect_min=amin, aspect_max=amax))
            n_soft += 1
        elif kind == "hardrectilinear":
            if len(parts) < 3 or not parts[2].isdigit():
                raise FormatError(lineno, "hardrectilinear needs a vertex count")
            nv = int(parts[2])
            verts = [(_number(a, lineno), _number(b, lineno))
                     for a, b in _VERTEX_RE.findall(" ".join(parts[3:]))]
            if len(verts) != nv or nv < 4:
                raise FormatError(lineno, f"expected {nv} vertices, found {len(verts)}")
            if nv != 4:
                raise NonRectangularBlock(name)
            xs = sorted({v[0] for v in verts})
            ys = sorted({v[1] for v in verts})
            corners = {(x, y) for x in xs for y in ys}
            if len(xs) != 2 or len(ys) != 2 or set(verts) != corners:
                raise NonRectangularBlock(name)
            blocks.append(Block(name, BlockKind.HARD, xs[1] - xs[0], ys[1] - ys[0]))
            n_hard += 1
        else:
            raise FormatError(lineno, f"unknown block type {kind!r}")
        seen.add(name)

    for key, got in (("NumSoftRectangularBlocks", n_soft),
                     ("NumHardRectilinearBlocks", n_hard),
                     ("NumTerminals", n_term)):
        if key in counts and counts[key] != got:
            raise CountMismatch(f"{key} declares {counts[key]}, parsed {got}")
    return blocks, diag


def instance_from_gsrc(name: str, blocks: list[Block], mode: Mode | None) -> ProblemInstance:
    """Build an instance from parsed GSRC blocks.

    Mode is inferred only for all-soft files; otherwise it must be given.
    Under case2 every hard block becomes rotatable.
    """
    all_soft = all(b.is_soft for b in blocks)
    if mode is None:
        if not all_soft:
            raise ModeMismatch(None, "mode must be given for files with hard blocks")
        mode = Mode.CASE3
    if mode is Mode.CASE3:
        if not all_soft:
            raise ModeMismatch(next(b.id for b in blocks if not b.is_soft))
        return ProblemInstance(name, tuple(blocks), mode, CoordSort.REAL)
    hard = []
    for b in blocks:
        if b.is_soft:
            raise ModeMismatch(b.id, f"soft block {b.id!r} needs case3")
        hard.append(Block.rotatable(b.id, b.width, b.height) if mode is Mode.CASE2 else b)
    integral = all(b.width.denominator == 1 and b.height.denominator == 1 for b in hard)
    return ProblemInstance(name, tuple(hard), mode, CoordSort.INT if integral else CoordSort.REAL)


_HEADER_RE = re.compile(r"^instance\s+(\S+)\s+mode\s+(case[123])\s+sort\s+(int|real)$")


def parse_native(text: str) -> ProblemInstance:
    header = None
    blocks: list[Block] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            m = _HEADER_RE.match(" ".join(line.split()))
            if not m:
                raise FormatError(lineno, "expected 'instance <name> mode <case> sort <int|real>'")
            header = m.groups()
            continue
        parts = line.split()
        tag = parts[0]
        if tag in ("hard", "rot"):
            if len(parts) != 4:
                raise FormatError(lineno, f"'{tag}' needs <id> <w> <h>")
            bid = parts[1]
            w, h = _number(parts[2], lineno), _number(parts[3], lineno)
            if w <= 0 or h <= 0:
                raise BadDimension(bid)
            kind = BlockKind.HARD if tag == "hard" else BlockKind.ROTATABLE
            block = Block(bid, kind, w, h)
        elif tag == "soft":
            if len(parts) != 5:
                raise FormatError(lineno, "'soft' needs <id> <area> <amin> <amax>")
            bid = parts[1]
            area, amin, amax = (_number(t, lineno) for t in parts[2:5])
            if area <= 0 or amin <= 0 or amax < amin:
                raise BadDimension(bid)
            block = Block(bid, BlockKind.SOFT, area=area, aspect_min=amin, aspect_max=amax)
        else:
            raise FormatError(lineno, f"unknown line type {tag!r}")
        if bid in seen:
            raise DuplicateId(bid)
        seen.add(bid)
        blocks.append(block)
    if header is None:
        raise FormatError(1, "missing instance header")
    name, mode, sort = header
    return ProblemInstance(name, tuple(blocks), Mode(mode), CoordSort(sort))


def serialize_native(instance: ProblemInstance) -> str:
    lines = [f"instance {instance.name} mode {instance.mode.value} "
             f"sort {instance.coordinate_sort.value}"]
    for b in instance.blocks:
        if b.is_soft:
            lines.append(f"soft {b.id} {format_rational(b.area)} "
                         f"{format_rational(b.aspect_min)} {format_rational(b.aspect_max)}")
        else:
            lines.append(f"{b.kind.value} {b.id} {format_rational(b.width)} {format_rational(b.height)}")
    return "\n".join(lines) + "\n"
