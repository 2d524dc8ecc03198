"""Placement files.

    placement <instance> region <c> <d>
    <id> <x> <y> <w> <h> <rotated 0|1>

Non-integral values are written as ``p/q`` so a write/read/write cycle is
byte-identical.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FormatError
from .model import PlacedBlock, Placement, format_rational


def write_placement(placement: Placement) -> str:
    f = format_rational
    lines = [f"placement {placement.instance_name} region {f(placement.region_c)} {f(placement.region_d)}"]
    for e in placement.entries:
        lines.append(f"{e.id} {f(e.x)} {f(e.y)} {f(e.w)} {f(e.h)} {int(e.rotated)}")
    return "\n".join(lines) + "\n"


def read_placement(text: str) -> Placement:
    header = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if header is None:
                if len(parts) != 5 or parts[0] != "placement" or parts[2] != "region":
                    raise FormatError(lineno, "expected 'placement <name> region <c> <d>'")
                header = (parts[1], Fraction(parts[3]), Fraction(parts[4]))
                continue
            if len(parts) != 6 or parts[5] not in ("0", "1"):
                raise FormatError(lineno, "expected '<id> <x> <y> <w> <h> <0|1>'")
            x, y, w, h = (Fraction(t) for t in parts[1:5])
        except (ValueError, ZeroDivisionError):
            raise FormatError(lineno, f"bad number in {raw!r}") from None
        entries.append(PlacedBlock(parts[0], x, y, w, h, parts[5] == "1"))
    if header is None:
        raise FormatError(1, "empty placement file")
    return Placement(header[0], header[1], header[2], tuple(entries))
