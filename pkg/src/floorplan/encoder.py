"""Compile a ProblemInstance into big-M non-overlap constraints and SMT-LIB2 text.

Pair indicators ``px_i_j``/``py_i_j`` take values in {0, 1}; they share the
coordinate sort so every query stays single-sorted.  Their four combinations
select which of the four relative positions is enforced for the pair:

    (0, 0) i left of j      (1, 0) i right of j
    (0, 1) i below j        (1, 1) i above j

Every other inequality is relaxed by the big-M term and holds vacuously for
any placement inside the W x H (or M x M under rotation) box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Mapping, Union

from .errors import ModeMismatch
from .model import (BigMParams, BlockKind, CoordSort, Mode, ProblemInstance, big_m_params,
                    placement_box)


# -- constraint AST ---------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Sub:
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Mul:
    args: tuple


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


Term = Union[Var, Const, Add, Sub, Mul]
Formula = Union[Cmp, And, Or]

_CMP = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "=": lambda a, b: a == b,
}


def const(v) -> Const:
    return Const(Fraction(v))


def add(*args) -> Add:
    return Add(tuple(args))


def mul(*args) -> Mul:
    return Mul(tuple(args))


def le(a, b) -> Cmp:
    return Cmp("<=", a, b)


def ge(a, b) -> Cmp:
    return Cmp(">=", a, b)


def evaluate(node, env: Mapping[str, Fraction]):
    """Exact evaluation of a term (Fraction) or formula (bool)."""
    if isinstance(node, Var):
        return Fraction(env[node.name])
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Add):
        return sum((evaluate(a, env) for a in node.args), Fraction(0))
    if isinstance(node, Sub):
        return evaluate(node.lhs, env) - evaluate(node.rhs, env)
    if isinstance(node, Mul):
        out = Fraction(1)
        for a in node.args:
            out *= evaluate(a, env)
        return out
    if isinstance(node, Cmp):
        return _CMP[node.op](evaluate(node.lhs, env), evaluate(node.rhs, env))
    if isinstance(node, And):
        return all(evaluate(a, env) for a in node.args)
    if isinstance(node, Or):
        return any(evaluate(a, env) for a in node.args)
    raise TypeError(f"not a constraint node: {node!r}")


def symbols(node) -> Iterator[str]:
    if isinstance(node, Var):
        yield node.name
    elif isinstance(node, (Add, Mul, And, Or)):
        for a in node.args:
            yield from symbols(a)
    elif isinstance(node, (Sub, Cmp)):
        yield from symbols(node.lhs)
        yield from symbols(node.rhs)


# -- constraint system ------------------------------------------------------

@dataclass(frozen=True)
class Assertion:
    group: str      # pair | boundary | origin | region | cap | area | domain | shape | fix
    formula: Formula
    note: str = ""


@dataclass(frozen=True)
class BlockSymbols:
    index: int
    x: str
    y: str
    z: str | None = None
    w: str | None = None
    h: str | None = None


@dataclass
class ConstraintSystem:
    instance_name: str
    mode: Mode
    coordinate_sort: CoordSort
    bounds: BigMParams
    declarations: list[tuple[str, str]] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)
    symbol_table: dict[str, BlockSymbols] = field(default_factory=dict)
    pair_indicators: list[tuple[str, str, str, str]] = field(default_factory=list)
    region_symbols: tuple[str, str] = ("c", "d")
    nonlinear: bool = False
    block_ids: list[str] = field(default_factory=list)
    box: tuple[Fraction, Fraction] | None = None   # position limits for c and d

    def declare(self, name: str, sort: str) -> Var:
        self.declarations.append((name, sort))
        return Var(name)

    def assert_(self, group: str, formula: Formula, note: str = "") -> None:
        self.assertions.append(Assertion(group, formula, note))

    def sorts(self) -> dict[str, str]:
        return dict(self.declarations)

    def group(self, name: str) -> list[Assertion]:
        return [a for a in self.assertions if a.group == name]

    @property
    def has_int(self) -> bool:
        return any(s == "Int" for _, s in self.declarations)

    @property
    def has_real(self) -> bool:
        return any(s == "Real" for _, s in self.declarations)

    def logic(self, nonlinear: bool | None = None) -> str:
        nl = self.nonlinear if nonlinear is None else nonlinear
        if self.has_int and self.has_real:
            arith = "IRA"
        elif self.has_real:
            arith = "RA"
        else:
            arith = "IA"
        return f"QF_{'N' if nl else 'L'}{arith}"


def _start(instance: ProblemInstance, bounds: BigMParams | None, mode: Mode) -> ConstraintSystem:
    if instance.mode is not mode:
        raise ModeMismatch(None, f"instance {instance.name!r} is {instance.mode.value}, "
                                 f"encoder expects {mode.value}")
    bounds = bounds or big_m_params(instance)
    system = ConstraintSystem(instance.name, mode, instance.coordinate_sort, bounds)
    if mode is Mode.CASE2:
        side = max(bounds.M, placement_box(instance)[0])
        system.box = (side, side)
    else:
        system.box = (bounds.W, bounds.H)
    system.block_ids = instance.ids
    return system


def _coord_sort(instance: ProblemInstance) -> str:
    return "Int" if instance.coordinate_sort is CoordSort.INT else "Real"


def _declare_common(system: ConstraintSystem, instance: ProblemInstance,
                    rotation: bool = False, soft: bool = False) -> tuple[Var, Var]:
    sort = _coord_sort(instance)
    c = system.declare("c", sort)
    d = system.declare("d", sort)
    for k, b in enumerate(instance.blocks, start=1):
        x = system.declare(f"x_{k}", sort)
        y = system.declare(f"y_{k}", sort)
        z = w = h = None
        if rotation:
            z = system.declare(f"z_{k}", sort).name
        if soft:
            w = system.declare(f"w_{k}", "Real").name
            h = system.declare(f"h_{k}", "Real").name
        system.symbol_table[b.id] = BlockSymbols(k, x.name, y.name, z, w, h)
    n = len(instance.blocks)
    for i, j in combinations(range(1, n + 1), 2):
        px = system.declare(f"px_{i}_{j}", sort)
        py = system.declare(f"py_{i}_{j}", sort)
        system.pair_indicators.append((instance.blocks[i - 1].id, instance.blocks[j - 1].id,
                                       px.name, py.name))
    return c, d


def _domain01(system: ConstraintSystem, name: str) -> None:
    v = Var(name)
    if system.coordinate_sort is CoordSort.INT:
        system.assert_("domain", And((le(const(0), v), le(v, const(1)))), name)
    else:
        system.assert_("domain", Or((Cmp("=", v, const(0)), Cmp("=", v, const(1)))), name)


def _pairwise(system: ConstraintSystem, dims, big_x: Fraction, big_y: Fraction) -> None:
    """Four big-M inequalities per unordered pair.

    ``dims`` maps block id to (effective width term, effective height term).
    """
    for id_i, id_j, px_name, py_name in system.pair_indicators:
        si, sj = system.symbol_table[id_i], system.symbol_table[id_j]
        xi, yi, xj, yj = Var(si.x), Var(si.y), Var(sj.x), Var(sj.y)
        wi, hi = dims[id_i]
        wj, hj = dims[id_j]
        px, py = Var(px_name), Var(py_name)
        bx, by = const(big_x), const(big_y)
        note = f"{id_i},{id_j}"
        # i left of j
        system.assert_("pair", le(add(xi, wi), add(xj, mul(bx, add(px, py)))), note)
        # i right of j
        system.assert_("pair", ge(Sub(xi, wj), Sub(xj, mul(bx, add(Sub(const(1), px), py)))), note)
        # i below j
        system.assert_("pair", le(add(yi, hi), add(yj, mul(by, Sub(add(const(1), px), py)))), note)
        # i above j
        system.assert_("pair", ge(Sub(yi, hj), Sub(yj, mul(by, Sub(Sub(const(2), px), py)))), note)
        _domain01(system, px_name)
        _domain01(system, py_name)


def _boundary(system: ConstraintSystem, instance: ProblemInstance, dims, c: Var, d: Var,
              limits: tuple[Fraction, Fraction], region_cap, area_bound) -> None:
    for b in instance.blocks:
        s = system.symbol_table[b.id]
        x, y = Var(s.x), Var(s.y)
        w, h = dims[b.id]
        system.assert_("origin", ge(x, const(0)), b.id)
        system.assert_("origin", ge(y, const(0)), b.id)
        system.assert_("boundary", le(add(x, w), c), b.id)
        system.assert_("boundary", le(add(y, h), d), b.id)
    system.assert_("region", le(c, const(limits[0])), "c")
    system.assert_("region", le(d, const(limits[1])), "d")
    if region_cap is not None:
        c_max, d_max = region_cap
        system.assert_("cap", le(c, const(c_max)), "c")
        system.assert_("cap", le(d, const(d_max)), "d")
    if area_bound is not None:
        system.assert_("area", le(mul(c, d), const(area_bound)), "c*d")
        system.nonlinear = True


def encode_case1(instance: ProblemInstance, bounds: BigMParams | None = None,
                 region_cap=None, area_bound=None) -> ConstraintSystem:
    system = _start(instance, bounds, Mode.CASE1)
    c, d = _declare_common(system, instance)
    dims = {b.id: (const(b.width), const(b.height)) for b in instance.blocks}
    _pairwise(system, dims, system.bounds.W, system.bounds.H)
    _boundary(system, instance, dims, c, d, system.box,
              region_cap, area_bound)
    return system


def encode_case2(instance: ProblemInstance, bounds: BigMParams | None = None,
                 region_cap=None, area_bound=None) -> ConstraintSystem:
    system = _start(instance, bounds, Mode.CASE2)
    c, d = _declare_common(system, instance, rotation=True)
    dims = {}
    for b in instance.blocks:
        z = Var(system.symbol_table[b.id].z)
        w, h = const(b.width), const(b.height)
        not_z = Sub(const(1), z)
        dims[b.id] = (add(mul(z, h), mul(not_z, w)), add(mul(z, w), mul(not_z, h)))
        _domain01(system, z.name)
        if b.kind is BlockKind.HARD:
            system.assert_("fix", Cmp("=", z, const(0)), b.id)
    # one constant for all four inequalities, large enough for any orientation
    big = system.box[0]
    _pairwise(system, dims, big, big)
    _boundary(system, instance, dims, c, d, system.box,
              region_cap, area_bound)
    return system


def encode_case3(instance: ProblemInstance, bounds: BigMParams | None = None,
                 region_cap=None, area_bound=None) -> ConstraintSystem:
    system = _start(instance, bounds, Mode.CASE3)
    c, d = _declare_common(system, instance, soft=True)
    dims = {}
    for b in instance.blocks:
        s = system.symbol_table[b.id]
        w, h = Var(s.w), Var(s.h)
        dims[b.id] = (w, h)
        system.assert_("shape", Cmp(">", w, const(0)), b.id)
        system.assert_("shape", Cmp(">", h, const(0)), b.id)
        system.assert_("shape", Cmp("=", mul(w, h), const(b.area)), b.id)
        system.assert_("shape", ge(h, mul(const(b.aspect_min), w)), b.id)
        system.assert_("shape", le(h, mul(const(b.aspect_max), w)), b.id)
    system.nonlinear = True
    _pairwise(system, dims, system.bounds.W, system.bounds.H)
    _boundary(system, instance, dims, c, d, system.box,
              region_cap, area_bound)
    return system


ENCODERS = {Mode.CASE1: encode_case1, Mode.CASE2: encode_case2, Mode.CASE3: encode_case3}


def encode(instance: ProblemInstance, bounds: BigMParams | None = None,
           region_cap=None, area_bound=None) -> ConstraintSystem:
    return ENCODERS[instance.mode](instance, bounds, region_cap, area_bound)


# -- SMT-LIB2 emission ------------------------------------------------------

def _fmt_const(value: Fraction, real: bool) -> str:
    if real:
        num = f"{abs(value.numerator)}.0"
        text = num if value.denominator == 1 else f"(/ {num} {value.denominator}.0)"
    else:
        if value.denominator != 1:
            raise ValueError(f"non-integral constant {value} in an integer system")
        text = str(abs(value.numerator))
    return f"(- {text})" if value < 0 else text


class _Printer:
    def __init__(self, sorts: dict[str, str], real: bool):
        self.sorts = sorts
        self.real = real

    def __call__(self, node) -> str:
        if isinstance(node, Var):
            if self.real and self.sorts[node.name] == "Int":
                return f"(to_real {node.name})"
            return node.name
        if isinstance(node, Const):
            return _fmt_const(node.value, self.real)
        if isinstance(node, Add):
            return "(+ " + " ".join(map(self, node.args)) + ")"
        if isinstance(node, Sub):
            return f"(- {self(node.lhs)} {self(node.rhs)})"
        if isinstance(node, Mul):
            return "(* " + " ".join(map(self, node.args)) + ")"
        if isinstance(node, Cmp):
            return f"({node.op} {self(node.lhs)} {self(node.rhs)})"
        if isinstance(node, And):
            return "(and " + " ".join(map(self, node.args)) + ")"
        if isinstance(node, Or):
            return "(or " + " ".join(map(self, node.args)) + ")"
        raise TypeError(f"cannot print {node!r}")


MINIMIZE_PRODUCT = "minimize-product"


def emit_smtlib(system: ConstraintSystem, logic_hint: str | None = None,
                objective: str | None = None) -> str:
    """Serialize to SMT-LIB2; byte-identical for equal inputs."""
    real = system.coordinate_sort is CoordSort.REAL
    sorts = system.sorts()
    pr = _Printer(sorts, real)
    logic = logic_hint or system.logic(nonlinear=system.nonlinear or objective == MINIMIZE_PRODUCT)
    lines = [f"(set-logic {logic})"]
    for name in sorted(sorts):
        lines.append(f"(declare-const {name} {sorts[name]})")
    for a in system.assertions:
        lines.append(f"(assert {pr(a.formula)})")
    if objective == MINIMIZE_PRODUCT:
        c, d = system.region_symbols
        lines.append(f"(minimize (* {c} {d}))")
    lines.append("(check-sat)(get-model)")
    return "\n".join(lines) + "\n"
