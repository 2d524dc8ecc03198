"""External SMT solver driver and area-minimization strategies.

One solver process per query.  Scripts go to the solver's stdin (or a temp
file), verdict and ``(get-model)`` output come back on stdout.  Every query
can be persisted as ``<dir>/<n>.smt2`` / ``<n>.out`` for audit.
"""

from __future__ import annotations

import enum
import logging
import math
import os
import re
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .encoder import MINIMIZE_PRODUCT, ConstraintSystem, emit_smtlib, encode
from .errors import (BackendUnavailable, EncodingBug, IncompleteModel, ProtocolError,
                     StrategyError)
from .model import (BlockKind, Mode, PlacedBlock, Placement, ProblemInstance, SolveReport,
                    Status, big_m_params, placement_box)
from .validator import validate

log = logging.getLogger(__name__)


class Dialect(enum.Enum):
    PLAIN = "plain"
    OPTIMIZING = "optimizing"


class Strategy(enum.Enum):
    NATIVE = "native"
    BISECT = "bisect"
    SWEEP = "sweep"


@dataclass(frozen=True)
class BackendConfig:
    executable: str = "z3"
    dialect: Dialect = Dialect.PLAIN
    timeout: float = 60.0
    extra_args: tuple[str, ...] = ()
    input_mode: str = "stdin"   # or "file"
    jobs: int = 1

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.input_mode not in ("stdin", "file"):
            raise ValueError(f"unknown input mode {self.input_mode!r}")

    @property
    def is_z3(self) -> bool:
        return os.path.basename(self.executable).startswith("z3")

    def command(self, script_path: str | None = None) -> list[str]:
        cmd = [self.executable]
        if self.is_z3:
            # decimal output keeps algebraic numbers (soft blocks) parseable
            cmd += ["-smt2", "pp.decimal=true", "pp.decimal_precision=30"]
        cmd += list(self.extra_args)
        if script_path is not None:
            cmd.append(script_path)
        elif self.is_z3:
            cmd.append("-in")
        return cmd


# -- single queries ---------------------------------------------------------

class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"
    TIMEOUT = "timeout"


@dataclass
class QueryResult:
    verdict: Verdict
    model_text: str = ""
    raw: str = ""
    wall_time: float = 0.0


def run_query(script: str, config: BackendConfig) -> QueryResult:
    exe = shutil.which(config.executable) or (
        config.executable if os.path.isfile(config.executable) else None)
    if exe is None:
        raise BackendUnavailable(f"solver executable {config.executable!r} not found")
    tmp = None
    try:
        if config.input_mode == "file":
            fd, tmp = tempfile.mkstemp(suffix=".smt2")
            with os.fdopen(fd, "w") as fh:
                fh.write(script)
            cmd, stdin = config.command(tmp), None
        else:
            cmd, stdin = config.command(), script
        start = time.perf_counter()
        try:
            proc = subprocess.run(cmd, input=stdin, capture_output=True, text=True,
                                  timeout=config.timeout)
        except subprocess.TimeoutExpired as exc:
            out = exc.stdout.decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
            return QueryResult(Verdict.TIMEOUT, raw=out, wall_time=time.perf_counter() - start)
        except OSError as exc:
            raise BackendUnavailable(f"cannot start {config.executable!r}: {exc}") from exc
        elapsed = time.perf_counter() - start
    finally:
        if tmp:
            os.unlink(tmp)
    return parse_output(proc.stdout + proc.stderr, elapsed)


def parse_output(raw: str, wall_time: float = 0.0) -> QueryResult:
    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    if not lines:
        raise ProtocolError("empty solver output", raw)
    head = lines[0]
    if head == "sat":
        model = raw.split("sat", 1)[1].strip()
        if "(error" in model:
            raise ProtocolError("solver reported an error", raw)
        return QueryResult(Verdict.SAT, model, raw, wall_time)
    if head == "unsat":
        return QueryResult(Verdict.UNSAT, raw=raw, wall_time=wall_time)
    if head == "unknown":
        return QueryResult(Verdict.UNKNOWN, raw=raw, wall_time=wall_time)
    if head == "timeout":
        return QueryResult(Verdict.TIMEOUT, raw=raw, wall_time=wall_time)
    raise ProtocolError(f"unexpected solver output: {head[:200]}", raw)


# -- model parsing ----------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|\|[^|]*\||\"(?:[^\"]|\"\")*\"|[^\s()]+")


def parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in _TOKEN.findall(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ProtocolError("unbalanced ')' in solver output", text)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok[1:-1] if tok.startswith("|") else tok)
    if len(stack) != 1:
        raise ProtocolError("unbalanced '(' in solver output", text)
    return stack[0]


def parse_value(expr) -> Fraction:
    """Exact rational from an SMT-LIB value; a trailing ``?`` marks z3 decimals."""
    if isinstance(expr, str):
        tok = expr.rstrip("?")
        if tok in ("true", "false"):
            return Fraction(int(tok == "true"))
        try:
            return Fraction(tok)
        except ValueError:
            raise ProtocolError(f"non-numeric model value {expr!r}") from None
    if isinstance(expr, list) and expr:
        op, args = expr[0], expr[1:]
        if op == "-" and len(args) == 1:
            return -parse_value(args[0])
        if op == "/" and len(args) == 2:
            return parse_value(args[0]) / parse_value(args[1])
        if op == "to_real" and len(args) == 1:
            return parse_value(args[0])
    raise ProtocolError(f"non-numeric model value {expr!r}")


def parse_model(model_text: str) -> dict[str, Fraction]:
    values: dict[str, Fraction] = {}

    def walk(node):
        if not isinstance(node, list):
            return
        if len(node) == 5 and node[0] == "define-fun" and node[2] == []:
            values[node[1]] = parse_value(node[4])
            return
        for child in node:
            walk(child)

    walk(parse_sexprs(model_text))
    return values


def extract_placement(model: str | dict, system: ConstraintSystem,
                      instance: ProblemInstance) -> Placement:
    values = parse_model(model) if isinstance(model, str) else model

    def get(sym):
        if sym not in values:
            raise IncompleteModel(sym)
        return values[sym]

    entries = []
    for b in instance.blocks:
        s = system.symbol_table[b.id]
        x, y = get(s.x), get(s.y)
        rotated = False
        if b.is_soft:
            w, h = get(s.w), get(s.h)
        else:
            w, h = b.width, b.height
            if s.z is not None:
                z = get(s.z)
                if z not in (0, 1):
                    raise ProtocolError(f"rotation indicator {s.z} = {z} is not 0/1")
                rotated = z == 1
                if rotated:
                    w, h = h, w
        entries.append(PlacedBlock(b.id, x, y, w, h, rotated))
    c_sym, d_sym = system.region_symbols
    return Placement(instance.name, get(c_sym), get(d_sym), tuple(entries))


def tighten(placement: Placement) -> Placement:
    """Shrink the region to the blocks' bounding box (never invalidates)."""
    c = max(e.x + e.w for e in placement.entries)
    d = max(e.y + e.h for e in placement.entries)
    return Placement(placement.instance_name, c, d, placement.entries)


# -- sessions ---------------------------------------------------------------

@dataclass
class _Session:
    instance: ProblemInstance
    config: BackendConfig
    transcript_dir: Path | None = None
    queries: int = 0
    timed_out: bool = False
    incumbent: Placement | None = None
    _sat_bounds: list = field(default_factory=list)
    _unsat_bounds: list = field(default_factory=list)

    def __post_init__(self):
        if self.transcript_dir is not None:
            self.transcript_dir = Path(self.transcript_dir)
            self.transcript_dir.mkdir(parents=True, exist_ok=True)
            for old in self.transcript_dir.glob("*.smt2"):
                old.unlink()
            for old in self.transcript_dir.glob("*.out"):
                old.unlink()

    def query(self, region_cap=None, area_bound=None, objective=None) -> Placement | Verdict:
        system = encode(self.instance, region_cap=region_cap, area_bound=area_bound)
        script = emit_smtlib(system, objective=objective)
        self.queries += 1
        result = run_query(script, self.config)
        if self.transcript_dir is not None:
            stem = self.transcript_dir / f"{self.queries:04d}"
            stem.with_suffix(".smt2").write_text(script)
            stem.with_suffix(".out").write_text(result.raw)
        log.debug("query %d cap=%s area<=%s -> %s (%.2fs)", self.queries, region_cap,
                  area_bound, result.verdict.value, result.wall_time)
        if result.verdict in (Verdict.TIMEOUT, Verdict.UNKNOWN):
            self.timed_out = True
            return result.verdict
        if result.verdict is Verdict.UNSAT:
            return Verdict.UNSAT
        placement = tighten(extract_placement(result.model_text, system, self.instance))
        problems = validate(placement, self.instance)
        if problems:
            raise EncodingBug(f"solver model fails validation: {problems[0]}")
        if self.better(placement):
            self.incumbent = placement
        return placement

    def better(self, p: Placement) -> bool:
        if self.incumbent is None:
            return True
        q = self.incumbent
        return (p.area, p.region_c, p.region_d) < (q.area, q.region_c, q.region_d)

    def record(self, key, bound, sat: bool) -> None:
        """Feasibility must be monotone in the bound; anything else is a bug."""
        if sat:
            self._sat_bounds.append((key, bound))
        else:
            self._unsat_bounds.append((key, bound))
        for k1, s in self._sat_bounds:
            for k2, u in self._unsat_bounds:
                if k1 == k2 and u >= s:
                    raise EncodingBug(f"bound {u} unsat although {s} was sat ({key})")


def default_strategy(instance: ProblemInstance, config: BackendConfig) -> Strategy:
    if config.dialect is Dialect.OPTIMIZING:
        return Strategy.NATIVE
    if instance.is_integral:
        return Strategy.SWEEP
    return Strategy.BISECT


def default_tolerance(instance: ProblemInstance) -> Fraction:
    return instance.total_block_area / 1000


def effective_widths(instance: ProblemInstance) -> list[list[Fraction]]:
    out = []
    for b in instance.blocks:
        opts = {b.width}
        if instance.mode is Mode.CASE2 and b.kind is BlockKind.ROTATABLE:
            opts.add(b.height)
        out.append(sorted(opts))
    return out


def candidate_widths(instance: ProblemInstance, limit: int = 4096) -> list[Fraction] | None:
    """Distinct subset sums of effective widths up to the region limit.

    Returns None when the set grows past ``limit``.
    """
    cap = placement_box(instance)[0]
    sums = {Fraction(0)}
    for opts in effective_widths(instance):
        sums |= {s + w for s in sums for w in opts if s + w <= cap}
        if len(sums) > limit + 1:
            return None
    sums.discard(Fraction(0))
    return sorted(sums)


def _min_height_at(instance: ProblemInstance, width: Fraction) -> Fraction | None:
    """Lower bound on region height for a given region width; None if nothing fits."""
    lo = Fraction(0)
    for b in instance.blocks:
        fits = [b.height] if b.width <= width else []
        if instance.mode is Mode.CASE2 and b.kind is BlockKind.ROTATABLE and b.height <= width:
            fits.append(b.width)
        if not fits:
            return None
        lo = max(lo, min(fits))
    return max(lo, Fraction(math.ceil(instance.total_block_area / width)))


def _width_sweep(session: _Session, width_limit: int) -> bool:
    """Returns False when the candidate set is too large for a sweep."""
    instance = session.instance
    widths = candidate_widths(instance, width_limit)
    if widths is None:
        return False
    h_cap = placement_box(instance)[1]
    root = math.sqrt(instance.total_block_area)
    # near-square widths first: a good early incumbent prunes the rest
    for c in sorted(widths, key=lambda w: (abs(float(w) - root), w)):
        lo = _min_height_at(instance, c)
        if lo is None:
            continue
        hi = h_cap
        while True:
            best = session.incumbent
            if best is not None:
                # room left only for (area, c, d) lexicographically smaller
                limit = Fraction(math.ceil(best.area / c) - 1)
                if c < best.region_c and (best.area / c).denominator == 1:
                    limit = best.area / c
                hi = min(hi, limit)
            if lo > hi:
                break
            mid = (lo + hi) // 2
            got = session.query(region_cap=(c, mid))
            if isinstance(got, Placement):
                session.record(c, mid, True)
                hi = min(hi, got.region_d - 1)
            else:
                if got is Verdict.UNSAT:
                    session.record(c, mid, False)
                lo = mid + 1
    return True


def _area_bisection(session: _Session, tolerance: Fraction) -> None:
    instance = session.instance
    bounds = big_m_params(instance)
    # the diagonal staircase of unrotated blocks always fits in W x H
    upper = bounds.W * bounds.H
    lower = instance.total_block_area
    integral = instance.is_integral
    got = session.query(area_bound=upper)
    if got is Verdict.UNSAT:
        raise EncodingBug(f"W*H = {upper} reported infeasible")
    if not isinstance(got, Placement):
        return
    session.record("A", upper, True)
    hi = got.area
    lo = lower
    while (lo < hi) if integral else (hi - lo > tolerance):
        mid = (lo + hi) // 2 if integral else (lo + hi) / 2
        got = session.query(area_bound=mid)
        if isinstance(got, Placement):
            session.record("A", mid, True)
            hi = min(hi, got.area)
        else:
            if got is Verdict.UNSAT:
                session.record("A", mid, False)
            lo = mid + 1 if integral else mid


def _native(session: _Session) -> None:
    got = session.query(objective=MINIMIZE_PRODUCT)
    if got is Verdict.UNSAT:
        raise EncodingBug("optimizing query reported infeasible")


def minimize_area(instance: ProblemInstance, strategy: Strategy | None = None,
                  config: BackendConfig | None = None, tolerance: Fraction | None = None,
                  transcript_dir: str | Path | None = None, width_limit: int = 4096
                  ) -> tuple[Placement | None, SolveReport]:
    """Smallest-area region holding every block without overlap.

    The returned placement (when there is one) always passes ``validate``.
    Status is Optimal only if no query timed out or came back unknown.
    """
    config = config or BackendConfig()
    strategy = strategy or default_strategy(instance, config)
    if strategy is Strategy.SWEEP and not instance.is_integral:
        raise StrategyError("width sweep needs integer coordinates")
    if strategy is Strategy.NATIVE and config.dialect is not Dialect.OPTIMIZING:
        raise StrategyError("native objective needs an optimizing backend")
    tolerance = Fraction(tolerance) if tolerance is not None else default_tolerance(instance)
    if tolerance <= 0 and not instance.is_integral:
        raise ValueError("tolerance must be positive for real-valued instances")

    session = _Session(instance, config, transcript_dir)
    start = time.perf_counter()
    used = strategy
    if strategy is Strategy.NATIVE:
        _native(session)
    elif strategy is Strategy.SWEEP:
        if not _width_sweep(session, width_limit):
            used = Strategy.BISECT
            _area_bisection(session, tolerance)
    else:
        _area_bisection(session, tolerance)
    elapsed = time.perf_counter() - start
    if session.incumbent is None and not session.timed_out:
        # the diagonal staircase fits in W x H, so some query must have been sat
        raise EncodingBug(f"no feasible region found for {instance.name!r}")

    if session.incumbent is None:
        status = Status.TIMEOUT if session.timed_out else Status.INFEASIBLE
    else:
        status = Status.FEASIBLE if session.timed_out else Status.OPTIMAL
    report = SolveReport.from_placement(session.incumbent, instance, status, elapsed,
                                        session.queries, used.value)
    return session.incumbent, report
