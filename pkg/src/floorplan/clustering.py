"""Two-level solving for instances too large for a single query.

Blocks are split into area-balanced clusters, each cluster is packed on its
own, and the packed clusters are then placed as fixed super-blocks.
"""

from __future__ import annotations

import enum
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import EncodingBug
from .model import (Block, BlockKind, CoordSort, Mode, PlacedBlock, Placement,
                    ProblemInstance, SolveReport, Status)
from .solver import BackendConfig, Dialect, Strategy, minimize_area, tighten
from .validator import validate


class Recompose(enum.Enum):
    CASE1 = "case1"
    CASE2 = "case2"


@dataclass(frozen=True)
class ClusterPlan:
    clusters: tuple[tuple[str, ...], ...]
    threshold: int = 30
    recompose: Recompose = Recompose.CASE1


def plan_clusters(instance: ProblemInstance, threshold: int = 30, seed: int = 0,
                  recompose: Recompose | None = None) -> ClusterPlan:
    """Greedy balance: largest block first, into the lightest cluster with room.

    ``seed`` only decides the order among blocks of equal area.
    """
    if threshold < 2:
        raise ValueError("cluster threshold must be at least 2")
    if recompose is None:
        recompose = Recompose.CASE2 if instance.mode is Mode.CASE2 else Recompose.CASE1
    n = len(instance.blocks)
    k = math.ceil(n / threshold)
    order = list(range(n))
    if seed:
        random.Random(seed).shuffle(order)
    order.sort(key=lambda i: -instance.blocks[i].block_area)

    members: list[list[int]] = [[] for _ in range(k)]
    load = [Fraction(0)] * k
    for i in order:
        open_ = [j for j in range(k) if len(members[j]) < threshold]
        j = min(open_, key=lambda j: (load[j], j))
        members[j].append(i)
        load[j] += instance.blocks[i].block_area
    clusters = tuple(tuple(instance.blocks[i].id for i in sorted(m)) for m in members if m)
    return ClusterPlan(clusters, threshold, recompose)


def _sub_instance(instance: ProblemInstance, ids, name: str) -> ProblemInstance:
    wanted = set(ids)
    return ProblemInstance(name, tuple(b for b in instance.blocks if b.id in wanted),
                           instance.mode, instance.coordinate_sort)


def _pick_strategy(strategy: Strategy | None, inst: ProblemInstance,
                   config: BackendConfig) -> Strategy | None:
    if strategy is Strategy.SWEEP and not inst.is_integral:
        return Strategy.BISECT
    if strategy is Strategy.NATIVE and config.dialect is not Dialect.OPTIMIZING:
        return None
    return strategy


def compose(top: Placement, parts: dict[str, Placement], name: str) -> Placement:
    """Translate each cluster's blocks by its super-block position.

    A rotated super-block turns its local frame a quarter turn:
    ``(x, y) -> (y, c_cluster - x - w)`` with width and height swapped.
    """
    entries = []
    for sb in top.entries:
        local = parts[sb.id]
        for e in local.entries:
            if sb.rotated:
                entries.append(PlacedBlock(e.id, sb.x + e.y, sb.y + local.region_c - e.x - e.w,
                                           e.h, e.w, not e.rotated))
            else:
                entries.append(PlacedBlock(e.id, sb.x + e.x, sb.y + e.y, e.w, e.h, e.rotated))
    return Placement(name, top.region_c, top.region_d, tuple(entries))


def solve_clustered(instance: ProblemInstance, plan: ClusterPlan,
                    strategy: Strategy | None = None, config: BackendConfig | None = None,
                    tolerance: Fraction | None = None, transcript_dir: str | Path | None = None
                    ) -> tuple[Placement | None, SolveReport]:
    config = config or BackendConfig()
    if len(plan.clusters) == 1:
        return minimize_area(instance, _pick_strategy(strategy, instance, config), config,
                             tolerance, transcript_dir)
    start = time.perf_counter()
    root = Path(transcript_dir) if transcript_dir is not None else None

    subs = [_sub_instance(instance, ids, f"{instance.name}.c{k}")
            for k, ids in enumerate(plan.clusters)]

    def run(k):
        sub = subs[k]
        return minimize_area(sub, _pick_strategy(strategy, sub, config), config, tolerance,
                             root / f"cluster-{k}" if root else None)

    with ThreadPoolExecutor(max_workers=max(1, config.jobs)) as pool:
        results = list(pool.map(run, range(len(subs))))

    queries = sum(r.solver_queries for _, r in results)
    if any(p is None for p, _ in results):
        worst = next(r for p, r in results if p is None)
        if worst.status is Status.INFEASIBLE:
            raise EncodingBug(f"cluster {worst.instance_name} reported infeasible")
        return None, SolveReport.from_placement(None, instance, Status.TIMEOUT,
                                                time.perf_counter() - start, queries, "clustered")

    parts: dict[str, Placement] = {}
    supers = []
    for k, ((placement, _), sub) in enumerate(zip(results, subs)):
        sid = f"cluster{k}"
        parts[sid] = placement
        can_turn = (plan.recompose is Recompose.CASE2
                    and all(b.kind is BlockKind.ROTATABLE for b in sub.blocks))
        kind = BlockKind.ROTATABLE if can_turn else BlockKind.HARD
        supers.append(Block(sid, kind, placement.region_c, placement.region_d))
    integral = all(b.width.denominator == 1 and b.height.denominator == 1 for b in supers)
    top_mode = Mode.CASE2 if any(b.kind is BlockKind.ROTATABLE for b in supers) else Mode.CASE1
    top = ProblemInstance(f"{instance.name}.top", tuple(supers), top_mode,
                          CoordSort.INT if integral else CoordSort.REAL)
    top_tol = tolerance if tolerance is not None else top.total_block_area / 1000
    top_placement, top_report = minimize_area(top, _pick_strategy(strategy, top, config), config,
                                              top_tol, root / "top" if root else None)
    queries += top_report.solver_queries
    elapsed = time.perf_counter() - start
    if top_placement is None:
        if top_report.status is Status.INFEASIBLE:
            raise EncodingBug("super-block packing reported infeasible")
        return None, SolveReport.from_placement(None, instance, Status.TIMEOUT, elapsed,
                                                queries, "clustered")

    final = tighten(compose(top_placement, parts, instance.name))
    rank = {bid: i for i, bid in enumerate(instance.ids)}
    final = Placement(final.instance_name, final.region_c, final.region_d,
                      tuple(sorted(final.entries, key=lambda e: rank[e.id])))
    problems = validate(final, instance)
    if problems:
        raise EncodingBug(f"recomposed placement fails validation: {problems[0]}")
    return final, SolveReport.from_placement(final, instance, Status.FEASIBLE, elapsed,
                                             queries, "clustered")
