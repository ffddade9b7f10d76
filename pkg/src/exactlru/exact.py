"""Exact classification via may-hit and may-miss antichain analyses.

For a focus block ``a`` every vertex carries two values:

* may-hit: the minimal sets of blocks that can be younger than ``a`` there
  (an upward-closed family kept as its antichain of minimal members);
* may-miss: ``TOP`` when ``a`` may be uncached, otherwise the maximal sets
  of blocks that can be younger than ``a`` (a downward-closed family), or
  ``BOTTOM`` when nothing has reached the vertex yet.

An access to ``a`` may hit iff the may-hit value at its source is non-empty,
and may miss iff the may-miss value there is ``TOP``.
"""

from __future__ import annotations

import enum
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

from .age import classify_single_set as age_classify_single_set
from .cfg import (
    Block,
    CacheConfig,
    ControlFlowGraph,
    StartKind,
    prune_unreachable,
    slice_for_set,
    used_sets,
)
from .concrete import Classification
from .zdd import Manager, ZddHandle


class MissTag(enum.Enum):
    BOTTOM = "bottom"
    TOP = "top"


BOTTOM = MissTag.BOTTOM
TOP = MissTag.TOP

MayMissValue = Union[MissTag, ZddHandle]


class AnalysisTimeout(RuntimeError):
    pass


class InvariantViolation(RuntimeError):
    pass


# -- may-hit -------------------------------------------------------------


def may_hit_init(mgr: Manager, kind: StartKind | None) -> ZddHandle:
    return mgr.unit() if kind is StartKind.TOP else mgr.bottom()


def may_hit_transfer(mgr: Manager, value: ZddHandle, label: Block | None, focus: Block, assoc: int) -> ZddHandle:
    if label is None:
        return value
    if label == focus:
        return mgr.unit()
    return mgr.truncate(mgr.add_element_min(value, label), assoc - 1)


def may_hit_join(mgr: Manager, v1: ZddHandle, v2: ZddHandle) -> ZddHandle:
    return mgr.min_union(v1, v2)


# -- may-miss --------------------------------------------------------------


def may_miss_init(kind: StartKind | None) -> MayMissValue:
    return BOTTOM if kind is None else TOP


def may_miss_transfer(
    mgr: Manager, value: MayMissValue, label: Block | None, focus: Block, assoc: int
) -> MayMissValue:
    if label is None:
        return value
    if label == focus:
        return mgr.unit()
    if isinstance(value, MissTag):
        return value
    grown = mgr.add_element_max(value, label)
    return TOP if mgr.has_set_of_size_at_least(grown, assoc) else grown


def may_miss_join(mgr: Manager, v1: MayMissValue, v2: MayMissValue) -> MayMissValue:
    if v1 is BOTTOM or v2 is TOP:
        return v2
    if v2 is BOTTOM or v1 is TOP:
        return v1
    return mgr.max_union(v1, v2)


# -- per-block fixpoint ------------------------------------------------------


@dataclass
class BlockResult:
    focus: Block
    manager: Manager
    may_hit: dict[str, ZddHandle]
    may_miss: dict[str, MayMissValue]
    verdicts: dict[str, tuple[bool, bool]]
    """Edge id -> (may hit, may miss) for every edge accessing the focus."""
    updates: dict[str, int] = field(default_factory=dict)
    """Number of strict value increases per vertex."""

    def hit_sets(self, vertex: str) -> set[frozenset]:
        return set(self.manager.enumerate(self.may_hit[vertex]))

    def miss_sets(self, vertex: str) -> MissTag | set[frozenset]:
        value = self.may_miss[vertex]
        if isinstance(value, MissTag):
            return value
        return set(self.manager.enumerate(value))

    def classification(self, edge_id: str) -> Classification:
        return verdict_class(*self.verdicts[edge_id])


def verdict_class(may_hit: bool, may_miss: bool) -> Classification:
    if may_hit and may_miss:
        return Classification.HIT_AND_MISS
    if may_hit:
        return Classification.ALWAYS_HIT
    if may_miss:
        return Classification.ALWAYS_MISS
    raise InvariantViolation("reachable access can neither hit nor miss")


def analyze_block(
    g: ControlFlowGraph,
    focus: Block,
    assoc: int,
    *,
    discipline: str = "fifo",
    manager: Manager | None = None,
    backend: str | None = None,
    deadline: float | None = None,
) -> BlockResult:
    """Run both antichain analyses for ``focus`` on a sliced, pruned graph.

    ``discipline`` picks the worklist order (``fifo`` or ``lifo``); the
    fixpoint does not depend on it.  ``deadline`` is a ``time.monotonic()``
    instant after which :class:`AnalysisTimeout` is raised.
    """
    if discipline not in ("fifo", "lifo"):
        raise ValueError(f"unknown worklist discipline {discipline!r}")
    mgr = manager or Manager(g.blocks(), backend=backend)
    unit = mgr.unit()
    hit = {v: may_hit_init(mgr, g.starts.get(v)) for v in g.vertices}
    miss = {v: may_miss_init(g.starts.get(v)) for v in g.vertices}
    updates = {v: 0 for v in g.vertices}

    seeds = dict.fromkeys(g.starts)
    for e in g.access_edges():
        if e.label == focus:
            seeds[e.dst] = None
            hit[e.dst] = may_hit_join(mgr, hit[e.dst], unit)
            miss[e.dst] = may_miss_join(mgr, miss[e.dst], unit)

    work = deque(seeds)
    pending = set(work)
    take = work.popleft if discipline == "fifo" else work.pop
    succ = g.successors
    steps = 0
    while work:
        x = take()
        pending.discard(x)
        steps += 1
        if deadline is not None and steps % 64 == 0 and time.monotonic() > deadline:
            raise AnalysisTimeout(f"analysis of block {focus!r} timed out")
        hx, mx = hit[x], miss[x]
        for e in succ[x]:
            y = e.dst
            nh = may_hit_join(mgr, hit[y], may_hit_transfer(mgr, hx, e.label, focus, assoc))
            nm = may_miss_join(mgr, miss[y], may_miss_transfer(mgr, mx, e.label, focus, assoc))
            if nh != hit[y] or nm != miss[y]:
                hit[y], miss[y] = nh, nm
                updates[y] += 1
                if y not in pending:
                    pending.add(y)
                    work.append(y)

    verdicts = {
        e.id: (hit[e.src] != mgr.bottom(), miss[e.src] is TOP)
        for e in g.access_edges()
        if e.label == focus
    }
    return BlockResult(focus, mgr, hit, miss, verdicts, updates)


def _block_verdicts(args) -> dict[str, tuple[bool, bool]]:
    g, focus, assoc, backend, deadline, discipline = args
    return analyze_block(g, focus, assoc, backend=backend, deadline=deadline, discipline=discipline).verdicts


# -- pipeline ------------------------------------------------------------------

MODES = ("zdd", "age+zdd")


@dataclass
class ExactReport:
    classes: dict[str, Classification]
    by_age: dict[str, Classification] | None
    by_exact: dict[str, Classification]
    analyzed: list[tuple[int, Block]]
    """(set index, block) pairs that went through the antichain analysis."""
    timings_ms: dict[str, float]


def classify_exact(
    g: ControlFlowGraph,
    config: CacheConfig | int,
    mode: str = "age+zdd",
    *,
    focus: Block | None = None,
    jobs: int = 1,
    backend: str | None = None,
    timeout: float | None = None,
    discipline: str = "fifo",
) -> ExactReport:
    """Classify every reachable access edge exactly.

    In ``age+zdd`` mode the age analysis runs first and only blocks with an
    ``unknown`` access are handed to :func:`analyze_block`; in ``zdd`` mode
    every block is.  The result never contains ``unknown``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if isinstance(config, int):
        config = CacheConfig(config)
    assoc = config.associativity
    deadline = time.monotonic() + timeout if timeout else None
    g = prune_unreachable(g)
    timings = {"age": 0.0, "zdd": 0.0}
    classes: dict[str, Classification] = {}
    by_age: dict[str, Classification] | None = {} if mode == "age+zdd" else None
    by_exact: dict[str, Classification] = {}
    tasks = []
    for set_index in used_sets(g, config):
        sliced = slice_for_set(g, set_index, config)
        blocks = sliced.blocks()
        if focus is not None:
            blocks = [b for b in blocks if b == focus]
        if by_age is not None:
            t0 = time.perf_counter()
            ages = age_classify_single_set(sliced, assoc)
            timings["age"] += (time.perf_counter() - t0) * 1000
            unknown = set()
            for e in sliced.access_edges():
                if e.label in blocks:
                    by_age[e.id] = ages[e.id]
                    if ages[e.id] is Classification.UNKNOWN:
                        unknown.add(e.label)
                    else:
                        classes[e.id] = ages[e.id]
            blocks = [b for b in blocks if b in unknown]
        tasks.extend((set_index, sliced, b) for b in blocks)

    t0 = time.perf_counter()
    args = [(sliced, b, assoc, backend, deadline, discipline) for _, sliced, b in tasks]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_block_verdicts, args))
    else:
        results = [_block_verdicts(a) for a in args]
    timings["zdd"] = (time.perf_counter() - t0) * 1000

    for verdicts in results:
        for eid, (h, m) in verdicts.items():
            cls = verdict_class(h, m)
            by_exact[eid] = cls
            previous = classes.get(eid)
            if previous is not None and previous is not cls:
                raise InvariantViolation(f"edge {eid}: age says {previous.value}, exact says {cls.value}")
            classes[eid] = cls
    if by_age is not None:
        for eid, c in by_age.items():
            classes.setdefault(eid, c)
    ordered = {e.id: classes[e.id] for e in g.access_edges() if e.id in classes}
    return ExactReport(ordered, by_age, by_exact, [(s, b) for s, _, b in tasks], timings)


def edge_verdict(g: ControlFlowGraph, edge_id: str, assoc: int, **kwargs) -> tuple[bool, bool]:
    """(may hit, may miss) for one edge; both false when the edge is unreachable."""
    g = prune_unreachable(g)
    edge = g.edge_by_id.get(edge_id)
    if edge is None or edge.label is None:
        return False, False
    return analyze_block(g, edge.label, assoc, **kwargs).verdicts[edge_id]
