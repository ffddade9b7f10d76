"""Classical age-interval analysis of LRU caches.

Each block is mapped to an interval of possible ages; ``INF`` stands for
"not cached".  The analysis is fast and sound but may leave accesses
``unknown``.
"""

from __future__ import annotations

import math
from collections import deque

from .cfg import Block, CacheConfig, ControlFlowGraph, StartKind, prune_unreachable, slice_for_set, used_sets
from .concrete import Classification

INF = math.inf

Interval = tuple  # (lo, hi), ages in 0..N-1 or INF
AgeState = dict  # Block -> Interval; missing blocks are [INF, INF]

ABSENT_INTERVAL = (INF, INF)


def _inc(v, assoc):
    return INF if v >= assoc - 1 else v + 1


def _dec(v):
    return v - 1 if v != INF else INF


def age_update(state: AgeState, block: Block, assoc: int) -> AgeState:
    """Abstract effect of an access to ``block``.

    A block that may be younger than ``block`` may age by one; one that may
    be older keeps its age; the result is the hull of whichever cases are
    possible.
    """
    lo_b, hi_b = state.get(block, ABSENT_INTERVAL)
    out: AgeState = {}
    for x, (lo, hi) in state.items():
        if x == block:
            continue
        new_lo, new_hi = lo, hi
        cases = []
        if lo < hi_b:
            cases.append((_inc(lo, assoc), _inc(min(hi, _dec(hi_b)), assoc)))
        if hi > lo_b:
            cases.append((max(lo, _inc(lo_b, assoc)), hi))
        if cases:
            new_lo = min(c[0] for c in cases)
            new_hi = max(c[1] for c in cases)
        if new_lo != INF:
            out[x] = (new_lo, new_hi)
    out[block] = (0, 0)
    return out


def age_join(s1: AgeState | None, s2: AgeState | None) -> AgeState | None:
    if s1 is None:
        return s2
    if s2 is None:
        return s1
    out = {}
    for x in s1.keys() | s2.keys():
        lo1, hi1 = s1.get(x, ABSENT_INTERVAL)
        lo2, hi2 = s2.get(x, ABSENT_INTERVAL)
        out[x] = (min(lo1, lo2), max(hi1, hi2))
    return out


def age_seed(kind: StartKind, blocks) -> AgeState:
    if kind is StartKind.EMPTY:
        return {}
    return {b: (0, INF) for b in blocks}


def age_fixpoint(g: ControlFlowGraph, assoc: int) -> dict[str, AgeState | None]:
    """Least fixpoint over a single-set graph; ``None`` marks unreached vertices."""
    blocks = g.blocks()
    values: dict[str, AgeState | None] = {v: None for v in g.vertices}
    work = deque()
    for v, kind in g.starts.items():
        values[v] = age_seed(kind, blocks)
        work.append(v)
    pending = set(work)
    succ = g.successors
    while work:
        x = work.popleft()
        pending.discard(x)
        s = values[x]
        for e in succ[x]:
            t = s if e.label is None else age_update(s, e.label, assoc)
            old = values[e.dst]
            new = age_join(old, t)
            if new != old:
                values[e.dst] = new
                if e.dst not in pending:
                    pending.add(e.dst)
                    work.append(e.dst)
    return values


def classify_state(state: AgeState, block: Block, assoc: int) -> Classification:
    lo, hi = state.get(block, ABSENT_INTERVAL)
    if hi < assoc:
        return Classification.ALWAYS_HIT
    if lo == INF:
        return Classification.ALWAYS_MISS
    return Classification.UNKNOWN


def classify_single_set(g: ControlFlowGraph, assoc: int) -> dict[str, Classification]:
    values = age_fixpoint(g, assoc)
    return {
        e.id: classify_state(values[e.src], e.label, assoc)
        for e in g.access_edges()
        if values[e.src] is not None
    }


def classify_by_age(g: ControlFlowGraph, config: CacheConfig | int) -> dict[str, Classification]:
    if isinstance(config, int):
        config = CacheConfig(config)
    g = prune_unreachable(g)
    out: dict[str, Classification] = {}
    for set_index in used_sets(g, config):
        sliced = slice_for_set(g, set_index, config)
        out.update(
            (eid, c)
            for eid, c in classify_single_set(sliced, config.associativity).items()
            if config.set_of(g.edge_by_id[eid].label) == set_index
        )
    return out


def format_interval(interval: Interval) -> str:
    def fmt(v):
        return "∞" if v == INF else str(v)

    lo, hi = interval
    return fmt(lo) if lo == hi else f"[{fmt(lo)},{fmt(hi)}]"
