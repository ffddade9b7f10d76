"""Ground-truth LRU semantics, computed by explicit state enumeration.

Cache states are tuples of blocks, youngest first; empty lines are the
implicit suffix, so ``("b", "a")`` with associativity 4 stands for
``(b, a, ε, ε)``.  Everything here is exponential on purpose: it exists to
check the abstract analyses on small graphs.
"""

from __future__ import annotations

import enum
from collections import deque
from itertools import combinations, permutations
from typing import Hashable, Iterable, Union

from .cfg import (
    Block,
    CacheConfig,
    ControlFlowGraph,
    StartKind,
    prune_unreachable,
    slice_for_set,
    used_sets,
)

DEFAULT_GUARD = 10**6

CacheState = tuple
"""Tuple of distinct blocks, youngest first, length at most the associativity."""


class ExplosionGuardExceeded(RuntimeError):
    pass


class Classification(str, enum.Enum):
    ALWAYS_HIT = "always-hit"
    ALWAYS_MISS = "always-miss"
    HIT_AND_MISS = "hit-and-miss"
    UNKNOWN = "unknown"


class _Absent:
    """The focused value of a cache state that does not hold the focus block."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSENT"

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()
FocusedState = Union[_Absent, frozenset]


def fresh_blocks(n: int) -> list[str]:
    """Placeholder blocks standing for addresses the graph never touches.

    The names cannot be produced by the text format, so they never clash
    with a real block.
    """
    return [f"<fresh{i}>" for i in range(n)]


def access_concrete(state: CacheState, block: Block, assoc: int) -> tuple[CacheState, bool]:
    if block in state:
        i = state.index(block)
        return (block,) + state[:i] + state[i + 1 :], True
    return ((block,) + state)[:assoc], False


def pad(state: CacheState, assoc: int) -> tuple:
    return tuple(state) + (None,) * (assoc - len(state))


def all_states(universe: Iterable[Block], assoc: int) -> list[CacheState]:
    """Every valid cache state over ``universe``, empty lines included."""
    universe = list(universe)
    out: list[CacheState] = []
    for k in range(min(assoc, len(universe)) + 1):
        out.extend(permutations(universe, k))
    return out


def top_universe(g: ControlFlowGraph, assoc: int) -> list[Block]:
    """Blocks over which an arbitrary initial cache is enumerated.

    The graph's own blocks plus ``assoc - 1`` fresh ones; that is enough
    foreign blocks to push any graph block to the oldest line.
    """
    return g.blocks() + fresh_blocks(assoc - 1)


def _fixpoint(g: ControlFlowGraph, seeds: dict[str, Iterable[Hashable]], step, guard: int):
    """Least fixpoint of a deterministic per-edge state transformer.

    ``step(state, label)`` returns the successor state.  States are
    propagated individually, so the cost is linear in the number of
    (vertex, state) pairs, which is bounded by ``guard``.
    """
    reach: dict[str, set] = {v: set() for v in g.vertices}
    queue: deque = deque()
    total = 0
    for v, states in seeds.items():
        for s in states:
            if s not in reach[v]:
                reach[v].add(s)
                queue.append((v, s))
                total += 1
                if total > guard:
                    raise ExplosionGuardExceeded(f"more than {guard} (vertex, state) pairs")
    succ = g.successors
    while queue:
        v, s = queue.popleft()
        for e in succ[v]:
            t = s if e.label is None else step(s, e.label)
            bucket = reach[e.dst]
            if t not in bucket:
                bucket.add(t)
                queue.append((e.dst, t))
                total += 1
                if total > guard:
                    raise ExplosionGuardExceeded(f"more than {guard} (vertex, state) pairs")
    return reach


def collecting_semantics(
    g: ControlFlowGraph, assoc: int, *, guard: int = DEFAULT_GUARD
) -> dict[str, set[CacheState]]:
    """All reachable concrete cache states at every vertex of a single-set graph."""
    seeds = {}
    top_states = None
    for v, kind in g.starts.items():
        if kind is StartKind.EMPTY:
            seeds[v] = [()]
        else:
            if top_states is None:
                top_states = all_states(top_universe(g, assoc), assoc)
            seeds[v] = top_states
    return _fixpoint(g, seeds, lambda s, b: access_concrete(s, b, assoc)[0], guard)


def classify_edges(g: ControlFlowGraph, may_hit, may_miss) -> dict[str, Classification]:
    out = {}
    for e in g.access_edges():
        hit, miss = may_hit(e), may_miss(e)
        if hit and miss:
            out[e.id] = Classification.HIT_AND_MISS
        elif hit:
            out[e.id] = Classification.ALWAYS_HIT
        elif miss:
            out[e.id] = Classification.ALWAYS_MISS
    return out


def classify_by_oracle(
    g: ControlFlowGraph, config: CacheConfig | int, *, guard: int = DEFAULT_GUARD
) -> dict[str, Classification]:
    """Classify every reachable access edge from the collecting semantics.

    Multi-set graphs are sliced and each set is enumerated separately.
    Edges whose source is unreachable are left out.
    """
    if isinstance(config, int):
        config = CacheConfig(config)
    g = prune_unreachable(g)
    out: dict[str, Classification] = {}
    for set_index in used_sets(g, config):
        sliced = slice_for_set(g, set_index, config)
        states = collecting_semantics(sliced, config.associativity, guard=guard)
        mine = {e.id for e in sliced.access_edges()}
        result = classify_edges(
            sliced,
            lambda e: any(e.label in s for s in states[e.src]),
            lambda e: any(e.label not in s for s in states[e.src]),
        )
        out.update((k, v) for k, v in result.items() if k in mine)
    return out


def focus_concrete(state: CacheState, block: Block) -> FocusedState:
    if block not in state:
        return ABSENT
    return frozenset(state[: state.index(block)])


def focus_age(state: CacheState, block: Block) -> int | None:
    """Age of ``block`` in ``state``; ``None`` when absent."""
    return state.index(block) if block in state else None


def focused_step(value: FocusedState, block: Block, focus: Block, assoc: int) -> FocusedState:
    if block == focus:
        return frozenset()
    if value is ABSENT:
        return ABSENT
    grown = value | {block}
    return grown if len(grown) < assoc else ABSENT


def focused_semantics(
    g: ControlFlowGraph,
    focus: Block,
    assoc: int,
    *,
    universe: Iterable[Block] | None = None,
    guard: int = DEFAULT_GUARD,
) -> dict[str, set[FocusedState]]:
    """Reachable ``focus``-focused states at every vertex of a single-set graph.

    An arbitrary initial cache contributes ABSENT and every subset of
    ``universe`` minus the focus with fewer than ``assoc`` elements; the
    default universe matches :func:`top_universe`, so the result is the
    exact image of :func:`collecting_semantics` under :func:`focus_concrete`.
    """
    seeds = {}
    top_seed = None
    for v, kind in g.starts.items():
        if kind is StartKind.EMPTY:
            seeds[v] = [ABSENT]
        else:
            if top_seed is None:
                pool = [b for b in (universe if universe is not None else top_universe(g, assoc))
                        if b != focus]
                top_seed = [ABSENT]
                for k in range(min(assoc - 1, len(pool)) + 1):
                    top_seed.extend(frozenset(c) for c in combinations(pool, k))
            seeds[v] = top_seed
    for e in g.access_edges():
        if e.label == focus:
            seeds[e.dst] = list(seeds.get(e.dst, ())) + [frozenset()]
    return _fixpoint(g, seeds, lambda s, b: focused_step(s, b, focus, assoc), guard)
