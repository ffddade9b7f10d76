"""Independent reference implementations shared by the tests.

Nothing here imports the analyses under test: families of sets are plain
Python sets of frozensets, and LRU behaviour is simulated with lists.
"""

from __future__ import annotations

import itertools
import random

from exactlru.cfg import ControlFlowGraph, StartKind
from exactlru.generators import random_cfg

# -- families of sets ---------------------------------------------------------


def minimal(f):
    return {s for s in f if not any(t < s for t in f)}


def maximal(f):
    return {s for s in f if not any(s < t for t in f)}


def nonsup(f, g):
    return {s for s in f if not any(t <= s for t in g)}


def nonsub(f, g):
    return {s for s in f if not any(s <= t for t in g)}


def add_element(f, v):
    return {s | {v} for s in f}


def upward_closure(f, universe):
    return {frozenset(c) for r in range(len(universe) + 1) for c in itertools.combinations(universe, r)
            if any(s <= frozenset(c) for s in f)}


def random_family(rng: random.Random, nvars: int, max_sets: int = 8, max_size: int | None = None):
    max_size = nvars if max_size is None else min(max_size, nvars)
    return {frozenset(rng.sample(range(nvars), rng.randint(0, max_size))) for _ in range(rng.randint(0, max_sets))}


# -- LRU simulation -------------------------------------------------------------


def lru_access(state: list, block, assoc: int) -> bool:
    """Mutates ``state`` (youngest first); returns True on a hit."""
    hit = block in state
    if hit:
        state.remove(block)
    state.insert(0, block)
    del state[assoc:]
    return hit


def simulate_paths(g: ControlFlowGraph, assoc: int, depth: int, initial_states):
    """Per-edge observed (hit, miss) flags over every path of bounded length.

    Gives under-approximations of may-hit and may-miss, so the exact
    analysis must report at least these.
    """
    seen = {}

    def walk(v, state, d):
        if d == 0:
            return
        for e in g.successors[v]:
            s = list(state)
            if e.label is not None:
                hit = lru_access(s, e.label, assoc)
                h, m = seen.get(e.id, (False, False))
                seen[e.id] = (h or hit, m or not hit)
            walk(e.dst, tuple(s), d - 1)

    for v in g.starts:
        for s0 in initial_states(v):
            walk(v, s0, depth)
    return seen


# -- the running example and graph corpora ------------------------------------------

FIG3_EDGES = [
    ("s0", "s1", "a", "s0-a"),
    ("s1", "s2", "c", "s1-c"),
    ("s2", "s3", "b", "s2-b"),
    ("s3", "s4", "d", "s3-d"),
    ("s4", "s6", None, "s4-eps"),
    ("s1", "s5", "b", "s1-b"),
    ("s5", "s6", None, "s5-eps"),
    ("s6", "s7", "c", "s6-c"),
    ("s7", "s8", "a", "s7-a"),
    ("s6", "s9", "a", "s6-a"),
    ("s9", "s10", "e", "s9-e"),
    ("s10", "s11", "c", "s10-c"),
]


def fig3() -> ControlFlowGraph:
    return ControlFlowGraph.build({"s0": StartKind.EMPTY}, FIG3_EDGES)


def small_corpus(count: int, seed: int = 0):
    """Yields ``(graph, assoc)`` pairs: up to 12 vertices, 6 blocks, N in {1, 2, 4}."""
    rng = random.Random(seed)
    for _ in range(count):
        g = random_cfg(
            rng.randint(1, 12),
            rng.randint(1, 6),
            rng.randrange(2**31),
            edge_density=rng.choice([0.5, 1.0, 1.5]),
            top_bias=rng.choice([0.0, 0.5, 1.0]),
            epsilon_rate=rng.choice([0.0, 0.2]),
            starts=rng.randint(1, 2),
        )
        yield g, rng.choice([1, 2, 4])


# Table of the running example (N = 4): per vertex, the age interval and the
# focused values of blocks a, b, c, d, transcribed cell by cell.  "A" is the
# absent value, "{}" the empty set.
TABLE1 = {
    "s0": (("∞", "∞", "∞", "∞"), ("A", "A", "A", "A")),
    "s1": (("0", "∞", "∞", "∞"), ("{}", "A", "A", "A")),
    "s2": (("1", "∞", "0", "∞"), ("{c}", "A", "{}", "A")),
    "s3": (("2", "0", "1", "∞"), ("{b,c}", "{}", "{b}", "A")),
    "s4": (("3", "1", "2", "0"), ("{b,c,d}", "{d}", "{b,d}", "{}")),
    "s5": (("1", "0", "∞", "∞"), ("{b}", "{}", "A", "A")),
    "s6": (("[1,3]", "[0,1]", "[2,∞]", "[0,∞]"), ("{b,c,d} {b}", "{d} {}", "{b,d} A", "{} A")),
    "s7": (("[2,∞]", "[1,2]", "0", "[1,∞]"), ("{b,c,d} {b,c}", "{c,d} {c}", "{}", "{c} A")),
    "s8": (("0", "[2,3]", "1", "[2,∞]"), ("{}", "{a,c,d} {a,c}", "{a}", "{a,c} A")),
    "s9": (("0", "[1,2]", "[2,∞]", "[1,∞]"), ("{}", "{a,d} {a}", "{a,b,d} A", "{a} A")),
    "s10": (("1", "[2,3]", "[3,∞]", "[2,∞]"), ("{e}", "{a,d,e} {a,e}", "A", "{a,e} A")),
    "s11": (("2", "[3,∞]", "0", "[3,∞]"), ("{c,e}", "A {a,c,e}", "A", "{a,c,e} A")),
}
TABLE1_BLOCKS = "abcd"

# Reachable concrete states column of the same table, youngest first.
TABLE1_STATES = {
    "s0": {()},
    "s1": {("a",)},
    "s2": {("c", "a")},
    "s3": {("b", "c", "a")},
    "s4": {("d", "b", "c", "a")},
    "s5": {("b", "a")},
    "s6": {("d", "b", "c", "a"), ("b", "a")},
    "s7": {("c", "d", "b", "a"), ("c", "b", "a")},
    "s8": {("a", "c", "d", "b"), ("a", "c", "b")},
    "s9": {("a", "d", "b", "c"), ("a", "b")},
    "s10": {("e", "a", "d", "b"), ("e", "a", "b")},
    "s11": {("c", "e", "a", "d"), ("c", "e", "a", "b")},
}

# The focused cell for c at s11 reads "A", but the row's own reachable states
# both start with c (and its age cell reads 0), so the value is the empty set.
TABLE1_ERRATA = {("s11", "c"): ("A", "{}")}


def table1_focused(vertex: str, block: str) -> str:
    cell = TABLE1[vertex][1][TABLE1_BLOCKS.index(block)]
    printed, corrected = TABLE1_ERRATA.get((vertex, block), (cell, cell))
    assert printed == cell
    return corrected


def parse_focused_cell(cell: str, absent):
    out = set()
    for tok in cell.split():
        if tok == "A":
            out.add(absent)
        else:
            inner = tok.strip("{}")
            out.add(frozenset(inner.split(",")) if inner else frozenset())
    return out


def canonical_focused(values, absent) -> str:
    """Order-independent rendering of a set of focused values."""
    sets = sorted("{" + ",".join(sorted(v)) + "}" for v in values if v is not absent)
    return " ".join(sets + (["A"] if absent in values else []))
