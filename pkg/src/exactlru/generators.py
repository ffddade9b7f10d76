"""Benchmark graphs with known answers.

``sat_to_cfg`` and ``hamiltonian_to_cfg`` build acyclic graphs whose last
access is a hit (resp. a miss) on some path exactly when a formula is
satisfiable (resp. a graph has a Hamiltonian circuit); both answers are
computed by brute force.  ``diamond_chain`` is the classic blow-up case for
explicit state sets, and ``random_cfg`` feeds the property tests.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .cfg import CacheConfig, ControlFlowGraph, Edge, StartKind

MAX_SAT_VARS = 20
MAX_HAM_VERTICES = 9


class OracleBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range 1..{self.num_vars}")


@dataclass(frozen=True)
class UndirectedGraph:
    num_vertices: int
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2:
                raise ValueError("self-loops are not allowed")
            if not all(0 <= v < self.num_vertices for v in e):
                raise ValueError(f"edge {sorted(e)} out of range")

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "UndirectedGraph":
        return cls(n, frozenset(frozenset(p) for p in pairs))

    def adjacent(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges


@dataclass(frozen=True)
class GeneratedInstance:
    cfg: ControlFlowGraph
    designated_edge: str
    associativity: int
    ground_truth: bool
    question: str
    """``may-hit`` or ``may-miss``: which verdict ``ground_truth`` predicts."""

    @property
    def config(self) -> CacheConfig:
        return CacheConfig(self.associativity)


# -- SAT --------------------------------------------------------------------


def satisfiable(f: CnfFormula) -> bool:
    """Truth-table enumeration."""
    if f.num_vars > MAX_SAT_VARS:
        raise OracleBoundExceeded(f"{f.num_vars} variables exceeds the truth-table bound {MAX_SAT_VARS}")
    for bits in itertools.product((False, True), repeat=f.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses):
            return True
    return False


def _literal(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"nx{-lit}"


def sat_to_cfg(f: CnfFormula) -> GeneratedInstance:
    """Switch per variable, then switch per clause, framed by two ``w`` accesses.

    With associativity ``num_vars + 1`` the last ``w`` may hit iff some path
    touches at most ``num_vars`` distinct literals, i.e. iff ``f`` is
    satisfiable.
    """
    truth = satisfiable(f)
    edges = [("s", "q0", "w", "w_in")]
    k = 0
    for i in range(1, f.num_vars + 1):
        edges.append((f"q{k}", f"q{k + 1}", f"x{i}", f"var{i}_pos"))
        edges.append((f"q{k}", f"q{k + 1}", f"nx{i}", f"var{i}_neg"))
        k += 1
    for j, clause in enumerate(f.clauses, start=1):
        for m, lit in enumerate(clause):
            edges.append((f"q{k}", f"q{k + 1}", _literal(lit), f"cl{j}_{m}"))
        k += 1
    edges.append((f"q{k}", "end", "w", "w_out"))
    g = ControlFlowGraph.build({"s": StartKind.EMPTY}, edges)
    return GeneratedInstance(g, "w_out", f.num_vars + 1, truth, "may-hit")


def random_cnf(num_vars: int, num_clauses: int, rng: random.Random, max_width: int = 3) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        width = rng.randint(1, min(max_width, num_vars))
        chosen = rng.sample(range(1, num_vars + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return CnfFormula(num_vars, tuple(clauses))


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if current:
                    clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(num_vars, tuple(clauses))


def format_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


# -- Hamiltonian circuit ---------------------------------------------------------


def has_hamiltonian_circuit(g: UndirectedGraph) -> bool:
    """Permutation enumeration of circuits through vertex 0."""
    n = g.num_vertices
    if n > MAX_HAM_VERTICES:
        raise OracleBoundExceeded(f"{n} vertices exceeds the permutation bound {MAX_HAM_VERTICES}")
    if n < 2:
        return False
    for perm in itertools.permutations(range(1, n)):
        tour = (0,) + perm + (0,)
        if all(g.adjacent(tour[i], tour[i + 1]) for i in range(n)):
            return True
    return False


def hamiltonian_to_cfg(g: UndirectedGraph) -> GeneratedInstance:
    """Layered unrolling of ``g``; the last ``w`` may miss iff a circuit exists.

    Layer ``j`` (1 <= j < n) holds a copy of every vertex but 0; moving into
    a copy of vertex ``i`` accesses block ``b<i>``, including the final move
    back into vertex 0.  A path then touches ``n`` distinct blocks exactly
    when it visits every vertex once, and with associativity ``n`` that
    evicts ``w``.
    """
    n = g.num_vertices
    if n < 2:
        raise ValueError("need at least two vertices")
    truth = has_hamiltonian_circuit(g)

    def copy(i, j):
        return f"h{i}_{j}"

    edges = [("s", copy(0, 0), "w", "w_in")]
    for j in range(n):
        sources = [0] if j == 0 else range(1, n)
        targets = [0] if j == n - 1 else range(1, n)
        for i in sources:
            for k in targets:
                if i != k and g.adjacent(i, k):
                    tj = n if k == 0 else j + 1
                    edges.append((copy(i, j), copy(k, tj), f"b{k}", f"{copy(i, j)}-{copy(k, tj)}"))
    edges.append((copy(0, n), "end", "w", "w_out"))
    cfg = ControlFlowGraph.build({"s": StartKind.EMPTY}, edges)
    return GeneratedInstance(cfg, "w_out", n, truth, "may-miss")


def random_graph(n: int, density: float, rng: random.Random) -> UndirectedGraph:
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density]
    return UndirectedGraph.from_pairs(n, pairs)


def parse_edge_list(text: str) -> UndirectedGraph:
    """``u v`` per line (0-based); an optional ``vertices <n>`` line sets the size."""
    n = None
    pairs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if line[0] == "vertices":
            n = int(line[1])
            continue
        if len(line) != 2:
            raise ValueError(f"expected 'u v', got {raw!r}")
        pairs.append((int(line[0]), int(line[1])))
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=-1)
    return UndirectedGraph.from_pairs(n, pairs)


def format_edge_list(g: UndirectedGraph) -> str:
    lines = [f"vertices {g.num_vertices}"]
    lines += [" ".join(map(str, sorted(e))) for e in sorted(g.edges, key=sorted)]
    return "\n".join(lines) + "\n"


# -- diamond chain and random graphs ------------------------------------------


def diamond_chain(n: int) -> ControlFlowGraph:
    """``a`` followed by ``n`` optional accesses ``b1 .. bn``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    edges = [("s0", "s1", "a", "a")]
    for i in range(1, n + 1):
        edges.append((f"s{i}", f"s{i + 1}", f"b{i}", f"b{i}"))
        edges.append((f"s{i}", f"s{i + 1}", None, f"skip{i}"))
    return ControlFlowGraph.build({"s0": StartKind.EMPTY}, edges)


def random_cfg(
    vertices: int,
    blocks: int,
    seed: int,
    *,
    edge_density: float = 1.0,
    top_bias: float = 0.5,
    epsilon_rate: float = 0.2,
    starts: int = 1,
) -> ControlFlowGraph:
    """A reproducible random graph, every vertex reachable from the starts.

    A random spanning tree hangs every non-start vertex below an earlier
    vertex; ``edge_density * vertices`` extra edges (back edges and
    self-loops included) are then added.  Each start is ``top`` with
    probability ``top_bias``.
    """
    if vertices < 1 or blocks < 1 or starts < 1:
        raise ValueError("vertices, blocks and starts must be positive")
    rng = random.Random(seed)
    starts = min(starts, vertices)
    names = [f"v{i}" for i in range(vertices)]
    kinds = {
        names[i]: StartKind.TOP if rng.random() < top_bias else StartKind.EMPTY for i in range(starts)
    }

    def label():
        return None if rng.random() < epsilon_rate else f"b{rng.randrange(blocks)}"

    edges = []
    for i in range(starts, vertices):
        edges.append(Edge(f"e{len(edges)}", names[rng.randrange(i)], names[i], label()))
    if vertices > starts:
        for _ in range(round(edge_density * vertices)):
            src = names[rng.randrange(vertices)]
            dst = names[rng.randrange(starts, vertices)]
            edges.append(Edge(f"e{len(edges)}", src, dst, label()))
    return ControlFlowGraph(tuple(names), kinds, tuple(edges))
