"""Control-flow multigraphs with per-edge memory accesses.

A graph is read from a small line-oriented text format::

    cache assoc=4 sets=1 linesize=64
    start s0 empty
    edge s0 v1 a
    edge v1 v2 @0x40 id=load1
    edge v2 v1 -

Labels are ``-`` (no access), ``@<address>`` (mapped to a block through the
cache geometry) or a bare identifier naming a symbolic block.  Symbolic blocks
are only meaningful when the cache has a single set.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Iterator, Union

Block = Union[int, str]
"""A memory block: the line number of a numeric address, or a symbol."""

EPSILON = None
"""Label of an edge performing no access."""


class StartKind(enum.Enum):
    EMPTY = "empty"
    TOP = "top"


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class CacheConfig:
    associativity: int
    num_sets: int = 1
    line_size: int = 1

    def __post_init__(self):
        for name in ("associativity", "num_sets", "line_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.line_size & (self.line_size - 1):
            raise ValueError(f"line_size must be a power of two, got {self.line_size}")

    def set_of(self, block: Block) -> int:
        if isinstance(block, str):
            return 0
        return block % self.num_sets


def map_address(addr: int, config: CacheConfig) -> tuple[int, int]:
    """Return ``(block, set_index)`` for a byte address."""
    if addr < 0:
        raise ValueError("addresses are non-negative")
    block = addr // config.line_size
    return block, block % config.num_sets


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    label: Block | None

    @property
    def is_access(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class ControlFlowGraph:
    """An immutable control-flow multigraph.

    ``vertices`` keeps first-mention order, which also fixes the iteration
    order of every analysis working on the graph.
    """

    vertices: tuple[str, ...]
    starts: dict[str, StartKind]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise ValueError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.src not in vs or e.dst not in vs:
                raise ValueError(f"edge {e.id!r} mentions an unknown vertex")
            if e.dst in self.starts:
                raise ValueError(f"edge {e.id!r} enters start vertex {e.dst!r}")
        for s in self.starts:
            if s not in vs:
                raise ValueError(f"start {s!r} is not a vertex")

    @classmethod
    def build(
        cls,
        starts: dict[str, StartKind] | Iterable[tuple[str, StartKind]],
        edges: Iterable[tuple],
    ) -> "ControlFlowGraph":
        """Convenience constructor.

        ``edges`` holds ``(src, dst, label)`` or ``(src, dst, label, id)``
        tuples; missing ids are assigned as ``e<k>`` by position.
        """
        starts = dict(starts)
        vertices = dict.fromkeys(starts)
        out = []
        for k, item in enumerate(edges):
            src, dst, label = item[:3]
            eid = item[3] if len(item) > 3 else f"e{k}"
            vertices.setdefault(src)
            vertices.setdefault(dst)
            out.append(Edge(str(eid), src, dst, label))
        return cls(tuple(vertices), starts, tuple(out))

    @cached_property
    def successors(self) -> dict[str, list[Edge]]:
        succ: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            succ[e.src].append(e)
        return succ

    @cached_property
    def predecessors(self) -> dict[str, list[Edge]]:
        pred: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            pred[e.dst].append(e)
        return pred

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def access_edges(self) -> Iterator[Edge]:
        return (e for e in self.edges if e.label is not None)

    def blocks(self) -> list[Block]:
        """Accessed blocks in order of first occurrence."""
        return list(dict.fromkeys(e.label for e in self.edges if e.label is not None))


def slice_for_set(g: ControlFlowGraph, set_index: int, config: CacheConfig) -> ControlFlowGraph:
    """Replace every access outside ``set_index`` by an epsilon label."""
    edges = tuple(
        e if e.label is None or config.set_of(e.label) == set_index else replace(e, label=None)
        for e in g.edges
    )
    return ControlFlowGraph(g.vertices, g.starts, edges)


def used_sets(g: ControlFlowGraph, config: CacheConfig) -> list[int]:
    return sorted({config.set_of(e.label) for e in g.access_edges()})


def reachable_vertices(g: ControlFlowGraph) -> set[str]:
    seen = set(g.starts)
    queue = deque(g.starts)
    while queue:
        v = queue.popleft()
        for e in g.successors[v]:
            if e.dst not in seen:
                seen.add(e.dst)
                queue.append(e.dst)
    return seen


def prune_unreachable(g: ControlFlowGraph) -> ControlFlowGraph:
    live = reachable_vertices(g)
    if len(live) == len(g.vertices):
        return g
    return ControlFlowGraph(
        tuple(v for v in g.vertices if v in live),
        g.starts,
        tuple(e for e in g.edges if e.src in live),
    )


def collapse_epsilon(g: ControlFlowGraph) -> ControlFlowGraph:
    """Merge vertices joined by epsilon edges where that cannot change paths.

    An epsilon edge ``u -> v`` is contracted when it is the only way into
    ``v`` (``v`` is folded into ``u``) or the only way out of a non-start
    ``u`` (``u`` is folded into ``v``).  Epsilon self-loops are dropped.
    Access edges keep their ids and labels; the label sequences along paths
    from the start vertices are unchanged.
    """
    vertices = dict.fromkeys(g.vertices)
    edges = {e.id: e for e in g.edges}

    changed = True
    while changed:
        changed = False
        indeg: dict[str, int] = {v: 0 for v in vertices}
        outdeg: dict[str, int] = {v: 0 for v in vertices}
        for e in edges.values():
            outdeg[e.src] += 1
            indeg[e.dst] += 1
        for e in list(edges.values()):
            if e.label is not None:
                continue
            u, v = e.src, e.dst
            if u == v:
                del edges[e.id]
                changed = True
                break
            if indeg[v] == 1:
                keep, gone = u, v
            elif outdeg[u] == 1 and u not in g.starts:
                keep, gone = v, u
            else:
                continue
            del edges[e.id]
            for eid, other in list(edges.items()):
                if other.src == gone or other.dst == gone:
                    edges[eid] = replace(
                        other,
                        src=keep if other.src == gone else other.src,
                        dst=keep if other.dst == gone else other.dst,
                    )
            del vertices[gone]
            changed = True
            break

    order = [e.id for e in g.edges if e.id in edges]
    return ControlFlowGraph(tuple(vertices), g.starts, tuple(edges[i] for i in order))


# -- text format ----------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*\Z")
_VERTEX = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.']*\Z")
_KV = re.compile(r"([a-z]+)=(\S+)\Z")


def _parse_int(text: str) -> int:
    return int(text, 0)


def parse_cfg(
    text: str,
    *,
    assoc: int | None = None,
    sets: int | None = None,
    linesize: int | None = None,
) -> tuple[ControlFlowGraph, CacheConfig | None]:
    """Parse the text format; keyword arguments override the ``cache`` header.

    Returns the graph and the cache geometry (``None`` when neither the file
    nor the overrides give an associativity).
    """
    header: dict[str, int] = {}
    starts: dict[str, StartKind] = {}
    vertices: dict[str, None] = {}
    raw_edges: list[tuple[int, int, str, str, str, str | None]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        col, kw = tokens[0]
        if kw == "cache":
            if header:
                raise ParseError("duplicate cache declaration", lineno, col)
            for c, tok in tokens[1:]:
                m = _KV.match(tok)
                if not m or m.group(1) not in ("assoc", "sets", "linesize"):
                    raise ParseError(f"bad cache parameter {tok!r}", lineno, c)
                try:
                    header[m.group(1)] = _parse_int(m.group(2))
                except ValueError:
                    raise ParseError(f"bad integer {m.group(2)!r}", lineno, c) from None
            header.setdefault("_declared", 1)
        elif kw == "start":
            if len(tokens) != 3:
                raise ParseError("expected: start <vertex> empty|top", lineno, col)
            (vc, v), (kc, kind) = tokens[1], tokens[2]
            if not _VERTEX.match(v):
                raise ParseError(f"bad vertex name {v!r}", lineno, vc)
            if v in starts:
                raise ParseError(f"duplicate start declaration for {v!r}", lineno, vc)
            try:
                starts[v] = StartKind(kind)
            except ValueError:
                raise ParseError(f"start kind must be empty or top, got {kind!r}", lineno, kc) from None
            vertices.setdefault(v)
        elif kw == "edge":
            if len(tokens) not in (4, 5):
                raise ParseError("expected: edge <src> <dst> <label> [id=<edgeId>]", lineno, col)
            for c, v in tokens[1:3]:
                if not _VERTEX.match(v):
                    raise ParseError(f"bad vertex name {v!r}", lineno, c)
                vertices.setdefault(v)
            eid = None
            if len(tokens) == 5:
                c, tok = tokens[4]
                if not tok.startswith("id=") or len(tok) == 3:
                    raise ParseError(f"expected id=<edgeId>, got {tok!r}", lineno, c)
                eid = tok[3:]
            lc, label = tokens[3]
            raw_edges.append((lineno, lc, tokens[1][1], tokens[2][1], label, eid))
        else:
            raise ParseError(f"unknown directive {kw!r}", lineno, col)

    if assoc is not None:
        header["assoc"] = assoc
    if sets is not None:
        header["sets"] = sets
    if linesize is not None:
        header["linesize"] = linesize
    num_sets = header.get("sets", 1)
    line_size = header.get("linesize", 1)
    config = None
    try:
        if "assoc" in header:
            config = CacheConfig(header["assoc"], num_sets, line_size)
        else:
            CacheConfig(1, num_sets, line_size)
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    edges: list[Edge] = []
    ids: set[str] = set()
    for k, (lineno, lc, src, dst, label, eid) in enumerate(raw_edges):
        if dst in starts:
            raise ParseError(f"edge enters start vertex {dst!r}", lineno, lc)
        if label == "-":
            block: Block | None = None
        elif label.startswith("@"):
            try:
                addr = _parse_int(label[1:])
            except ValueError:
                raise ParseError(f"bad address {label!r}", lineno, lc) from None
            if addr < 0:
                raise ParseError(f"negative address {label!r}", lineno, lc)
            block = addr // line_size
        elif _IDENT.match(label):
            if num_sets != 1:
                raise ParseError(f"symbolic label {label!r} requires sets=1", lineno, lc)
            block = label
        else:
            raise ParseError(f"bad label {label!r}", lineno, lc)
        eid = eid if eid is not None else f"e{k}"
        if eid in ids:
            raise ParseError(f"duplicate edge id {eid!r}", lineno, lc)
        ids.add(eid)
        edges.append(Edge(eid, src, dst, block))

    return ControlFlowGraph(tuple(vertices), starts, tuple(edges)), config


def format_cfg(g: ControlFlowGraph, config: CacheConfig | None = None) -> str:
    lines = []
    if config is not None:
        lines.append(
            f"cache assoc={config.associativity} sets={config.num_sets} linesize={config.line_size}"
        )
    line_size = config.line_size if config else 1
    for v, kind in g.starts.items():
        lines.append(f"start {v} {kind.value}")
    for e in g.edges:
        if e.label is None:
            label = "-"
        elif isinstance(e.label, str):
            label = e.label
        else:
            label = f"@{e.label * line_size:#x}"
        lines.append(f"edge {e.src} {e.dst} {label} id={e.id}")
    return "\n".join(lines) + "\n"
