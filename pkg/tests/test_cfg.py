import random

import pytest

from exactlru.cfg import (
    CacheConfig,
    ControlFlowGraph,
    Edge,
    ParseError,
    StartKind,
    collapse_epsilon,
    format_cfg,
    map_address,
    parse_cfg,
    prune_unreachable,
    reachable_vertices,
    slice_for_set,
    used_sets,
)
from exactlru.concrete import classify_by_oracle
from exactlru.generators import random_cfg

import oracles


def test_map_address():
    cfg = CacheConfig(4, num_sets=8, line_size=64)
    assert map_address(0x1040, cfg) == (0x41, 1)
    assert map_address(63, cfg) == (0, 0)
    with pytest.raises(ValueError):
        map_address(-1, cfg)


@pytest.mark.parametrize("kwargs", [dict(associativity=0), dict(associativity=2, num_sets=0),
                                    dict(associativity=2, line_size=48)])
def test_cache_config_validation(kwargs):
    with pytest.raises(ValueError):
        CacheConfig(**kwargs)


def test_parse_full_example():
    text = """\
# two loads and a symbolic-free join
cache assoc=2 sets=4 linesize=16
start s0 empty
start t top
edge s0 s1 @0x40 id=load
edge t s1 -
edge s1 s1 @0x54
"""
    g, cfg = parse_cfg(text)
    assert cfg == CacheConfig(2, 4, 16)
    assert g.vertices == ("s0", "t", "s1")
    assert g.starts == {"s0": StartKind.EMPTY, "t": StartKind.TOP}
    assert [(e.id, e.label) for e in g.edges] == [("load", 4), ("e1", None), ("e2", 5)]
    assert used_sets(g, cfg) == [0, 1]


def test_overrides_beat_header():
    g, cfg = parse_cfg("cache assoc=2\nstart s empty\nedge s t @64\n", assoc=8, linesize=32)
    assert cfg == CacheConfig(8, 1, 32)
    assert g.edges[0].label == 2


def test_no_associativity_gives_no_config():
    g, cfg = parse_cfg("start s empty\nedge s t a\n")
    assert cfg is None and len(g.edges) == 1


def test_empty_text():
    g, cfg = parse_cfg("")
    assert g.vertices == () and g.edges == () and cfg is None


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("start s empty\nedge s t a b c\n", 2, 1),
        ("start s empty\nstart s top\n", 2, 7),
        ("start s empty\nedge t s a\n", 2, 10),
        ("cache assoc=2 sets=2\nstart s empty\nedge s t a\n", 3, 10),
        ("start s empty\nedge s t a id=x\nedge t u b id=x\n", 3, 10),
        ("start s maybe\n", 1, 9),
        ("frobnicate\n", 1, 1),
        ("start s empty\nedge s t @zz\n", 2, 10),
        ("cache assoc=two\n", 1, 7),
        ("cache assoc=2\ncache assoc=4\n", 2, 1),
        ("start s empty\nedge s t a idx=1\n", 2, 12),
        ("start s empty\nedge s t a+b\n", 2, 10),
    ],
    ids=["arity", "dup-start", "into-start", "symbolic-multiset", "dup-id", "kind", "directive",
         "address", "integer", "dup-cache", "id-syntax", "label-syntax"],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_cfg(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_bad_geometry_is_parse_error():
    with pytest.raises(ParseError):
        parse_cfg("cache assoc=2 linesize=3\n")


def test_format_round_trip_on_random_graphs():
    for seed in range(50):
        g = random_cfg(8, 5, seed, starts=2)
        cfg = CacheConfig(4)
        g2, cfg2 = parse_cfg(format_cfg(g, cfg))
        assert (g2, cfg2) == (g, cfg)


def test_format_numeric_labels_round_trip():
    cfg = CacheConfig(2, num_sets=4, line_size=64)
    g = ControlFlowGraph.build({"s": StartKind.TOP}, [("s", "t", 7, "x"), ("t", "s2", None, "y")])
    assert parse_cfg(format_cfg(g, cfg)) == (g, cfg)


def test_graph_validation():
    with pytest.raises(ValueError):
        ControlFlowGraph(("a",), {}, (Edge("e", "a", "b", None),))
    with pytest.raises(ValueError):
        ControlFlowGraph(("a", "b"), {}, (Edge("e", "a", "b", None), Edge("e", "b", "a", None)))
    with pytest.raises(ValueError):
        ControlFlowGraph(("a", "b"), {"a": StartKind.EMPTY}, (Edge("e", "b", "a", None),))
    with pytest.raises(ValueError):
        ControlFlowGraph(("a", "a"), {}, ())


def test_parallel_edges_are_kept_apart():
    g = ControlFlowGraph.build({"s": StartKind.EMPTY}, [("s", "t", "a"), ("s", "t", "a")])
    assert [e.id for e in g.successors["s"]] == ["e0", "e1"]


def test_slicing_keeps_shape_and_hides_other_sets():
    cfg = CacheConfig(2, num_sets=2)
    g = ControlFlowGraph.build({"s": StartKind.EMPTY}, [("s", "t", 2), ("t", "u", 3), ("u", "s2", None)])
    sliced = slice_for_set(g, 0, cfg)
    assert [e.label for e in sliced.edges] == [2, None, None]
    assert [e.id for e in sliced.edges] == [e.id for e in g.edges]
    assert sliced.vertices == g.vertices


def test_prune_unreachable():
    g = ControlFlowGraph.build({"s": StartKind.EMPTY}, [("s", "t", "a"), ("x", "y", "b"), ("y", "t", "c")])
    assert reachable_vertices(g) == {"s", "t"}
    p = prune_unreachable(g)
    assert p.vertices == ("s", "t") and [e.id for e in p.edges] == ["e0"]
    assert prune_unreachable(p) is p


def _access_sequences(g, k):
    """Access-edge sequences of length <= k along paths from the starts."""
    seen = set()
    stack = [(v, ()) for v in g.starts]
    while stack:
        v, seq = stack.pop()
        if (v, seq) in seen:
            continue
        seen.add((v, seq))
        for e in g.successors[v]:
            if e.label is None:
                stack.append((e.dst, seq))
            elif len(seq) < k:
                stack.append((e.dst, seq + (e.id,)))
    return {seq for _, seq in seen}


def test_collapse_epsilon_preserves_access_sequences():
    rng = random.Random(11)
    for _ in range(150):
        g = prune_unreachable(random_cfg(rng.randint(2, 8), 3, rng.randrange(10**6), epsilon_rate=0.5))
        c = collapse_epsilon(g)
        assert all(e.label is not None or e.src != e.dst for e in c.edges)
        assert len(c.vertices) <= len(g.vertices)
        assert _access_sequences(c, 5) == _access_sequences(g, 5)


def test_collapse_epsilon_does_not_change_classification():
    for g, assoc in oracles.small_corpus(150, seed=4):
        assert classify_by_oracle(collapse_epsilon(g), assoc) == classify_by_oracle(g, assoc)


def test_collapse_chain_to_single_vertex():
    g = ControlFlowGraph.build({"s": StartKind.EMPTY}, [("s", "a", None), ("a", "b", None), ("b", "b", None)])
    c = collapse_epsilon(g)
    assert c.vertices == ("s",) and c.edges == ()


def test_blocks_first_occurrence_order():
    g = ControlFlowGraph.build(
        {"s": StartKind.EMPTY}, [("s", "t", "b"), ("t", "u", "a"), ("u", "v", "b"), ("v", "w", None)]
    )
    assert g.blocks() == ["b", "a"]
    assert [e.id for e in g.access_edges()] == ["e0", "e1", "e2"]
    assert [e.id for e in g.predecessors["u"]] == ["e1"]
    assert g.predecessors["s"] == [] and g.successors["w"] == []
