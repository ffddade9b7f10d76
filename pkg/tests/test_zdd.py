import math
import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from exactlru.zdd import KERNELS, EnumerationCapExceeded, Manager, ZddHandle

import oracles

BACKENDS = sorted(KERNELS)
NV = 6

sets_st = st.frozensets(st.integers(0, NV - 1), max_size=NV)
family_st = st.sets(sets_st, max_size=8)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def fam(m, h):
    return set(m.enumerate(h))


def test_terminals(backend):
    m = Manager(range(3), backend=backend)
    assert fam(m, m.bottom()) == set()
    assert fam(m, m.unit()) == {frozenset()}
    assert m.count(m.bottom()) == 0 and m.count(m.unit()) == 1
    assert fam(m, m.singleton(2)) == {frozenset({2})}


@pytest.mark.parametrize("be", BACKENDS)
@settings(max_examples=150, deadline=None)
@given(f=family_st, g=family_st, v=st.integers(0, NV - 1), n=st.integers(0, NV))
def test_operations_match_naive_families(be, f, g, v, n):
    m = Manager(range(NV), backend=be)
    F, G = m.from_sets(f), m.from_sets(g)
    assert fam(m, F) == f
    assert m.count(F) == len(f)
    assert fam(m, m.union(F, G)) == f | g
    assert fam(m, m.minimal(F)) == oracles.minimal(f)
    assert fam(m, m.maximal(F)) == oracles.maximal(f)
    assert fam(m, m.nonsup(F, G)) == oracles.nonsup(f, g)
    assert fam(m, m.nonsub(F, G)) == oracles.nonsub(f, g)
    assert fam(m, m.truncate(F, n)) == {s for s in f if len(s) <= n}
    assert m.has_set_of_size_at_least(F, n) == any(len(s) >= n for s in f)

    fmin, gmin = oracles.minimal(f), oracles.minimal(g)
    Fmin, Gmin = m.from_sets(fmin), m.from_sets(gmin)
    assert fam(m, m.min_union(Fmin, Gmin)) == oracles.minimal(fmin | gmin)
    assert fam(m, m.add_element_min(Fmin, v)) == oracles.minimal(oracles.add_element(fmin, v))

    fmax, gmax = oracles.maximal(f), oracles.maximal(g)
    Fmax, Gmax = m.from_sets(fmax), m.from_sets(gmax)
    assert fam(m, m.max_union(Fmax, Gmax)) == oracles.maximal(fmax | gmax)
    assert fam(m, m.add_element_max(Fmax, v)) == oracles.maximal(oracles.add_element(fmax, v))


@pytest.mark.parametrize("be", BACKENDS)
@settings(max_examples=100, deadline=None)
@given(f=family_st)
def test_canonicity(be, f):
    m = Manager(range(NV), backend=be)
    members = list(f)
    a = m.from_sets(members)
    b = m.from_sets(reversed(members))
    c = m.bottom()
    for s in members:
        c = m.union(c, m.from_sets([s]))
    assert a == b == c
    assert (a == m.bottom()) == (not f)


@pytest.mark.parametrize("be", BACKENDS)
def test_same_family_through_different_operations(be):
    m = Manager("abcd", backend=be)
    left = m.min_union(m.from_sets([{"a", "b"}]), m.from_sets([{"a"}]))
    right = m.minimal(m.from_sets([{"a"}, {"a", "b", "c"}]))
    assert left == right == m.singleton("a")


@pytest.mark.parametrize("be", BACKENDS)
def test_memo_off_is_transparent(be):
    rng = random.Random(5)
    on = Manager(range(NV), backend=be)
    off = Manager(range(NV), backend=be, memo=False)
    for _ in range(200):
        f, g = oracles.random_family(rng, NV), oracles.random_family(rng, NV)
        v = rng.randrange(NV)
        r_on = [on.min_union(on.minimal(on.from_sets(f)), on.minimal(on.from_sets(g))),
                on.add_element_max(on.maximal(on.from_sets(f)), v)]
        r_off = [off.min_union(off.minimal(off.from_sets(f)), off.minimal(off.from_sets(g))),
                 off.add_element_max(off.maximal(off.from_sets(f)), v)]
        assert [fam(on, h) for h in r_on] == [fam(off, h) for h in r_off]
    assert off.kernel.memo_size() == 0


@pytest.mark.parametrize("be", BACKENDS)
def test_memo_flush_at_operation_boundary(be):
    m = Manager(range(10), backend=be, memo_limit=4)
    rng = random.Random(1)
    handles = []
    for _ in range(50):
        f = oracles.random_family(rng, 10)
        h = m.maximal(m.from_sets(f))
        handles.append((h, oracles.maximal(f)))
    assert m.kernel.flushes > 0
    for h, expected in handles:
        assert fam(m, h) == expected


def test_backends_build_identical_node_numbering():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    rng = random.Random(3)
    ms = [Manager(range(8), backend=b) for b in BACKENDS]
    for _ in range(300):
        f, g = oracles.random_family(rng, 8), oracles.random_family(rng, 8)
        refs = [m.max_union(m.maximal(m.from_sets(f)), m.maximal(m.from_sets(g))).ref for m in ms]
        assert len(set(refs)) == 1
    assert len({m.node_count() for m in ms}) == 1


def powerset(m, nvars):
    """Every subset of ``range(nvars)``: one node per variable, both branches shared."""
    p = 1
    for v in reversed(range(nvars)):
        p = m.kernel.node(v, p, p)
    return ZddHandle(m, p)


def test_truncate_is_size_filter_on_large_family(backend):
    m = Manager(range(12), backend=backend)
    full = powerset(m, 12)
    assert m.count(full) == 4096
    for n in range(13):
        assert m.count(m.truncate(full, n)) == sum(math.comb(12, r) for r in range(n + 1))
    assert m.has_set_of_size_at_least(full, 12)
    assert not m.has_set_of_size_at_least(full, 13)


def test_labels_and_unknown_elements(backend):
    m = Manager(["x", "y"], backend=backend)
    h = m.from_sets([{"z", "x"}])
    assert m.order == ["x", "y", "z"]
    assert fam(m, h) == {frozenset({"x", "z"})}


def test_foreign_handle_rejected(backend):
    m1, m2 = Manager(backend=backend), Manager(backend=backend)
    with pytest.raises(ValueError):
        m1.union(m1.unit(), m2.unit())


def test_identity_manager_rejects_labels(backend):
    with pytest.raises(TypeError):
        Manager(backend=backend).singleton("a")


def test_negative_truncation_rejected(backend):
    m = Manager(backend=backend)
    with pytest.raises(ValueError):
        m.truncate(m.unit(), -1)


def test_enumeration_cap(backend):
    m = Manager(range(6), backend=backend)
    h = m.from_sets([{i} for i in range(6)])
    assert len(m.enumerate(h, cap=6)) == 6
    with pytest.raises(EnumerationCapExceeded):
        m.enumerate(h, cap=5)


def test_dump_golden(backend):
    m = Manager("ab", backend=backend)
    h = m.from_sets([{"a", "b"}, {"b"}])
    assert m.dump(h) == "n4: a then=n2 else=n2\n  n2: b then=1 else=0\n  n2 (shared)"
    assert m.dump(m.bottom()) == "0"
    assert m.dump(m.unit()) == "1"


def test_count_is_exact_beyond_machine_words(backend):
    m = Manager(range(70), backend=backend)
    assert m.count(powerset(m, 70)) == 2**70


@pytest.mark.parametrize("wanted", ["pure", "auto"])
def test_backend_selected_from_environment(wanted):
    env = dict(os.environ, EXACTLRU_BACKEND=wanted)
    out = subprocess.run(
        [sys.executable, "-c", "import exactlru.zdd as z; print(z.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    expected = "pure" if wanted == "pure" else ("native" if "native" in KERNELS else "pure")
    assert out == expected


def test_unavailable_backend_is_an_error():
    env = dict(os.environ, EXACTLRU_BACKEND="gpu")
    r = subprocess.run([sys.executable, "-c", "import exactlru.zdd"], env=env, capture_output=True, text=True)
    assert r.returncode != 0 and "EXACTLRU_BACKEND" in r.stderr


def S(*members):
    return {frozenset(m) for m in members}


def test_worked_examples(backend):
    m = Manager("abcdevw", backend=backend)
    F = m.from_sets
    three = F([set("bce"), set("bcd"), set("b")])
    assert fam(m, m.minimal(three)) == S("b")
    assert fam(m, m.maximal(three)) == S("bce", "bcd")
    assert fam(m, m.min_union(F(["a", "bc"]), F(["b", "ac", "d"]))) == S("a", "b", "d")
    assert fam(m, m.max_union(F(["a"]), F(["ab"]))) == S("ab")
    assert fam(m, m.add_element_min(F(["v", "w"]), "v")) == S("v")
    assert fam(m, m.add_element_max(F(["v", "w"]), "v")) == S("vw")
    assert m.add_element_min(m.bottom(), "v") == m.bottom()
    assert fam(m, m.truncate(F(["a", "ab", "bcd"]), 2)) == S("a", "ab")
    assert m.truncate(m.bottom(), 3) == m.bottom()
    assert m.has_set_of_size_at_least(F(["ab", "c"]), 2)
    assert not m.has_set_of_size_at_least(m.unit(), 1)
    assert not m.has_set_of_size_at_least(m.bottom(), 0)


def _nodes(m, h):
    k, seen, stack = m.kernel, set(), [h.ref]
    while stack:
        p = stack.pop()
        if p > 1 and p not in seen:
            seen.add(p)
            stack += [k.hi_of(p), k.lo_of(p)]
    return seen


@pytest.mark.parametrize("be", BACKENDS)
@settings(max_examples=60, deadline=None)
@given(f=st.sets(st.frozensets(st.integers(0, 11), max_size=12), max_size=30), m1=st.integers(0, 12),
       n1=st.integers(0, 12))
def test_structure_and_algebraic_laws(be, f, m1, n1):
    m = Manager(range(12), backend=be)
    k = m.kernel
    F = m.from_sets(f)
    for p in _nodes(m, m.union(F, m.maximal(F))):
        assert k.hi_of(p) != 0
        for c in (k.hi_of(p), k.lo_of(p)):
            assert k.var_of(p) < k.var_of(c)
    mn = m.minimal(F)
    assert m.minimal(mn) == mn and m.maximal(m.maximal(F)) == m.maximal(F)
    assert m.truncate(m.truncate(F, m1), n1) == m.truncate(F, min(m1, n1))
    # the size test agrees with the truncate formulation
    assert m.has_set_of_size_at_least(F, 0) == bool(f)
    for n in range(1, 13):
        assert m.has_set_of_size_at_least(F, n) == (m.truncate(F, n - 1) != F)
