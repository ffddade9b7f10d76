"""Zero-suppressed decision diagrams for families of sets of blocks.

A :class:`Manager` owns a node store over a fixed variable order; every
family it builds is returned as a :class:`ZddHandle`.  Handles from the same
manager compare equal exactly when they denote the same family.

The node store and the recursive operations live in a *kernel*.  A compiled
kernel (``_ckernel``) is used when it was built; otherwise the pure-Python
``_pykernel`` is used.  Set ``EXACTLRU_BACKEND=pure`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

KERNELS = {"pure": _pykernel.Kernel}
if _ckernel is not None:
    KERNELS["native"] = _ckernel.Kernel


def default_backend() -> str:
    wanted = os.environ.get("EXACTLRU_BACKEND", "auto")
    if wanted == "auto":
        return "native" if "native" in KERNELS else "pure"
    if wanted not in KERNELS:
        raise RuntimeError(f"EXACTLRU_BACKEND={wanted!r} is not available; have {sorted(KERNELS)}")
    return wanted


BACKEND = default_backend()


class EnumerationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ZddHandle:
    manager: "Manager"
    ref: int

    def __repr__(self):
        return f"ZddHandle({self.ref})"

    def __iter__(self):
        return iter(self.manager.enumerate(self))

    def __len__(self):
        return self.manager.count(self)


class Manager:
    """Node store, memo table and variable order for one analysis.

    ``order`` lists the set elements (blocks); its position defines the
    variable index.  Elements not listed are appended on first use.  Without
    an order, elements are the variable indices themselves.
    """

    def __init__(
        self,
        order: Iterable[Hashable] | None = None,
        *,
        backend: str | None = None,
        memo: bool = True,
        memo_limit: int = 1 << 20,
    ):
        self.backend = backend or BACKEND
        self._k = KERNELS[self.backend](memo, memo_limit)
        self._identity = order is None
        self._labels: list = list(order) if order is not None else []
        self._index = {b: i for i, b in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise ValueError("variable order has duplicates")
        self._count_memo: dict[int, int] = {0: 0, 1: 1}

    # -- plumbing ---------------------------------------------------------

    def var(self, element) -> int:
        if self._identity:
            if not isinstance(element, int) or element < 0:
                raise TypeError(f"expected a variable index, got {element!r}")
            return element
        v = self._index.get(element)
        if v is None:
            v = self._index[element] = len(self._labels)
            self._labels.append(element)
        return v

    def label(self, var: int):
        return var if self._identity else self._labels[var]

    @property
    def order(self) -> list:
        return list(self._labels)

    def _ref(self, h: ZddHandle) -> int:
        if h.manager is not self:
            raise ValueError("ZDD handle belongs to a different manager")
        return h.ref

    def _wrap(self, ref: int) -> ZddHandle:
        return ZddHandle(self, ref)

    @property
    def kernel(self):
        return self._k

    def node_count(self) -> int:
        return self._k.size()

    def clear_memo(self) -> None:
        self._k.clear_memo()

    # -- constructors -------------------------------------------------------

    def bottom(self) -> ZddHandle:
        return self._wrap(0)

    def unit(self) -> ZddHandle:
        return self._wrap(1)

    def from_sets(self, sets: Iterable[Iterable]) -> ZddHandle:
        k = self._k
        k.boundary()
        acc = 0
        for s in sets:
            cube = 1
            for v in sorted({self.var(x) for x in s}, reverse=True):
                cube = k.node(v, cube, 0)
            acc = k.union(acc, cube)
        return self._wrap(acc)

    def singleton(self, element) -> ZddHandle:
        return self.from_sets([[element]])

    # -- operations ---------------------------------------------------------

    def union(self, s: ZddHandle, t: ZddHandle) -> ZddHandle:
        a, b = self._ref(s), self._ref(t)
        self._k.boundary()
        return self._wrap(self._k.union(a, b))

    def minimal(self, s: ZddHandle) -> ZddHandle:
        a = self._ref(s)
        self._k.boundary()
        return self._wrap(self._k.minimal(a))

    def maximal(self, s: ZddHandle) -> ZddHandle:
        a = self._ref(s)
        self._k.boundary()
        return self._wrap(self._k.maximal(a))

    def min_union(self, s: ZddHandle, t: ZddHandle) -> ZddHandle:
        """Minimal members of the union of two antichains."""
        a, b = self._ref(s), self._ref(t)
        self._k.boundary()
        return self._wrap(self._k.min_union(a, b))

    def max_union(self, s: ZddHandle, t: ZddHandle) -> ZddHandle:
        """Maximal members of the union of two antichains."""
        a, b = self._ref(s), self._ref(t)
        self._k.boundary()
        return self._wrap(self._k.max_union(a, b))

    def add_element_min(self, s: ZddHandle, element) -> ZddHandle:
        a, v = self._ref(s), self.var(element)
        self._k.boundary()
        return self._wrap(self._k.add_min(a, v))

    def add_element_max(self, s: ZddHandle, element) -> ZddHandle:
        a, v = self._ref(s), self.var(element)
        self._k.boundary()
        return self._wrap(self._k.add_max(a, v))

    def truncate(self, s: ZddHandle, n: int) -> ZddHandle:
        if n < 0:
            raise ValueError("truncation bound must be non-negative")
        a = self._ref(s)
        self._k.boundary()
        return self._wrap(self._k.truncate(a, n))

    def has_set_of_size_at_least(self, s: ZddHandle, n: int) -> bool:
        a = self._ref(s)
        self._k.boundary()
        return self._k.max_card(a) >= n

    def nonsup(self, s: ZddHandle, t: ZddHandle) -> ZddHandle:
        """Members of ``s`` that include no member of ``t``."""
        a, b = self._ref(s), self._ref(t)
        self._k.boundary()
        return self._wrap(self._k.nonsup(a, b))

    def nonsub(self, s: ZddHandle, t: ZddHandle) -> ZddHandle:
        """Members of ``s`` included in no member of ``t``."""
        a, b = self._ref(s), self._ref(t)
        self._k.boundary()
        return self._wrap(self._k.nonsub(a, b))

    # -- inspection -----------------------------------------------------------

    def count(self, s: ZddHandle) -> int:
        k, memo = self._k, self._count_memo
        stack = [self._ref(s)]
        while stack:
            p = stack[-1]
            if p in memo:
                stack.pop()
                continue
            hi, lo = k.hi_of(p), k.lo_of(p)
            missing = [c for c in (hi, lo) if c not in memo]
            if missing:
                stack.extend(missing)
            else:
                memo[p] = memo[hi] + memo[lo]
                stack.pop()
        return memo[s.ref]

    def iter_sets(self, s: ZddHandle) -> Iterator[frozenset]:
        k = self._k
        stack = [(self._ref(s), ())]
        while stack:
            p, prefix = stack.pop()
            if p == 0:
                continue
            if p == 1:
                yield frozenset(self.label(v) for v in prefix)
                continue
            stack.append((k.lo_of(p), prefix))
            stack.append((k.hi_of(p), prefix + (k.var_of(p),)))

    def enumerate(self, s: ZddHandle, cap: int = 100_000) -> list[frozenset]:
        out = []
        for member in self.iter_sets(s):
            if len(out) >= cap:
                raise EnumerationCapExceeded(f"family has more than {cap} members")
            out.append(member)
        return out

    def dump(self, s: ZddHandle) -> str:
        """Indented node listing ``var then else``, depth-first, shared nodes once."""
        k = self._k
        lines: list[str] = []
        seen: set[int] = set()

        def name(p):
            return {0: "0", 1: "1"}.get(p, f"n{p}")

        def walk(p, depth):
            if p <= 1:
                if depth == 0:
                    lines.append(name(p))
                return
            if p in seen:
                lines.append("  " * depth + f"{name(p)} (shared)")
                return
            seen.add(p)
            lines.append(
                "  " * depth
                + f"{name(p)}: {self.label(k.var_of(p))!s} then={name(k.hi_of(p))} else={name(k.lo_of(p))}"
            )
            walk(k.hi_of(p), depth + 1)
            walk(k.lo_of(p), depth + 1)

        walk(self._ref(s), 0)
        return "\n".join(lines)


__all__ = [
    "BACKEND",
    "KERNELS",
    "EnumerationCapExceeded",
    "Manager",
    "ZddHandle",
    "default_backend",
]
