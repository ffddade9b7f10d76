"""Pure-Python ZDD kernel.

Nodes are integers.  ``0`` is the empty family and ``1`` the family holding
only the empty set; every other id indexes the parallel ``var``/``hi``/``lo``
arrays.  ``hi`` is the branch whose sets contain ``var``.  The unique table
guarantees that equal families get equal ids.
"""

import sys

EMPTY = 0
BASE = 1
TERMINAL_VAR = sys.maxsize

_UNION, _MINIMAL, _MAXIMAL, _NONSUP, _NONSUB = range(5)
_MINUNION, _MAXUNION, _ADDMIN, _ADDMAX, _TRUNC, _MAXCARD = range(5, 11)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class _NoMemo(dict):
    def __setitem__(self, key, value):
        pass


class Kernel:
    name = "pure"

    def __init__(self, memo=True, memo_limit=1 << 20):
        self._var = [TERMINAL_VAR, TERMINAL_VAR]
        self._hi = [0, 0]
        self._lo = [0, 0]
        self._unique = {}
        self.memo_enabled = memo
        self.memo_limit = memo_limit
        self.flushes = 0
        self._memo = {} if memo else _NoMemo()

    # -- store ----------------------------------------------------------

    def node(self, v, hi, lo):
        if hi == 0:
            return lo
        key = (v, hi, lo)
        r = self._unique.get(key)
        if r is None:
            r = len(self._var)
            self._var.append(v)
            self._hi.append(hi)
            self._lo.append(lo)
            self._unique[key] = r
        return r

    def var_of(self, p):
        return self._var[p]

    def hi_of(self, p):
        return self._hi[p]

    def lo_of(self, p):
        return self._lo[p]

    def size(self):
        return len(self._var)

    def memo_size(self):
        return len(self._memo)

    def clear_memo(self):
        self._memo.clear()

    def boundary(self):
        """Called between public operations; flushes an oversized memo."""
        if len(self._memo) > self.memo_limit:
            self._memo.clear()
            self.flushes += 1

    def has_empty(self, p):
        lo = self._lo
        while p > 1:
            p = lo[p]
        return p == 1

    def _cof(self, p, v):
        if self._var[p] == v:
            return self._hi[p], self._lo[p]
        return 0, p

    # -- plain family algebra --------------------------------------------

    def union(self, p, q):
        if p == 0:
            return q
        if q == 0 or p == q:
            return p
        if p > q:
            p, q = q, p
        key = (_UNION, p, q)
        r = self._memo.get(key)
        if r is not None:
            return r
        v = min(self._var[p], self._var[q])
        p1, p0 = self._cof(p, v)
        q1, q0 = self._cof(q, v)
        r = self.node(v, self.union(p1, q1), self.union(p0, q0))
        self._memo[key] = r
        return r

    def nonsup(self, f, g):
        """Members of ``f`` that include no member of ``g``."""
        if f == 0 or g == 0:
            return f
        if f == g or self.has_empty(g):
            return 0
        if f == 1:
            return 1
        key = (_NONSUP, f, g)
        r = self._memo.get(key)
        if r is not None:
            return r
        v = min(self._var[f], self._var[g])
        f1, f0 = self._cof(f, v)
        g1, g0 = self._cof(g, v)
        r = self.node(v, self.nonsup(self.nonsup(f1, g1), g0), self.nonsup(f0, g0))
        self._memo[key] = r
        return r

    def nonsub(self, f, g):
        """Members of ``f`` included in no member of ``g``."""
        if f == 0 or g == 0:
            return f
        if f == g or f == 1:
            return 0
        key = (_NONSUB, f, g)
        r = self._memo.get(key)
        if r is not None:
            return r
        v = min(self._var[f], self._var[g])
        f1, f0 = self._cof(f, v)
        g1, g0 = self._cof(g, v)
        r = self.node(v, self.nonsub(f1, g1), self.nonsub(self.nonsub(f0, g0), g1))
        self._memo[key] = r
        return r

    def minimal(self, p):
        if p <= 1:
            return p
        key = (_MINIMAL, p, 0)
        r = self._memo.get(key)
        if r is not None:
            return r
        lo = self.minimal(self._lo[p])
        r = self.node(self._var[p], self.nonsup(self.minimal(self._hi[p]), lo), lo)
        self._memo[key] = r
        return r

    def maximal(self, p):
        if p <= 1:
            return p
        key = (_MAXIMAL, p, 0)
        r = self._memo.get(key)
        if r is not None:
            return r
        hi = self.maximal(self._hi[p])
        r = self.node(self._var[p], hi, self.nonsub(self.maximal(self._lo[p]), hi))
        self._memo[key] = r
        return r

    # -- antichain operations (operands must be antichains) --------------

    def min_union(self, p, q):
        if p == 0:
            return q
        if q == 0 or p == q:
            return p
        if p == 1 or q == 1:
            return 1
        if p > q:
            p, q = q, p
        key = (_MINUNION, p, q)
        r = self._memo.get(key)
        if r is not None:
            return r
        v = min(self._var[p], self._var[q])
        p1, p0 = self._cof(p, v)
        q1, q0 = self._cof(q, v)
        lo = self.min_union(p0, q0)
        r = self.node(v, self.nonsup(self.min_union(p1, q1), lo), lo)
        self._memo[key] = r
        return r

    def max_union(self, p, q):
        if p == 0 or p == 1:
            return q if q != 0 else p
        if q == 0 or q == 1 or p == q:
            return p
        if p > q:
            p, q = q, p
        key = (_MAXUNION, p, q)
        r = self._memo.get(key)
        if r is not None:
            return r
        v = min(self._var[p], self._var[q])
        p1, p0 = self._cof(p, v)
        q1, q0 = self._cof(q, v)
        hi = self.max_union(p1, q1)
        r = self.node(v, hi, self.nonsub(self.max_union(p0, q0), hi))
        self._memo[key] = r
        return r

    def add_min(self, p, v):
        """Minimal members of ``{s | {v} : s in p}``."""
        if p == 0:
            return 0
        if p == 1:
            return self.node(v, 1, 0)
        u = self._var[p]
        if u > v:
            return self.node(v, p, 0)
        if u == v:
            return self.node(v, self.min_union(self._hi[p], self._lo[p]), 0)
        key = (_ADDMIN, p, v)
        r = self._memo.get(key)
        if r is not None:
            return r
        lo = self.add_min(self._lo[p], v)
        r = self.node(u, self.nonsup(self.add_min(self._hi[p], v), lo), lo)
        self._memo[key] = r
        return r

    def add_max(self, p, v):
        """Maximal members of ``{s | {v} : s in p}``."""
        if p == 0:
            return 0
        if p == 1:
            return self.node(v, 1, 0)
        u = self._var[p]
        if u > v:
            return self.node(v, p, 0)
        if u == v:
            return self.node(v, self.max_union(self._hi[p], self._lo[p]), 0)
        key = (_ADDMAX, p, v)
        r = self._memo.get(key)
        if r is not None:
            return r
        hi = self.add_max(self._hi[p], v)
        r = self.node(u, hi, self.nonsub(self.add_max(self._lo[p], v), hi))
        self._memo[key] = r
        return r

    # -- cardinality ------------------------------------------------------

    def truncate(self, p, n):
        """Members of ``p`` with at most ``n`` elements."""
        if p <= 1:
            return p
        key = (_TRUNC, p, n)
        r = self._memo.get(key)
        if r is not None:
            return r
        if n == 0:
            r = self.truncate(self._lo[p], 0)
        else:
            r = self.node(self._var[p], self.truncate(self._hi[p], n - 1), self.truncate(self._lo[p], n))
        self._memo[key] = r
        return r

    def max_card(self, p):
        """Largest member cardinality; -1 for the empty family."""
        if p <= 1:
            return p - 1
        key = (_MAXCARD, p, 0)
        r = self._memo.get(key)
        if r is not None:
            return r
        r = max(self.max_card(self._hi[p]) + 1, self.max_card(self._lo[p]))
        self._memo[key] = r
        return r
