# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ZDD kernel.

Same node numbering and operations as ``_pykernel``, on C arrays.  The
unique table is open-addressed; the operation cache is direct-mapped and
lossy (a colliding entry simply overwrites the old one), which costs a
recomputation at worst since results are canonical.
"""

from libc.stdlib cimport malloc, realloc, free, calloc
from libc.stdint cimport int64_t, uint64_t

cdef int64_t TERMINAL_VAR = 0x7FFFFFFFFFFFFFFF

cdef enum:
    UNION = 1
    MINIMAL
    MAXIMAL
    NONSUP
    NONSUB
    MINUNION
    MAXUNION
    ADDMIN
    ADDMAX
    TRUNC
    MAXCARD

ctypedef struct MemoEntry:
    int64_t tag   # 0 = empty slot
    int64_t a
    int64_t b
    int64_t r


cdef inline uint64_t _mix(uint64_t x, uint64_t y, uint64_t z) nogil:
    cdef uint64_t h = x * <uint64_t>0x9E3779B97F4A7C15
    h ^= y + <uint64_t>0x632BE59BD9B4E019 + (h << 6) + (h >> 2)
    h ^= z + <uint64_t>0x85EBCA77C2B2AE63 + (h << 6) + (h >> 2)
    h ^= h >> 33
    h *= <uint64_t>0xFF51AFD7ED558CCD
    h ^= h >> 33
    return h


cdef class Kernel:
    cdef int64_t *_var
    cdef int64_t *_hi
    cdef int64_t *_lo
    cdef int64_t _n, _cap
    cdef int64_t *_table
    cdef uint64_t _tmask
    cdef MemoEntry *_memo
    cdef uint64_t _mmask, _mmax
    cdef int64_t _mused
    cdef readonly bint memo_enabled
    cdef public int64_t memo_limit
    cdef public int64_t flushes

    name = "native"

    def __cinit__(self, memo=True, memo_limit=1 << 20):
        cdef uint64_t mcap = 1 << 8
        self.memo_enabled = bool(memo)
        self.memo_limit = memo_limit
        self.flushes = 0
        self._cap = 1 << 12
        self._n = 2
        self._var = <int64_t *> malloc(self._cap * sizeof(int64_t))
        self._hi = <int64_t *> malloc(self._cap * sizeof(int64_t))
        self._lo = <int64_t *> malloc(self._cap * sizeof(int64_t))
        self._tmask = (1 << 13) - 1
        self._table = <int64_t *> calloc(self._tmask + 1, sizeof(int64_t))
        self._mmax = 1 << 8
        while self._mmax < <uint64_t>memo_limit and self._mmax < (1 << 22):
            self._mmax <<= 1
        self._mmask = mcap - 1
        self._mused = 0
        self._memo = <MemoEntry *> calloc(mcap, sizeof(MemoEntry)) if self.memo_enabled else NULL
        if not (self._var and self._hi and self._lo and self._table) or (self.memo_enabled and not self._memo):
            raise MemoryError()
        for i in range(2):
            self._var[i] = TERMINAL_VAR
            self._hi[i] = 0
            self._lo[i] = 0

    def __dealloc__(self):
        free(self._var)
        free(self._hi)
        free(self._lo)
        free(self._table)
        free(self._memo)

    # -- store ----------------------------------------------------------

    cdef int _grow_table(self) except -1:
        cdef uint64_t newmask = (self._tmask << 1) | 1
        cdef int64_t *t = <int64_t *> calloc(newmask + 1, sizeof(int64_t))
        cdef int64_t i
        cdef uint64_t h
        if not t:
            raise MemoryError()
        for i in range(2, self._n):
            h = _mix(self._var[i], self._hi[i], self._lo[i]) & newmask
            while t[h]:
                h = (h + 1) & newmask
            t[h] = i
        free(self._table)
        self._table = t
        self._tmask = newmask
        return 0

    cdef int _grow_nodes(self) except -1:
        cdef int64_t cap = self._cap * 2
        cdef int64_t *v = <int64_t *> realloc(self._var, cap * sizeof(int64_t))
        if not v:
            raise MemoryError()
        self._var = v
        v = <int64_t *> realloc(self._hi, cap * sizeof(int64_t))
        if not v:
            raise MemoryError()
        self._hi = v
        v = <int64_t *> realloc(self._lo, cap * sizeof(int64_t))
        if not v:
            raise MemoryError()
        self._lo = v
        self._cap = cap
        return 0

    cdef int64_t _node(self, int64_t v, int64_t hi, int64_t lo) except -1:
        cdef uint64_t h
        cdef int64_t r
        if hi == 0:
            return lo
        h = _mix(v, hi, lo) & self._tmask
        while True:
            r = self._table[h]
            if r == 0:
                break
            if self._var[r] == v and self._hi[r] == hi and self._lo[r] == lo:
                return r
            h = (h + 1) & self._tmask
        if self._n == self._cap:
            self._grow_nodes()
        r = self._n
        self._n += 1
        self._var[r] = v
        self._hi[r] = hi
        self._lo[r] = lo
        self._table[h] = r
        if <uint64_t>(2 * self._n) > self._tmask:
            self._grow_table()
        return r

    cdef void _grow_memo(self):
        # On allocation failure the cache just stays at its current size.
        cdef uint64_t newmask = (self._mmask << 1) | 1
        cdef MemoEntry *m = <MemoEntry *> calloc(newmask + 1, sizeof(MemoEntry))
        cdef uint64_t i, h
        if not m:
            return
        self._mused = 0
        for i in range(self._mmask + 1):
            if self._memo[i].tag:
                h = _mix(self._memo[i].tag, self._memo[i].a, self._memo[i].b) & newmask
                if not m[h].tag:
                    self._mused += 1
                m[h] = self._memo[i]
        free(self._memo)
        self._memo = m
        self._mmask = newmask

    cdef inline bint _lookup(self, int64_t tag, int64_t a, int64_t b, int64_t *out):
        cdef MemoEntry *e
        if not self.memo_enabled:
            return False
        e = &self._memo[_mix(tag, a, b) & self._mmask]
        if e.tag == tag and e.a == a and e.b == b:
            out[0] = e.r
            return True
        return False

    cdef inline void _store(self, int64_t tag, int64_t a, int64_t b, int64_t r):
        cdef MemoEntry *e
        if not self.memo_enabled:
            return
        e = &self._memo[_mix(tag, a, b) & self._mmask]
        if e.tag == 0:
            self._mused += 1
            if <uint64_t>(2 * self._mused) > self._mmask and self._mmask + 1 < self._mmax:
                self._grow_memo()
                e = &self._memo[_mix(tag, a, b) & self._mmask]
                if e.tag == 0:
                    self._mused += 1
        e.tag = tag
        e.a = a
        e.b = b
        e.r = r

    cdef inline bint _has_empty(self, int64_t p):
        while p > 1:
            p = self._lo[p]
        return p == 1

    # -- recursive operations ---------------------------------------------

    cdef int64_t _union(self, int64_t p, int64_t q) except -1:
        cdef int64_t r, v, p1, p0, q1, q0, t
        if p == 0:
            return q
        if q == 0 or p == q:
            return p
        if p > q:
            p, q = q, p
        if self._lookup(UNION, p, q, &r):
            return r
        v = min(self._var[p], self._var[q])
        if self._var[p] == v:
            p1 = self._hi[p]; p0 = self._lo[p]
        else:
            p1 = 0; p0 = p
        if self._var[q] == v:
            q1 = self._hi[q]; q0 = self._lo[q]
        else:
            q1 = 0; q0 = q
        t = self._union(p1, q1)
        r = self._node(v, t, self._union(p0, q0))
        self._store(UNION, p, q, r)
        return r

    cdef int64_t _nonsup(self, int64_t f, int64_t g) except -1:
        cdef int64_t r, v, f1, f0, g1, g0, t
        if f == 0 or g == 0:
            return f
        if f == g or self._has_empty(g):
            return 0
        if f == 1:
            return 1
        if self._lookup(NONSUP, f, g, &r):
            return r
        v = min(self._var[f], self._var[g])
        if self._var[f] == v:
            f1 = self._hi[f]; f0 = self._lo[f]
        else:
            f1 = 0; f0 = f
        if self._var[g] == v:
            g1 = self._hi[g]; g0 = self._lo[g]
        else:
            g1 = 0; g0 = g
        t = self._nonsup(self._nonsup(f1, g1), g0)
        r = self._node(v, t, self._nonsup(f0, g0))
        self._store(NONSUP, f, g, r)
        return r

    cdef int64_t _nonsub(self, int64_t f, int64_t g) except -1:
        cdef int64_t r, v, f1, f0, g1, g0, t
        if f == 0 or g == 0:
            return f
        if f == g or f == 1:
            return 0
        if self._lookup(NONSUB, f, g, &r):
            return r
        v = min(self._var[f], self._var[g])
        if self._var[f] == v:
            f1 = self._hi[f]; f0 = self._lo[f]
        else:
            f1 = 0; f0 = f
        if self._var[g] == v:
            g1 = self._hi[g]; g0 = self._lo[g]
        else:
            g1 = 0; g0 = g
        t = self._nonsub(f1, g1)
        r = self._node(v, t, self._nonsub(self._nonsub(f0, g0), g1))
        self._store(NONSUB, f, g, r)
        return r

    cdef int64_t _minimal(self, int64_t p) except -1:
        cdef int64_t r, lo
        if p <= 1:
            return p
        if self._lookup(MINIMAL, p, 0, &r):
            return r
        lo = self._minimal(self._lo[p])
        r = self._node(self._var[p], self._nonsup(self._minimal(self._hi[p]), lo), lo)
        self._store(MINIMAL, p, 0, r)
        return r

    cdef int64_t _maximal(self, int64_t p) except -1:
        cdef int64_t r, hi
        if p <= 1:
            return p
        if self._lookup(MAXIMAL, p, 0, &r):
            return r
        hi = self._maximal(self._hi[p])
        r = self._node(self._var[p], hi, self._nonsub(self._maximal(self._lo[p]), hi))
        self._store(MAXIMAL, p, 0, r)
        return r

    cdef int64_t _min_union(self, int64_t p, int64_t q) except -1:
        cdef int64_t r, v, p1, p0, q1, q0, lo
        if p == 0:
            return q
        if q == 0 or p == q:
            return p
        if p == 1 or q == 1:
            return 1
        if p > q:
            p, q = q, p
        if self._lookup(MINUNION, p, q, &r):
            return r
        v = min(self._var[p], self._var[q])
        if self._var[p] == v:
            p1 = self._hi[p]; p0 = self._lo[p]
        else:
            p1 = 0; p0 = p
        if self._var[q] == v:
            q1 = self._hi[q]; q0 = self._lo[q]
        else:
            q1 = 0; q0 = q
        lo = self._min_union(p0, q0)
        r = self._node(v, self._nonsup(self._min_union(p1, q1), lo), lo)
        self._store(MINUNION, p, q, r)
        return r

    cdef int64_t _max_union(self, int64_t p, int64_t q) except -1:
        cdef int64_t r, v, p1, p0, q1, q0, hi
        if p == 0 or p == 1:
            return q if q != 0 else p
        if q == 0 or q == 1 or p == q:
            return p
        if p > q:
            p, q = q, p
        if self._lookup(MAXUNION, p, q, &r):
            return r
        v = min(self._var[p], self._var[q])
        if self._var[p] == v:
            p1 = self._hi[p]; p0 = self._lo[p]
        else:
            p1 = 0; p0 = p
        if self._var[q] == v:
            q1 = self._hi[q]; q0 = self._lo[q]
        else:
            q1 = 0; q0 = q
        hi = self._max_union(p1, q1)
        r = self._node(v, hi, self._nonsub(self._max_union(p0, q0), hi))
        self._store(MAXUNION, p, q, r)
        return r

    cdef int64_t _add_min(self, int64_t p, int64_t v) except -1:
        cdef int64_t r, u, lo
        if p == 0:
            return 0
        if p == 1:
            return self._node(v, 1, 0)
        u = self._var[p]
        if u > v:
            return self._node(v, p, 0)
        if u == v:
            return self._node(v, self._min_union(self._hi[p], self._lo[p]), 0)
        if self._lookup(ADDMIN, p, v, &r):
            return r
        lo = self._add_min(self._lo[p], v)
        r = self._node(u, self._nonsup(self._add_min(self._hi[p], v), lo), lo)
        self._store(ADDMIN, p, v, r)
        return r

    cdef int64_t _add_max(self, int64_t p, int64_t v) except -1:
        cdef int64_t r, u, hi
        if p == 0:
            return 0
        if p == 1:
            return self._node(v, 1, 0)
        u = self._var[p]
        if u > v:
            return self._node(v, p, 0)
        if u == v:
            return self._node(v, self._max_union(self._hi[p], self._lo[p]), 0)
        if self._lookup(ADDMAX, p, v, &r):
            return r
        hi = self._add_max(self._hi[p], v)
        r = self._node(u, hi, self._nonsub(self._add_max(self._lo[p], v), hi))
        self._store(ADDMAX, p, v, r)
        return r

    cdef int64_t _truncate(self, int64_t p, int64_t n) except -1:
        cdef int64_t r, t
        if p <= 1:
            return p
        if self._lookup(TRUNC, p, n, &r):
            return r
        if n == 0:
            r = self._truncate(self._lo[p], 0)
        else:
            t = self._truncate(self._hi[p], n - 1)
            r = self._node(self._var[p], t, self._truncate(self._lo[p], n))
        self._store(TRUNC, p, n, r)
        return r

    cdef int64_t _max_card(self, int64_t p):
        cdef int64_t r, a, b
        if p <= 1:
            return p - 1
        if self._lookup(MAXCARD, p, 0, &r):
            return r
        a = self._max_card(self._hi[p]) + 1
        b = self._max_card(self._lo[p])
        r = a if a > b else b
        self._store(MAXCARD, p, 0, r)
        return r

    # -- Python API (mirrors _pykernel.Kernel) -----------------------------

    def node(self, v, hi, lo):
        return self._node(v, hi, lo)

    def var_of(self, int64_t p):
        return self._var[p]

    def hi_of(self, int64_t p):
        return self._hi[p]

    def lo_of(self, int64_t p):
        return self._lo[p]

    def size(self):
        return self._n

    def memo_size(self):
        return self._mused

    def clear_memo(self):
        cdef uint64_t i
        if self._memo:
            for i in range(self._mmask + 1):
                self._memo[i].tag = 0
        self._mused = 0

    def boundary(self):
        if self._mused > self.memo_limit:
            self.clear_memo()
            self.flushes += 1

    def has_empty(self, int64_t p):
        return self._has_empty(p)

    def union(self, int64_t p, int64_t q):
        return self._union(p, q)

    def nonsup(self, int64_t f, int64_t g):
        return self._nonsup(f, g)

    def nonsub(self, int64_t f, int64_t g):
        return self._nonsub(f, g)

    def minimal(self, int64_t p):
        return self._minimal(p)

    def maximal(self, int64_t p):
        return self._maximal(p)

    def min_union(self, int64_t p, int64_t q):
        return self._min_union(p, q)

    def max_union(self, int64_t p, int64_t q):
        return self._max_union(p, q)

    def add_min(self, int64_t p, int64_t v):
        return self._add_min(p, v)

    def add_max(self, int64_t p, int64_t v):
        return self._add_max(p, v)

    def truncate(self, int64_t p, int64_t n):
        return self._truncate(p, n)

    def max_card(self, int64_t p):
        return self._max_card(p)
