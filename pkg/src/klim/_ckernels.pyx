# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled hot kernels; same functions and results as ``_pykernels``.

Atom sets are limited to 64 atoms and elements to bits 0..63.  Rank
elimination runs in 64-bit integers and raises OverflowError when an entry
would not fit; ``klim.kernels`` then reruns it with Python integers.
"""

from libc.stdint cimport INT64_MIN, uint64_t
from libcpp.algorithm cimport sort
from libcpp.pair cimport pair
from libcpp.vector cimport vector

BACKEND = "cython"

cdef extern from *:
    """
    static inline int klim_mul(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static inline int klim_sub(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    static inline int klim_popcount(unsigned long long x) { return __builtin_popcountll(x); }
    static inline int klim_ctz(unsigned long long x) { return __builtin_ctzll(x); }
    """
    int klim_mul(long long a, long long b, long long *r) nogil
    int klim_sub(long long a, long long b, long long *r) nogil
    int klim_popcount(unsigned long long x) nogil
    int klim_ctz(unsigned long long x) nogil

ctypedef pair[int, long long] Entry
ctypedef vector[Entry] Row


cdef int _load(atom_masks, uint64_t *am) except -1:
    cdef Py_ssize_t n = len(atom_masks)
    if n > 64:
        raise OverflowError("more than 64 atoms")
    for i in range(n):
        am[i] = atom_masks[i]
    return <int>n


cdef int _blocks(const uint64_t *am, uint64_t S, uint64_t *blocks) nogil:
    cdef int nb = 0, j, keep
    cdef uint64_t merged
    while S:
        merged = am[klim_ctz(S)]
        S &= S - 1
        keep = 0
        for j in range(nb):
            if blocks[j] & merged:
                merged |= blocks[j]
            else:
                blocks[keep] = blocks[j]
                keep += 1
        blocks[keep] = merged
        nb = keep + 1
    return nb


cdef int _codim(const uint64_t *am, uint64_t S) nogil:
    cdef uint64_t blocks[64]
    cdef int nb = _blocks(am, S, blocks)
    cdef int total = 0
    for j in range(nb):
        total += klim_popcount(blocks[j])
    return total - nb


cdef int _removable(const uint64_t *am, uint64_t S, int *out) nogil:
    cdef uint64_t blocks[64]
    cdef uint64_t rest = S, a
    cdef int count = 0, i, nb, j
    while rest:
        i = klim_ctz(rest)
        rest &= rest - 1
        a = am[i]
        nb = _blocks(am, S & ~((<uint64_t>1) << i), blocks)
        for j in range(nb):
            if blocks[j] & a:
                if a & ~blocks[j] == 0:
                    out[count] = i
                    count += 1
                break
    return count


cdef inline int _sign(uint64_t S, int i) nogil:
    cdef int j = klim_popcount(S & (((<uint64_t>1) << i) - 1)) + 1
    return -1 if j & 1 else 1


def codim_mask(atom_masks, S):
    cdef uint64_t am[64]
    _load(atom_masks, am)
    return _codim(am, S)


def removable(atom_masks, S):
    cdef uint64_t am[64]
    cdef int out[64]
    _load(atom_masks, am)
    cdef int c = _removable(am, S, out)
    return [out[i] for i in range(c)]


def enumerate_generators(atom_masks, max_atoms):
    cdef uint64_t am[64]
    cdef int n = _load(atom_masks, am)
    cdef uint64_t S, c, r_, limit
    cdef int r
    masks = []
    codims = []
    if max_atoms > n:
        max_atoms = n
    if n == 64 and max_atoms == 64:
        raise OverflowError("too many atoms to enumerate")
    for r in range(0, max_atoms + 1):
        if r == 0:
            masks.append(0)
            codims.append(0)
            continue
        S = ((<uint64_t>1) << r) - 1
        limit = (<uint64_t>1) << n
        while S < limit:
            masks.append(S)
            codims.append(_codim(am, S))
            c = S & (~S + 1)
            r_ = S + c
            S = (((r_ ^ S) >> 2) // c) | r_
    return masks, codims


def d_squared_defects(atom_masks, masks):
    cdef uint64_t am[64]
    _load(atom_masks, am)
    cdef int first[64]
    cdef int second[64]
    cdef uint64_t keys[4096]
    cdef long long vals[4096]
    cdef int nk, n1, n2, a, b, t, s1, found
    cdef uint64_t S, T, key
    bad = []
    for py_S in masks:
        S = py_S
        nk = 0
        n1 = _removable(am, S, first)
        for a in range(n1):
            s1 = _sign(S, first[a])
            T = S ^ ((<uint64_t>1) << first[a])
            n2 = _removable(am, T, second)
            for b in range(n2):
                key = T ^ ((<uint64_t>1) << second[b])
                found = 0
                for t in range(nk):
                    if keys[t] == key:
                        vals[t] += s1 * _sign(T, second[b])
                        found = 1
                        break
                if not found:
                    keys[nk] = key
                    vals[nk] = s1 * _sign(T, second[b])
                    nk += 1
        for t in range(nk):
            if vals[t] != 0:
                bad.append(py_S)
                break
    return bad


cdef long long _gcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef int _content(Row &r) except -1:
    cdef long long g = 0
    cdef size_t i
    for i in range(r.size()):
        if r[i].second == INT64_MIN:
            raise OverflowError
        g = _gcd(g, r[i].second)
        if g == 1:
            return 0
    if g > 1:
        for i in range(r.size()):
            r[i].second = r[i].second // g
    return 0


cdef int _reduce(const Row &r, const Row &p, long long a, long long b, Row &out) except -1:
    """out = a*r - b*p, both rows sorted by column."""
    cdef size_t i = 0, j = 0
    cdef long long x, y, z
    out.clear()
    while i < r.size() or j < p.size():
        if j >= p.size() or (i < r.size() and r[i].first < p[j].first):
            if klim_mul(a, r[i].second, &z):
                raise OverflowError
            out.push_back(Entry(r[i].first, z))
            i += 1
        elif i >= r.size() or p[j].first < r[i].first:
            if klim_mul(b, p[j].second, &z) or klim_sub(0, z, &z):
                raise OverflowError
            out.push_back(Entry(p[j].first, z))
            j += 1
        else:
            if klim_mul(a, r[i].second, &x) or klim_mul(b, p[j].second, &y) or klim_sub(x, y, &z):
                raise OverflowError
            if z != 0:
                out.push_back(Entry(r[i].first, z))
            i += 1
            j += 1
    return 0


def rank_int_rows(rows, ncols=None):
    """Fraction-free rank over 64-bit integers, same elimination order as the Python kernel."""
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    cdef int width = 0
    for row in rows:
        for c in row:
            if c + 1 > width:
                width = c + 1
    cdef vector[Row] pivots
    cdef vector[char] has
    pivots.resize(width)
    has.resize(width, 0)
    cdef Row r, tmp
    cdef int c0, rank = 0
    cdef long long a, b, g
    for i in order:
        r.clear()
        for col, v in rows[i].items():
            if v:
                r.push_back(Entry(col, v))
        sort(r.begin(), r.end())
        while r.size():
            c0 = r[0].first
            if not has[c0]:
                _content(r)
                pivots[c0] = r
                has[c0] = 1
                rank += 1
                break
            a = pivots[c0][0].second
            b = r[0].second
            g = _gcd(a, b)
            a //= g
            b //= g
            _reduce(r, pivots[c0], a, b, tmp)
            r.swap(tmp)
            _content(r)
    return rank
