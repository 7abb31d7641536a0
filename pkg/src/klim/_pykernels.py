"""Pure-Python hot kernels.

Reference implementation of the routines in ``_ckernels.pyx``; used when the
compiled extension is unavailable or ``KLIM_PURE_PYTHON=1`` is set.

Atom sets are encoded as bitmasks over atom indices and atoms as bitmasks over
elements (bit ``x`` for element ``x``).
"""

from math import gcd

BACKEND = "python"


def _blocks(atom_masks, S):
    blocks = []
    while S:
        low = S & -S
        S ^= low
        merged = atom_masks[low.bit_length() - 1]
        keep = []
        for b in blocks:
            if b & merged:
                merged |= b
            else:
                keep.append(b)
        keep.append(merged)
        blocks = keep
    return blocks


def codim_mask(atom_masks, S):
    """Codimension of X(S) for a bitmask S over atom indices."""
    blocks = _blocks(atom_masks, S)
    return sum(bin(b).count("1") for b in blocks) - len(blocks)


def removable(atom_masks, S):
    """Atom indices i in S such that X(S minus i) = X(S), ascending."""
    out = []
    rest = S
    while rest:
        low = rest & -rest
        rest ^= low
        i = low.bit_length() - 1
        a = atom_masks[i]
        for b in _blocks(atom_masks, S ^ low):
            if b & a:
                if a & ~b == 0:
                    out.append(i)
                break
    return out


def d_squared_defects(atom_masks, masks):
    """Masks S for which d(d(a_S)) has a nonzero coefficient."""
    bad = []
    for S in masks:
        acc = {}
        for i in removable(atom_masks, S):
            s1 = _sign(S, i)
            T = S ^ (1 << i)
            for j in removable(atom_masks, T):
                key = T ^ (1 << j)
                acc[key] = acc.get(key, 0) + s1 * _sign(T, j)
        if any(acc.values()):
            bad.append(S)
    return bad


def _sign(S, i):
    j = bin(S & ((1 << i) - 1)).count("1") + 1
    return -1 if j & 1 else 1


def enumerate_generators(atom_masks, max_atoms):
    """All subsets S with popcount <= max_atoms, as parallel lists (masks, codims).

    Order: by size, then colexicographic within a size.
    """
    n = len(atom_masks)
    masks = []
    codims = []
    for r in range(0, min(max_atoms, n) + 1):
        if r == 0:
            masks.append(0)
            codims.append(0)
            continue
        S = (1 << r) - 1
        limit = 1 << n
        while S < limit:
            masks.append(S)
            codims.append(codim_mask(atom_masks, S))
            # Gosper's hack: next mask with the same popcount
            c = S & -S
            r_ = S + c
            S = (((r_ ^ S) >> 2) // c) | r_
    return masks, codims


def _row_content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def rank_int_rows(rows, ncols=None):
    """Exact rank of an integer matrix given as a list of ``{col: int}`` rows.

    Fraction-free elimination: each incoming row is reduced against the pivot
    table keyed by leading column, then stripped of its content.  Rows are
    processed shortest first (ties by input index) to limit fill.
    """
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    pivots = {}
    for i in order:
        r = {c: v for c, v in rows[i].items() if v}
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = _row_content(r)
                break
            a = p[c]
            b = r[c]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {}
            for col, v in r.items():
                new[col] = a * v
            for col, v in p.items():
                w = new.get(col, 0) - b * v
                if w:
                    new[col] = w
                else:
                    new.pop(col, None)
            r = _row_content(new)
    return len(pivots)
