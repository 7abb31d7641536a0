"""Exact sparse linear algebra over the rationals.

Matrices represent linear maps acting on column vectors: an ``nrows x ncols``
matrix maps a space of dimension ``ncols`` into one of dimension ``nrows``.
Vectors are dicts ``index -> coefficient`` with zeros absent.  Ranks go
through the integer elimination kernel; bases use fraction-free echelon forms.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

from . import kernels

Vector = dict


class SparseMatrix:
    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows: int, ncols: int, entries: Mapping | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix shape")
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            if v:
                self.entries[r, c] = v

    @classmethod
    def from_dense(cls, rows: list[list]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        return cls(nrows, ncols, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)})

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def to_dense(self) -> list[list]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def col_dicts(self) -> list[dict]:
        cols = [dict() for _ in range(self.ncols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, {(c, r): v for (r, c), v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        rows = self.row_dicts()
        by_row: dict[int, dict] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, {})[c] = v
        out = {}
        for i, row in enumerate(rows):
            acc: dict[int, object] = {}
            for k, a in row.items():
                for j, b in by_row.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + a * b
            for j, v in acc.items():
                if v:
                    out[i, j] = v
        return SparseMatrix(self.nrows, other.ncols, out)

    def matvec(self, v: Mapping[int, object]) -> Vector:
        out: dict[int, object] = {}
        for (r, c), a in self.entries.items():
            x = v.get(c)
            if x:
                out[r] = out.get(r, 0) + a * x
        return {r: x for r, x in out.items() if x}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.entries) == (other.nrows, other.ncols, other.entries)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}, {self.ncols}, nnz={len(self.entries)})"


def _integer_rows(lines: Iterable[dict]) -> list[dict]:
    out = []
    for row in lines:
        if not row:
            continue
        dens = [v.denominator for v in row.values() if isinstance(v, Fraction)]
        m = lcm(*dens) if dens else 1
        out.append({c: int(v * m) for c, v in row.items()})
    return out


def rank(M: SparseMatrix) -> int:
    """Rank over Q."""
    if not M.entries:
        return 0
    rows = M.row_dicts()
    cols = M.col_dicts()
    nr = sum(1 for r in rows if r)
    nc = sum(1 for c in cols if c)
    if nc < nr:
        return kernels.rank_int_rows(_integer_rows(cols), M.nrows)
    return kernels.rank_int_rows(_integer_rows(rows), M.ncols)


def _primitive(row: dict) -> dict:
    """Integer row divided by its content, with a positive leading entry."""
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if row[min(row)] < 0:
        g = -g
    if g in (1, 0):
        return row
    return {c: v // g for c, v in row.items()}


def _as_integer(v: Mapping) -> dict:
    r = {c: x for c, x in v.items() if x}
    if not r:
        return r
    return _primitive(_integer_rows([r])[0])


class Echelon:
    """Incremental row echelon form over Q, kept as primitive integer rows."""

    def __init__(self, dim: int):
        self.dim = dim
        self.pivots: dict[int, dict] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, v: Mapping) -> dict:
        """A nonzero multiple of ``v`` minus its projection; empty iff ``v`` is in the span."""
        r = _as_integer(v)
        pivots = self.pivots
        while r:
            hits = [c for c in r if c in pivots]
            if not hits:
                return r
            c = min(hits)
            p = pivots[c]
            g = gcd(p[c], r[c])
            a, b = p[c] // g, r[c] // g
            new = {col: a * x for col, x in r.items()}
            for col, x in p.items():
                w = new.get(col, 0) - b * x
                if w:
                    new[col] = w
                else:
                    new.pop(col, None)
            r = _primitive(new) if new else new
        return r

    def add(self, v: Mapping) -> bool:
        """Insert ``v``; return True iff it was independent of what is stored."""
        r = self.reduce(v)
        if not r:
            return False
        self.pivots[min(r)] = r
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def reduced_rows(self) -> dict[int, dict]:
        """Fully reduced (RREF) copy of the pivot rows keyed by pivot column, monic."""
        rows = {c: dict(r) for c, r in self.pivots.items()}
        for c in sorted(rows, reverse=True):
            pr = rows[c]
            for c2 in list(rows):
                r2 = rows[c2]
                if c2 < c and c in r2:
                    g = gcd(pr[c], r2[c])
                    a, b = pr[c] // g, r2[c] // g
                    new = {col: a * x for col, x in r2.items()}
                    for col, x in pr.items():
                        w = new.get(col, 0) - b * x
                        if w:
                            new[col] = w
                        else:
                            new.pop(col, None)
                    rows[c2] = _primitive(new)
        return {c: {col: Fraction(x, r[c]) for col, x in r.items()} for c, r in rows.items()}


class VectorSpaceBasis:
    """Linearly independent sparse vectors of a common dimension.

    ``trusted=True`` skips the independence check for vectors that are
    independent by construction; the echelon form is then built on demand.
    """

    def __init__(self, dim: int, vectors: Iterable[Mapping] = (), trusted: bool = False):
        self.dim = dim
        self.vectors: list[dict] = []
        self._echelon: Echelon | None = None if trusted else Echelon(dim)
        for v in vectors:
            v = {c: x for c, x in v.items() if x}
            if any(not 0 <= c < dim for c in v):
                raise IndexError("vector index out of range")
            if self._echelon is not None and not self._echelon.add(v):
                raise ValueError("vectors are linearly dependent")
            self.vectors.append(v)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def contains(self, v: Mapping) -> bool:
        if self._echelon is None:
            self._echelon = Echelon(self.dim)
            for u in self.vectors:
                self._echelon.add(u)
        return self._echelon.contains(v)

    def __repr__(self) -> str:
        return f"VectorSpaceBasis(dim={self.dim}, size={len(self.vectors)})"


def kernel_basis(M: SparseMatrix) -> VectorSpaceBasis:
    """One integer vector per free column; independent because each owns its free coordinate."""
    ech = Echelon(M.ncols)
    for row in M.row_dicts():
        if row:
            ech.add(row)
    rref = ech.reduced_rows()
    free = [c for c in range(M.ncols) if c not in rref]
    by_free: dict[int, dict] = {f: {f: Fraction(1)} for f in free}
    for p, row in rref.items():
        for col, x in row.items():
            if col != p:
                by_free[col][p] = -x
    vecs = [_as_integer(by_free[f]) for f in free]
    return VectorSpaceBasis(M.ncols, vecs, trusted=True)


def image_basis(M: SparseMatrix) -> VectorSpaceBasis:
    """Echelon rows of the column space; independent by their distinct leading columns."""
    ech = Echelon(M.nrows)
    for col in M.col_dicts():
        if col:
            ech.add(col)
    return VectorSpaceBasis(M.nrows, [ech.pivots[c] for c in sorted(ech.pivots)], trusted=True)


def homology_dim(d_out: SparseMatrix, d_in: SparseMatrix) -> int:
    """``dim ker(d_out) - rank(d_in)`` for ``d_in: A -> B`` and ``d_out: B -> C``."""
    if d_out.ncols != d_in.nrows:
        raise ValueError(f"middle dimensions disagree: {d_out.ncols} vs {d_in.nrows}")
    if not (d_out @ d_in).is_zero():
        raise ValueError("d_out @ d_in is nonzero; not a chain complex")
    return d_out.ncols - rank(d_out) - rank(d_in)


def in_span(v: Mapping, B: VectorSpaceBasis) -> bool:
    if any(not 0 <= c < B.dim for c, x in v.items() if x):
        raise IndexError("vector index out of range")
    return B.contains(v)


def quotient_representatives(cycles: VectorSpaceBasis, boundaries: VectorSpaceBasis) -> VectorSpaceBasis:
    """Members of ``cycles`` completing ``boundaries`` to a basis of span(cycles)."""
    if cycles.dim != boundaries.dim:
        raise ValueError("dimension mismatch")
    for b in boundaries:
        if not cycles.contains(b):
            raise ValueError("boundaries are not contained in the span of cycles")
    ech = Echelon(cycles.dim)
    for b in boundaries:
        ech.add(b)
    return VectorSpaceBasis(cycles.dim, [z for z in cycles if ech.add(z)], trusted=True)
