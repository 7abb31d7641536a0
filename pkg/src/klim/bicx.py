"""The simplicial differential on the limit complexes and its bicomplex.

``delta`` removes one core element from every member of a family.  Keeping
the halo fixed, the core behaves like a simplex on the vertices outside the
halo, which gives the splitting into augmented simplex chain complexes
implemented by :func:`phi` / :func:`psi`.

The empty family ``UNIT`` spans a summand on which both differentials vanish.
It is kept out of the splitting; the (-1)-simplex of the summand with empty
halo key is the one-member family ``{empty set}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from itertools import combinations

from .atomic import build_complex
from .chains import Chain
from .limit import UNIT, LimitIndex, limit_d, limit_d_chain
from .parallel import pmap
from .ratlin import SparseMatrix, rank
from .report import Report
from .setcore import ArrangementError

Simplex = tuple[int, ...]


def delta(b: LimitIndex) -> Chain:
    out = Chain()
    for i, x in enumerate(b.core, start=1):
        core = b.core[: i - 1] + b.core[i:]
        out.add(LimitIndex(core, b.halo), (-1) ** i)
    return out


def delta_chain(c: Chain) -> Chain:
    return c.apply(delta)


def boundary(s: Simplex) -> Chain:
    """Simplicial boundary with sign ``(-1)^i`` at the 1-based position ``i``."""
    out = Chain()
    for i in range(len(s)):
        out.add(s[:i] + s[i + 1:], (-1) ** (i + 1))
    return out


# -- enumeration of truncations ---------------------------------------------


def families(n: int, m: int, min_size: int = 1):
    """Nonempty families of equal-size subsets of [n] with at most m members, as LimitIndex."""
    ground = range(1, n + 1)
    for q in range(0, n + 1):
        subsets = list(combinations(ground, q))
        for size in range(max(min_size, 1), min(m, len(subsets)) + 1):
            for fam in combinations(subsets, size):
                yield LimitIndex.from_family(fam)


def truncation(n: int, m: int) -> list[LimitIndex]:
    """Generators with union inside [n], at most m members and halo union short of [n].

    Closed under both differentials; the excluded generators are exactly
    those whose summand has no vertices left in [n].
    """
    full = tuple(range(1, n + 1))
    return [b for b in families(n, m) if b.halo_support() != full]


# -- the splitting ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SummandKey:
    i: int
    L: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.L:
            if self.i != 0:
                raise ArrangementError("only i = 0 has the empty label")
            return
        if len(self.L) < 2:
            raise ArrangementError("a nonempty label needs at least two members")
        if any(len(x) != self.i for x in self.L):
            raise ArrangementError(f"label members must have size {self.i}")
        if list(self.L) != sorted(set(self.L)):
            raise ArrangementError("label must be sorted and duplicate-free")
        if set(self.L[0]).intersection(*map(set, self.L[1:])):
            raise ArrangementError("label members must have empty intersection")

    def union(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*map(set, self.L))))

    def __str__(self) -> str:
        return f"({self.i}," + "{" + ",".join("{" + ",".join(map(str, x)) + "}" for x in self.L) + "})"


BAR = SummandKey(0, ())


def summand_key(b: LimitIndex) -> SummandKey:
    if b.is_unit:
        raise ArrangementError("the empty family is not part of the splitting")
    if b.size == 1:
        return BAR
    return SummandKey(len(b.halo[0]), b.halo)


def _relabel(x: int, skip: tuple[int, ...]) -> int:
    return x - sum(1 for y in skip if y < x)


def _unlabel(v: int, skip: tuple[int, ...]) -> int:
    x = v
    for y in skip:
        if y <= x:
            x += 1
    return x


def phi(b: LimitIndex) -> tuple[SummandKey, Simplex]:
    key = summand_key(b)
    skip = key.union()
    return key, tuple(_relabel(x, skip) for x in b.core)


def psi(key: SummandKey, s: Simplex) -> LimitIndex:
    s = tuple(s)
    if list(s) != sorted(set(s)) or (s and s[0] < 1):
        raise ArrangementError(f"not a simplex on positive integers: {s}")
    core = tuple(_unlabel(v, key.union()) for v in s)
    if not key.L:
        return LimitIndex(core, ((),))
    return LimitIndex(core, key.L)


def phi_chain(c: Chain) -> Chain:
    out = Chain()
    for b, v in c.items():
        out.add(phi(b), v)
    return out


def verify_delta_squared(n: int, m: int) -> Report:
    failures = []
    count = 0
    for b in families(n, m):
        count += 1
        dd = delta_chain(delta(b))
        if dd:
            failures.append({"family": str(b), "delta2": {str(x): v for x, v in sorted(dd.items())}})
    if delta_chain(delta(UNIT)):
        failures.append({"family": str(UNIT)})
    return Report("delta2", not failures, {"n": n, "m": m}, {"generators": count + 1, "violations": len(failures)}, failures)


def verify_decomposition(n: int, m: int) -> Report:
    """Round trips of phi/psi and ``phi(delta b) = boundary(phi b)`` on the truncation."""
    failures = []
    gens = list(families(n, m))
    for b in gens:
        key, s = phi(b)
        if psi(key, s) != b:
            failures.append({"kind": "psi.phi", "family": str(b)})
        lhs = phi_chain(delta(b))
        rhs = Chain({(key, t): v for t, v in boundary(s).items()})
        if lhs != rhs:
            failures.append({"kind": "chain map", "family": str(b)})
    keys = sorted({phi(b)[0] for b in gens})
    pairs = 0
    for key in keys:
        room = n - len(key.union())
        for r in range(room + 1):
            for s in combinations(range(1, room + 1), r):
                pairs += 1
                if phi(psi(key, s)) != (key, s):
                    failures.append({"kind": "phi.psi", "key": str(key), "simplex": list(s)})
    return Report(
        "decomp",
        not failures,
        {"n": n, "m": m},
        {"generators": len(gens), "summands": len(keys), "key_simplex_pairs": pairs, "violations": len(failures)},
        failures,
    )


def summand_keys(n: int, m: int) -> list[SummandKey]:
    """Keys with union inside [n] and at most m label members (the empty label included)."""
    return sorted({summand_key(b) for b in families(n, m)})


def _summand_homology(key: SummandKey, n: int) -> dict[int, int]:
    """delta-homology of the summand truncated to vertices in [n], by simplex dimension."""
    vertices = [x for x in range(1, n + 1) if x not in key.union()]
    by_size: dict[int, list[LimitIndex]] = {}
    for r in range(len(vertices) + 1):
        for core in combinations(vertices, r):
            b = LimitIndex(core, key.L if key.L else ((),))
            by_size.setdefault(r, []).append(b)
    index = {b: i for r in by_size for i, b in enumerate(by_size[r])}
    ranks = {}
    for r in by_size:
        if r == 0:
            ranks[r] = 0
            continue
        entries = {}
        for col, b in enumerate(by_size[r]):
            for t, v in delta(b).items():
                entries[index[t], col] = v
        ranks[r] = rank(SparseMatrix(len(by_size[r - 1]), len(by_size[r]), entries))
    return {r - 1: len(by_size[r]) - ranks[r] - ranks.get(r + 1, 0) for r in sorted(by_size)}


def live_summand_keys(n: int) -> list[SummandKey]:
    """Every key whose label union is a proper subset of [n], with no bound on |L|."""
    keys = [BAR]
    for u in range(1, n):
        for U in combinations(range(1, n + 1), u):
            for i in range(1, u):
                pool = list(combinations(U, i))
                for r in range(2, len(pool) + 1):
                    for L in combinations(pool, r):
                        if set().union(*map(set, L)) != set(U):
                            continue
                        if set(L[0]).intersection(*map(set, L[1:])):
                            continue
                        keys.append(SummandKey(i, L))
    return sorted(keys)


def verify_delta_exactness(n: int, m: int | None, jobs: int = 1) -> Report:
    """Zero delta-homology for every summand with vertices left in [n].

    ``m`` bounds the label size; ``None`` checks every label inside [n], in
    which case the vertex-free keys are not enumerated.
    """
    if m is None:
        live = live_summand_keys(n)
        dead = None
    else:
        keys = summand_keys(n, m)
        live = [k for k in keys if len(k.union()) < n]
        dead = len(keys) - len(live)
    results = pmap(partial(_summand_homology, n=n), live, jobs)
    failures = []
    for key, h in zip(live, results):
        bad = {d: v for d, v in h.items() if v}
        if bad:
            failures.append({"key": str(key), "homology": bad})
    return Report(
        "exactness",
        not failures,
        {"n": n, "m": m},
        {"summands_checked": len(live), "summands_without_vertices": dead, "violations": len(failures)},
        failures,
    )


# -- gradings -------------------------------------------------------------------


def grading_mt(b: LimitIndex) -> tuple[int, int]:
    if b.is_unit:
        return (0, 0)
    return (b.size, len(b.core))


def grading_mn(b: LimitIndex, k: int, ell: int) -> tuple[int, int]:
    """``(l-k+1, |Lambda| + |core|)`` for a family realized in A(k, l).

    The empty family gets ``n = 0``.
    """
    if k < 2 or ell < k:
        raise ArrangementError(f"no stage A({k},{ell})")
    if b.is_unit:
        return (ell - k + 1, 0)
    if b.q != ell - k:
        raise ArrangementError(f"members of size {b.q} do not live in A({k},{ell})")
    if b.support() and b.support()[-1] > ell:
        raise ArrangementError(f"family not inside [{ell}]")
    return (ell - k + 1, b.size + len(b.core))


def delta_stage(k: int, ell: int) -> tuple[int, int]:
    """Stage hosting delta's output: members shrink by one at the same l."""
    return (k + 1, ell)


def check_grading_shifts(k: int, ell: int) -> Report:
    """d, delta and stabilization move the (m, n) grading as expected on A(k, l)."""
    q = ell - k
    failures = []
    checked = 0
    for b in families(ell, ell + 1):
        if b.q != q:
            continue
        m, n = grading_mn(b, k, ell)
        checked += 1
        for t in limit_d(b):
            if grading_mn(t, k, ell) != (m, n - 1):
                failures.append({"op": "d", "family": str(b), "term": str(t)})
        k2, l2 = delta_stage(k, ell)
        for t in delta(b):
            if t.is_unit:
                continue
            if grading_mn(t, k2, l2) != (m - 1, n - 1):
                failures.append({"op": "delta", "family": str(b), "term": str(t)})
        # stabilization leaves complements fixed and moves to A(k+1, l+1)
        if grading_mn(b, k + 1, ell + 1) != (m, n):
            failures.append({"op": "stabilize", "family": str(b)})
    return Report("grading", not failures, {"k": k, "l": ell}, {"generators": checked}, failures)


# -- the double complex ---------------------------------------------------------


def total_differential(b: LimitIndex) -> Chain:
    """``d + (-1)^|Lambda| delta``; squares to zero because d and delta commute."""
    sign = -1 if b.size % 2 else 1
    return limit_d(b) + delta(b).scale(sign)


def verify_double_complex(n: int, m: int) -> Report:
    gens = truncation(n, m)
    relation_counts = {"commute": 0, "anticommute": 0, "both": 0, "neither": 0}
    failures = []
    for b in gens:
        dd = delta_chain(limit_d(b))
        ddel = limit_d_chain(delta(b))
        comm = dd == ddel
        anti = dd == -ddel
        tag = "both" if comm and anti else "commute" if comm else "anticommute" if anti else "neither"
        relation_counts[tag] += 1
        if not comm:
            failures.append({"kind": "d delta != delta d", "family": str(b)})
        if total_differential_chain(total_differential(b)):
            failures.append({"kind": "D^2 != 0", "family": str(b)})

    # column exactness: each fixed |Lambda| splits into summands
    keys = sorted({summand_key(b) for b in gens})
    col_bad = []
    for key in keys:
        h = _summand_homology(key, n)
        if any(h.values()):
            col_bad.append(str(key))
    failures.extend({"kind": "column homology", "key": k} for k in col_bad)

    # total homology directly, graded by |Lambda| + |core|
    by_deg: dict[int, list[LimitIndex]] = {}
    for b in gens:
        by_deg.setdefault(b.size + len(b.core), []).append(b)
    index = {b: i for t in by_deg for i, b in enumerate(by_deg[t])}
    ranks = {}
    for t, bs in by_deg.items():
        entries = {}
        for col, b in enumerate(bs):
            for x, v in total_differential(b).items():
                if x not in index:
                    failures.append({"kind": "truncation not closed", "family": str(b), "term": str(x)})
                    continue
                entries[index[x], col] = v
        ranks[t] = rank(SparseMatrix(len(by_deg.get(t - 1, ())), len(bs), entries))
    total_h = {t: len(by_deg[t]) - ranks[t] - ranks.get(t + 1, 0) for t in sorted(by_deg)}
    for t, h in total_h.items():
        if h:
            failures.append({"kind": "total homology", "degree": t, "dim": h})
    return Report(
        "bicomplex",
        not failures,
        {"n": n, "m": m},
        {
            "generators": len(gens),
            "relation": "commute" if relation_counts["anticommute"] + relation_counts["neither"] == 0 else "mixed",
            "relation_counts": relation_counts,
            "total_sign": "(-1)^|Lambda|",
            "columns_checked": len(keys),
            "total_homology": total_h,
        },
        failures,
    )


def total_differential_chain(c: Chain) -> Chain:
    return c.apply(total_differential)


# -- vanishing in the (m, n) grading ------------------------------------------


def _n_of(cx, S: int, ell: int) -> int:
    if S == 0:
        return 0
    union = 0
    s = S
    while s:
        low = s & -s
        s ^= low
        union |= cx.atom_masks[low.bit_length() - 1]
    return bin(S).count("1") + ell - bin(union).count("1")


def vanishing_check(k: int, ell: int) -> Report:
    """Homology of A(k, l) split by n; nonzero only where n <= m = l-k+1."""
    cx = build_complex(k, ell)
    m = ell - k + 1
    blocks: dict[tuple[int, int], list[int]] = {}
    for p in cx.degrees:
        for S in cx.gens[p]:
            blocks.setdefault((p, _n_of(cx, S, ell)), []).append(S)
    pos = {S: i for key in blocks for i, S in enumerate(blocks[key])}
    n_of = {S: key[1] for key in blocks for S in blocks[key]}
    ranks: dict[tuple[int, int], int] = {}
    failures = []
    for (p, n), Ss in blocks.items():
        target = blocks.get((p + 1, n - 1), [])
        entries = {}
        dmat = cx.differential_matrix(p)
        cols = {cx.index[S][1]: j for j, S in enumerate(Ss)}
        for (r, c), v in dmat.entries.items():
            if c in cols:
                T = cx.gens[p + 1][r]
                if n_of[T] != n - 1:
                    failures.append({"kind": "d does not lower n by one", "degree": p, "n": n})
                    continue
                entries[pos[T], cols[c]] = v
        ranks[p, n] = rank(SparseMatrix(len(target), len(Ss), entries))
    support = {}
    for (p, n), Ss in sorted(blocks.items()):
        h = len(Ss) - ranks[p, n] - ranks.get((p - 1, n + 1), 0)
        if h:
            support[f"{p},{n}"] = h
            if n > m:
                failures.append({"kind": "homology with m < n", "degree": p, "n": n, "dim": h})
    return Report(
        "vanishing",
        not failures,
        {"k": k, "l": ell},
        {"m": m, "l_at_least_2k_minus_1": ell >= 2 * k - 1, "support": support},
        failures,
    )
