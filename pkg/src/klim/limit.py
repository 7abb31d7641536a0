"""Limit complexes under stabilization by A_{1,1}.

A generator of the limit is indexed by a family of equal-size sets (the
complements of the atoms), stored as the pair (core, halo): the common
intersection and the members with the core removed.  Because lexicographic
comparison of equal-size sets only looks at the least element of their
symmetric difference, the order of the members agrees with the order of the
halo, so every sign here can be read off the halo.

Two distinguished indices exist.  ``UNIT`` is the empty family (the image of
``a_empty`` at every stage); it carries no codegree and is the unit of the
graded product.  The one-member family ``{empty set}`` has q = 0 and plays
the part of the (-1)-simplex for the simplicial differential.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .atomic import FiniteComplex, build_complex, max_degree
from .chains import Chain
from .ratlin import Echelon, SparseMatrix, VectorSpaceBasis, image_basis, kernel_basis, quotient_representatives
from .report import Report
from .setcore import (
    ArrangementError,
    AtomSet,
    Family,
    canonical_family,
    complement,
    free_vertices,
    is_independent,
    pset_candidates,
)


@dataclass(frozen=True, order=True)
class LimitIndex:
    core: tuple[int, ...]
    halo: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.halo:
            if self.core:
                raise ArrangementError("the empty family has no core")
            return
        sizes = {len(h) for h in self.halo}
        if len(sizes) != 1:
            raise ArrangementError(f"halo members of different sizes: {self.halo}")
        if list(self.halo) != sorted(set(self.halo)):
            raise ArrangementError("halo must be sorted and duplicate-free")
        if len(self.halo) == 1:
            if self.halo != ((),):
                raise ArrangementError("a one-member family has halo {empty}")
        else:
            common = set(self.halo[0]).intersection(*map(set, self.halo[1:]))
            if common:
                raise ArrangementError("halo members must have empty common intersection")
        support = set().union(*map(set, self.halo))
        if support & set(self.core):
            raise ArrangementError("core meets the halo")

    @classmethod
    def from_family(cls, members: Iterable[Iterable[int]]) -> "LimitIndex":
        fam = canonical_family(members)
        if not fam:
            return UNIT
        if len({len(m) for m in fam}) != 1:
            raise ArrangementError(f"family members of unequal size: {fam}")
        core = set(fam[0]).intersection(*map(set, fam[1:]))
        halo = tuple(sorted(tuple(x for x in m if x not in core) for m in fam))
        return cls(tuple(sorted(core)), halo)

    @property
    def is_unit(self) -> bool:
        return not self.halo

    @property
    def size(self) -> int:
        """Number of members, |Lambda|."""
        return len(self.halo)

    @property
    def q(self) -> int | None:
        if self.is_unit:
            return None
        return len(self.core) + len(self.halo[0])

    def members(self) -> Family:
        return tuple(sorted(tuple(sorted(h + self.core)) for h in self.halo))

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.core).union(*map(set, self.halo))))

    def halo_support(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*map(set, self.halo))))

    def __str__(self) -> str:
        if self.is_unit:
            return "1"
        return "b{" + ",".join("{" + ",".join(map(str, m)) + "}" for m in self.members()) + "}"


UNIT = LimitIndex((), ())
EMPTY_SIMPLEX = LimitIndex((), ((),))


def canonicalize(family: Iterable[Iterable[int]]) -> LimitIndex:
    return LimitIndex.from_family(family)


def codegree_limit(b: LimitIndex) -> int:
    if b.is_unit:
        raise ArrangementError("the empty family has no codegree")
    return 2 * (len(b.core) - 1) + b.size


def codegree_finite(family: Iterable[Iterable[int]], k: int, ell: int) -> int:
    fam = canonical_family(family)
    if not fam:
        raise ArrangementError("the empty family has no codegree")
    if any(len(m) != ell - k for m in fam):
        raise ArrangementError(f"members must have size l-k={ell - k}")
    if any(m and (m[0] < 1 or m[-1] > ell) for m in fam):
        raise ArrangementError(f"members must lie in [{ell}]")
    core = set(fam[0]).intersection(*map(set, fam[1:]))
    return 2 * len(core) + len(fam) - (-(-(ell - 1) // (k - 1)))


def limit_d(b: LimitIndex) -> Chain:
    """Drop one member at a time, keeping the terms whose core is unchanged."""
    out = Chain()
    if b.size < 2:
        return out
    halo = b.halo
    for j in range(len(halo)):
        rest = halo[:j] + halo[j + 1:]
        if not set(rest[0]).intersection(*map(set, rest[1:])):
            out.add(LimitIndex(b.core, rest), -1 if j % 2 == 0 else 1)
    return out


def limit_d_chain(c: Chain) -> Chain:
    return c.apply(limit_d)


# -- theorem generators ---------------------------------------------------


@dataclass(frozen=True)
class TheoremGenerator:
    """A "book": atoms ``core + {leaf}`` sharing a (k-1)-element core."""

    S: AtomSet
    core: tuple[int, ...]
    leaves: tuple[int, ...]

    @property
    def codegree(self) -> int:
        q = self.S.ell - len(self.core) - 1
        return 2 * q - len(self.leaves)


def theorem_generators(q: int, k: int) -> list[TheoremGenerator]:
    """All books in A(k, q+k): a (k-1)-core and r >= 1 leaves outside it.

    One-atom books are listed once, under their lexicographically first core.
    """
    if q > k - 1:
        raise ArrangementError(f"need q <= k-1, got q={q}, k={k}")
    if q < 0:
        raise ArrangementError("q must be nonnegative")
    ell = q + k
    seen = set()
    out = []
    for core in combinations(range(1, ell + 1), k - 1):
        rest = [x for x in range(1, ell + 1) if x not in core]
        for r in range(1, len(rest) + 1):
            for leaves in combinations(rest, r):
                S = AtomSet(tuple(tuple(sorted(core + (f,))) for f in leaves), ell)
                S = AtomSet(tuple(sorted(S.atoms)), ell)
                if S in seen:
                    continue
                seen.add(S)
                out.append(TheoremGenerator(S, core, leaves))
    return out


# -- replacement moves ------------------------------------------------------


@dataclass(frozen=True)
class TildeMove:
    result: AtomSet
    sigma_tilde: tuple[int, ...]
    witness: AtomSet

    @property
    def is_identity(self) -> bool:
        return self.witness == self.result


def tilde_replace(S: AtomSet, sigma, P) -> TildeMove:
    """Swap ``sigma`` for ``F(sigma) + core(S) + T`` with T drawn from ``P``.

    T is the lexicographically first subset of ``P`` that brings the new atom
    to size k without duplicating another atom.  The witness ``S + {new}``
    has differential ``a_S +- a_result`` whenever the move is not the identity.
    """
    sigma = tuple(sorted(sigma))
    if sigma not in S:
        raise ArrangementError(f"{sigma} is not in the atom set")
    k = S.arity
    P = tuple(sorted(P))
    if not is_independent(S):
        raise ArrangementError("atom set is not independent")
    for a, b in combinations(S.atoms, 2):
        if not set(a) & set(b):
            raise ArrangementError(f"atoms {a} and {b} are disjoint")
    for a in S.atoms:
        if not free_vertices(a, S):
            raise ArrangementError(f"atom {a} has no free vertex")
    if P not in pset_candidates(S, k):
        raise ArrangementError(f"{P} does not satisfy the pivot conditions")

    base = set(free_vertices(sigma, S)) | set(S.core())
    need = k - len(base)
    others = set(S.atoms) - {sigma}
    choice = None
    if need >= 0:
        for T in combinations([x for x in P if x not in base], need):
            cand = tuple(sorted(base | set(T)))
            if cand not in others:
                choice = cand
                break
    if choice is None:
        raise ArrangementError(f"no valid T inside {P} for {sigma}")
    result = AtomSet(tuple(sorted(others | {choice})), S.ell)
    witness = AtomSet(tuple(sorted(set(S.atoms) | {choice})), S.ell)
    return TildeMove(result, choice, witness)


# -- homology at a stabilized finite stage -------------------------------------


@dataclass
class LimitHomology:
    q: int
    stage_k: int
    ell: int
    max_degree: int
    by_degree: dict[int, int]
    by_codegree: dict[int, int]
    representatives: dict[int, list[Chain]]
    unit_classes: int


def _reduced_homology(cx: FiniteComplex, p: int):
    """Cycles, boundaries and representatives in degree p, with a_empty quotiented out."""
    d_out = cx.differential_matrix(p)
    d_in = cx.differential_matrix(p - 1)
    Z = kernel_basis(d_out)
    Bvecs = list(image_basis(d_in))
    if p == 0:
        Bvecs.append({cx.index[0][1]: 1})
    B = VectorSpaceBasis(len(cx.gens[p]), Bvecs)
    return Z, B, quotient_representatives(Z, B)


def _chain_of(cx: FiniteComplex, p: int, vec: dict) -> Chain:
    gens = cx.gens[p]
    return Chain({cx.atom_set(gens[i]): v for i, v in sorted(vec.items())})


def _check_regime(q: int, stage_k: int):
    if q < 0:
        raise ArrangementError("q must be nonnegative")
    if stage_k < max(2, q + 1):
        raise ArrangementError(f"need stage_k >= max(2, q+1), got q={q}, stage_k={stage_k}")


def limit_homology(q: int, stage_k: int, jobs: int = 1) -> LimitHomology:
    """Homology of A(stage_k, q+stage_k), regraded by codegree.

    The unit class (a_empty spans a direct summand with zero differential) is
    reported separately in ``unit_classes`` and left out of ``by_codegree``.
    """
    _check_regime(q, stage_k)
    ell = q + stage_k
    cx = build_complex(stage_k, ell)
    top = max_degree(stage_k, ell)
    by_degree = cx.betti(jobs)
    by_codegree: dict[int, int] = {}
    reps: dict[int, list[Chain]] = {}
    for p, h in sorted(by_degree.items()):
        h_red = h - (1 if p == 0 else 0)
        if h_red == 0:
            continue
        _, _, R = _reduced_homology(cx, p)
        assert len(R) == h_red
        by_codegree[top - p] = h_red
        reps[top - p] = [_chain_of(cx, p, v) for v in R]
    return LimitHomology(q, stage_k, ell, top, by_degree, dict(sorted(by_codegree.items())), reps, 1)


def verify_generation(q: int, stage_k: int) -> Report:
    """Every homology representative lies in span(books) + boundaries, per codegree."""
    _check_regime(q, stage_k)
    if q > stage_k - 1:
        raise ArrangementError(f"need q <= stage_k-1, got q={q}, stage_k={stage_k}")
    ell = q + stage_k
    cx = build_complex(stage_k, ell)
    top = max_degree(stage_k, ell)
    books: dict[int, list[dict]] = {}
    for g in theorem_generators(q, stage_k):
        p, vec = cx.vector_of(Chain.single(g.S))
        books.setdefault(p, []).append(vec)

    by_degree = cx.betti()
    per = {}
    failures = []
    for p in sorted(set(by_degree) | set(books)):
        h_red = by_degree.get(p, 0) - (1 if p == 0 else 0)
        G = books.get(p, [])
        d_out = cx.differential_matrix(p)
        non_cycles = sum(1 for v in G if d_out.matvec(v))
        if h_red == 0 and not G:
            continue
        Z, B, R = _reduced_homology(cx, p)
        ech = Echelon(len(cx.gens[p]))
        for b in B:
            ech.add(b)
        span_dim = sum(1 for v in G if ech.add(v))
        missing = sum(1 for r in R if not ech.contains(r))
        ok = non_cycles == 0 and missing == 0
        entry = {
            "degree": p,
            "homology": h_red,
            "books": len(G),
            "book_span": span_dim,
            "non_cycles": non_cycles,
            "unreached": missing,
            "verdict": "pass" if ok else "fail",
        }
        per[top - p] = entry
        if not ok:
            failures.append({"codegree": top - p, **entry})
    return Report(
        "generation",
        not failures,
        {"q": q, "stage_k": stage_k, "l": ell},
        {"max_degree": top, "by_degree": by_degree, "by_codegree": {c: per[c] for c in sorted(per)}},
        failures,
    )
