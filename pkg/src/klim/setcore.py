"""Combinatorial primitives for k-equal arrangements.

An atom is a k-subset ``sigma`` of ``[l]`` standing for the subspace where the
coordinates indexed by ``sigma`` agree.  Atoms are plain sorted tuples of
positive integers; an :class:`AtomSet` bundles a canonically ordered tuple of
atoms with the ambient dimension ``l``.  Everything downstream (signs of the
differentials, products, matrix indices) is defined relative to the
lexicographic order fixed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

Atom = tuple[int, ...]
Family = tuple[tuple[int, ...], ...]
Partition = tuple[tuple[int, ...], ...]


class ArrangementError(ValueError):
    """Raised for arguments that do not describe a valid k-equal arrangement."""


def make_atom(elements: Iterable[int]) -> Atom:
    out = tuple(sorted(set(elements)))
    if not out:
        raise ArrangementError("an atom needs at least one element")
    if out[0] < 1:
        raise ArrangementError(f"atom elements must be positive: {out}")
    return out


def canonical_family(members: Iterable[Iterable[int]]) -> Family:
    """Sort each member, drop duplicates, order members lexicographically."""
    return tuple(sorted({tuple(sorted(set(m))) for m in members}))


@dataclass(frozen=True)
class AtomSet:
    """A duplicate-free, lexicographically ordered set of atoms in ``[ell]``."""

    atoms: tuple[Atom, ...]
    ell: int

    def __post_init__(self):
        if self.ell < 1:
            raise ArrangementError(f"ambient dimension must be positive, got {self.ell}")
        for a, b in zip(self.atoms, self.atoms[1:]):
            if not a < b:
                raise ArrangementError("atoms must be strictly increasing")
        arities = {len(a) for a in self.atoms}
        if len(arities) > 1:
            raise ArrangementError(f"atoms of mixed arity: {sorted(arities)}")
        for a in self.atoms:
            if list(a) != sorted(set(a)) or a[0] < 1 or a[-1] > self.ell:
                raise ArrangementError(f"bad atom {a} for ell={self.ell}")

    @classmethod
    def of(cls, atoms: Iterable[Iterable[int]], ell: int) -> "AtomSet":
        return cls(tuple(sorted({make_atom(a) for a in atoms})), ell)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom) -> bool:
        return tuple(atom) in self.atoms

    @property
    def arity(self) -> int | None:
        return len(self.atoms[0]) if self.atoms else None

    def without(self, atom: Atom) -> "AtomSet":
        return AtomSet(tuple(a for a in self.atoms if a != atom), self.ell)

    def union(self, other: "AtomSet") -> "AtomSet":
        if other.ell != self.ell:
            raise ArrangementError("ambient dimensions differ")
        return AtomSet(tuple(sorted(set(self.atoms) | set(other.atoms))), self.ell)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*self.atoms))) if self.atoms else ()

    def core(self) -> tuple[int, ...]:
        """Common intersection of the atoms; empty for the empty set."""
        if not self.atoms:
            return ()
        common = set(self.atoms[0])
        for a in self.atoms[1:]:
            common &= set(a)
        return tuple(sorted(common))


def atoms_of(k: int, ell: int) -> list[Atom]:
    """All k-subsets of ``[ell]`` in lexicographic order."""
    if k < 2 or k > ell:
        raise ArrangementError(f"need 2 <= k <= l, got k={k}, l={ell}")
    return list(combinations(range(1, ell + 1), k))


def _blocks(atoms: Iterable[Atom], ell: int) -> list[int]:
    # union-find over [ell]; parent[0] unused
    parent = list(range(ell + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in atoms:
        r = find(a[0])
        for x in a[1:]:
            s = find(x)
            if s != r:
                if s < r:
                    r, s = s, r
                parent[s] = r
    return [find(x) for x in range(ell + 1)]


def closure_partition(S: AtomSet) -> Partition:
    """Connected components of the hypergraph on ``[ell]`` whose edges are the atoms.

    Blocks are sorted and listed by their least element; singletons included.
    The partition determines the subspace X(S) and is used for equality tests.
    """
    roots = _blocks(S.atoms, S.ell)
    groups: dict[int, list[int]] = {}
    for x in range(1, S.ell + 1):
        groups.setdefault(roots[x], []).append(x)
    return tuple(tuple(g) for g in sorted(groups.values()))


def codim(S: AtomSet) -> int:
    return S.ell - len(closure_partition(S))


def complement(S: AtomSet) -> Family:
    """The family of complements ``[ell] minus sigma``, canonically ordered."""
    full = set(range(1, S.ell + 1))
    return canonical_family(full - set(a) for a in S.atoms)


def complement_family(family: Iterable[Iterable[int]], ell: int) -> AtomSet:
    """Inverse of :func:`complement` at fixed ``ell``."""
    full = set(range(1, ell + 1))
    return AtomSet.of((full - set(m) for m in family), ell)


def free_vertices(sigma: Atom, S: AtomSet) -> tuple[int, ...]:
    """Elements of ``sigma`` lying in no other atom of ``S``."""
    sigma = tuple(sigma)
    if sigma not in S:
        raise ArrangementError(f"{sigma} is not an atom of the set")
    others = set()
    for a in S.atoms:
        if a != sigma:
            others.update(a)
    return tuple(x for x in sigma if x not in others)


def pset_candidates(S: AtomSet, k: int) -> list[tuple[int, ...]]:
    """Every (k-1)-subset P of the support with core(S) <= P and no free set inside P.

    Exhaustive search; the list may be empty.
    """
    if not S.atoms:
        raise ArrangementError("pset_candidates needs a nonempty atom set")
    core = set(S.core())
    free = [set(free_vertices(a, S)) for a in S.atoms]
    out = []
    for P in combinations(S.support(), k - 1):
        Pset = set(P)
        if not core <= Pset:
            continue
        if all(f - Pset for f in free):
            out.append(P)
    return out


def is_independent(S: AtomSet) -> bool:
    """True iff removing any single atom changes the closure partition."""
    full = closure_partition(S)
    return all(closure_partition(S.without(a)) != full for a in S.atoms)


def inversion_count(A: Sequence[int], B: Sequence[int]) -> int:
    """Number of pairs ``(a, b)`` with ``b < a``: transpositions moving B after A."""
    if set(A) & set(B):
        raise ArrangementError(f"inversion_count needs disjoint sets, got {A} and {B}")
    B = sorted(B)
    total = 0
    j = 0
    for a in sorted(A):
        while j < len(B) and B[j] < a:
            j += 1
        total += j
    return total
