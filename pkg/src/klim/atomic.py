"""The relative atomic complex A(k, l) of the k-equal arrangement.

One generator ``a_S`` per set ``S`` of atoms, in degree ``2 codim X(S) - |S|``.
The differential drops one atom at a time, keeping only removals that leave
X(S) unchanged, with sign ``(-1)^j`` for the 1-based position ``j`` of the
removed atom.  The differential raises degree by one.

Two code paths compute the same objects: the AtomSet-level functions below
work directly from closure partitions, while :class:`FiniteComplex` encodes
atom sets as bitmasks and goes through :mod:`klim.kernels`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from . import kernels
from .chains import Chain
from .ratlin import SparseMatrix, rank
from .report import Report
from .setcore import (
    ArrangementError,
    Atom,
    AtomSet,
    atoms_of,
    closure_partition,
    codim,
    inversion_count,
)

#: refuse full construction beyond this many generators
GENERATOR_CEILING = 1 << 17


class ResourceGuardError(ArrangementError):
    pass


def degree(S: AtomSet) -> int:
    return 2 * codim(S) - len(S)


def differential(S: AtomSet) -> Chain:
    full = closure_partition(S)
    out = Chain()
    for j, sigma in enumerate(S.atoms, start=1):
        rest = S.without(sigma)
        if closure_partition(rest) == full:
            out.add(rest, (-1) ** j)
    return out


def cup(S: AtomSet, T: AtomSet) -> Chain:
    """Product ``a_S a_T``: signed ``a_{S u T}`` when codimensions add, else 0."""
    if S.ell != T.ell:
        raise ArrangementError("factors live in different ambient spaces")
    if set(S.atoms) & set(T.atoms):
        return Chain()
    U = S.union(T)
    if codim(S) + codim(T) != codim(U):
        return Chain()
    eps = inversion_count(S.atoms, T.atoms)
    return Chain.single(U, (-1) ** eps)


def d_chain(c: Chain) -> Chain:
    return c.apply(differential)


def cup_chain(x: Chain, y: Chain) -> Chain:
    return x.bilinear(y, cup)


def stabilize(S: AtomSet, k: int | None = None, ell: int | None = None) -> AtomSet:
    """Right multiplication by A_{1,1}: append the new coordinate ``l+1`` to every atom."""
    if ell is not None and ell != S.ell:
        raise ArrangementError(f"atom set lives in l={S.ell}, not {ell}")
    if k is not None and S.atoms and S.arity != k:
        raise ArrangementError(f"atom set has arity {S.arity}, not {k}")
    new = S.ell + 1
    return AtomSet(tuple(a + (new,) for a in S.atoms), new)


def monoid_product(sigma, ell: int, tau, m: int) -> Atom:
    """Atom of the product arrangement in ``l + m`` coordinates.

    ``tau`` is shifted past the first factor's ``l`` coordinates.
    """
    sigma = tuple(sorted(sigma))
    tau = tuple(sorted(tau))
    if sigma and (sigma[0] < 1 or sigma[-1] > ell):
        raise ArrangementError(f"{sigma} not inside [{ell}]")
    if tau and (tau[0] < 1 or tau[-1] > m):
        raise ArrangementError(f"{tau} not inside [{m}]")
    return sigma + tuple(j + ell for j in tau)


def max_degree(k: int, ell: int) -> int:
    return 2 * (ell - 1) - (-(-(ell - 1) // (k - 1)))


def generator_count(k: int, ell: int, max_atoms: int | None = None) -> int:
    n = comb(ell, k)
    if max_atoms is None or max_atoms >= n:
        return 2 ** n
    return sum(comb(n, r) for r in range(max_atoms + 1))


def _check_guard(k, ell, max_atoms, ceiling):
    count = generator_count(k, ell, max_atoms)
    if count > ceiling:
        raise ResourceGuardError(
            f"A({k},{ell}) has {count} generators"
            + (f" with |S| <= {max_atoms}" if max_atoms is not None else "")
            + f", above the ceiling {ceiling}; pass a smaller max_atoms"
        )
    return count


def _sign(S: int, i: int) -> int:
    j = bin(S & ((1 << i) - 1)).count("1") + 1
    return -1 if j & 1 else 1


@dataclass
class FiniteComplex:
    """Generators of A(k, l) grouped by degree, with the differential matrices.

    ``gens[p]`` lists bitmasks (over atom indices) in ascending order; the
    matrix ``d[p]`` maps degree ``p`` to ``p + 1`` with columns indexed by
    ``gens[p]``.  In bounded mode, degrees whose homology could see a
    discarded generator are listed in ``indeterminate``.
    """

    k: int
    ell: int
    atoms: list[Atom]
    atom_masks: list[int]
    gens: dict[int, list[int]]
    index: dict[int, tuple[int, int]]
    d: dict[int, SparseMatrix]
    max_atoms: int | None = None
    indeterminate: set[int] = field(default_factory=set)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.gens)

    @property
    def size(self) -> int:
        return len(self.index)

    def atom_set(self, mask: int) -> AtomSet:
        return AtomSet(tuple(a for i, a in enumerate(self.atoms) if mask >> i & 1), self.ell)

    def mask_of(self, S: AtomSet) -> int:
        pos = {a: i for i, a in enumerate(self.atoms)}
        m = 0
        for a in S.atoms:
            m |= 1 << pos[a]
        return m

    def generator_degree(self, mask: int) -> int:
        return self.index[mask][0]

    def differential_matrix(self, p: int) -> SparseMatrix:
        """``d: C^p -> C^(p+1)``; an empty matrix where a side is absent."""
        if p in self.d:
            return self.d[p]
        return SparseMatrix(len(self.gens.get(p + 1, ())), len(self.gens.get(p, ())))

    def vector_of(self, chain: Chain) -> tuple[int, dict[int, int]]:
        """Coordinates of a homogeneous chain of AtomSets: (degree, vector)."""
        deg = None
        vec: dict[int, int] = {}
        for S, c in chain.items():
            p, idx = self.index[self.mask_of(S)]
            if deg is None:
                deg = p
            elif p != deg:
                raise ValueError("chain is not homogeneous")
            vec[idx] = c
        return deg, vec

    def betti(self, jobs: int = 1) -> dict[int, int | None]:
        """Homology dimension per degree; None for indeterminate degrees."""
        from .parallel import pmap

        ranks = dict(zip(self.degrees, pmap(rank, [self.differential_matrix(p) for p in self.degrees], jobs)))
        out: dict[int, int | None] = {}
        for p in self.degrees:
            if p in self.indeterminate:
                out[p] = None
                continue
            h = len(self.gens[p]) - ranks[p] - ranks.get(p - 1, 0)
            out[p] = h
        return out


def build_complex(k: int, ell: int, max_atoms: int | None = None, ceiling: int = GENERATOR_CEILING) -> FiniteComplex:
    atoms = atoms_of(k, ell)
    n = len(atoms)
    if max_atoms is not None and max_atoms >= n:
        max_atoms = None
    _check_guard(k, ell, max_atoms, ceiling)
    atom_masks = [sum(1 << x for x in a) for a in atoms]
    masks, codims = kernels.enumerate_generators(atom_masks, n if max_atoms is None else max_atoms)

    gens: dict[int, list[int]] = {}
    for S, c in zip(masks, codims):
        gens.setdefault(2 * c - bin(S).count("1"), []).append(S)
    index: dict[int, tuple[int, int]] = {}
    for p in gens:
        gens[p].sort()
        for i, S in enumerate(gens[p]):
            index[S] = (p, i)

    d: dict[int, SparseMatrix] = {}
    for p in sorted(gens):
        target = gens.get(p + 1)
        entries = {}
        for col, S in enumerate(gens[p]):
            for i in kernels.removable(atom_masks, S):
                q, row = index[S ^ (1 << i)]
                assert q == p + 1
                entries[row, col] = _sign(S, i)
        if target is not None:
            d[p] = SparseMatrix(len(target), len(gens[p]), entries)
        elif entries:
            raise AssertionError(f"differential leaves degree {p} with no target")

    indeterminate: set[int] = set()
    if max_atoms is not None:
        # conservative: a discarded S has k-1 <= codim <= l-1
        for r in range(max_atoms + 1, n + 1):
            for p in range(2 * (k - 1) - r, 2 * (ell - 1) - r + 1):
                indeterminate.update((p, p + 1))
        indeterminate &= set(gens)

    cx = FiniteComplex(k, ell, atoms, atom_masks, gens, index, d, max_atoms, indeterminate)
    for p in cx.degrees:
        if p + 1 in d and p in d and not (d[p + 1] @ d[p]).is_zero():
            raise AssertionError(f"d o d != 0 leaving degree {p} of A({k},{ell})")
    return cx


def betti(k: int, ell: int, max_atoms: int | None = None, jobs: int = 1) -> dict[int, int | None]:
    return build_complex(k, ell, max_atoms).betti(jobs)


def verify_d_squared(k: int, ell: int, max_atoms: int | None = None, ceiling: int = 1 << 21) -> Report:
    """Check ``d(d(a_S)) = 0`` for every generator (optionally only ``|S| <= max_atoms``)."""
    atoms = atoms_of(k, ell)
    n = len(atoms)
    if max_atoms is not None and max_atoms >= n:
        max_atoms = None
    count = _check_guard(k, ell, max_atoms, ceiling)
    atom_masks = [sum(1 << x for x in a) for a in atoms]
    masks, _ = kernels.enumerate_generators(atom_masks, n if max_atoms is None else max_atoms)
    bad = kernels.d_squared_defects(atom_masks, masks)
    failures = [[list(a) for i, a in enumerate(atoms) if S >> i & 1] for S in bad[:20]]
    return Report(
        "d2",
        not bad,
        {"k": k, "l": ell, "max_atoms": max_atoms},
        {"generators_checked": count, "violations": len(bad), "backend": kernels.BACKEND},
        failures,
    )


def random_atom_set(rng: random.Random, atoms: list[Atom], ell: int, max_size: int) -> AtomSet:
    r = rng.randint(1, max_size)
    return AtomSet(tuple(sorted(rng.sample(atoms, min(r, len(atoms))))), ell)


def leibniz_sides(S: AtomSet, T: AtomSet) -> tuple[Chain, Chain]:
    lhs = d_chain(cup(S, T))
    sign = -1 if degree(S) % 2 else 1
    rhs = cup_chain(differential(S), Chain.single(T)) + cup_chain(Chain.single(S), differential(T)).scale(sign)
    return lhs, rhs


def _fmt(c: Chain) -> list:
    return sorted([[list(map(list, S.atoms)), int(v)] for S, v in c.items()])


def verify_cup_leibniz(k: int, ell: int, trials: int = 500, seed: int = 0, max_size: int = 3) -> Report:
    """Sample pairs and compare ``d(a_S a_T)`` with ``d(a_S) a_T + (-1)^deg(S) a_S d(a_T)``."""
    rng = random.Random(seed)
    atoms = atoms_of(k, ell)
    failures = []
    nonzero = 0
    for _ in range(trials):
        S = random_atom_set(rng, atoms, ell, max_size)
        T = random_atom_set(rng, atoms, ell, max_size)
        lhs, rhs = leibniz_sides(S, T)
        if cup(S, T):
            nonzero += 1
        if lhs != rhs:
            failures.append({"S": [list(a) for a in S], "T": [list(a) for a in T], "lhs": _fmt(lhs), "rhs": _fmt(rhs)})
    return Report(
        "cup-leibniz",
        not failures,
        {"k": k, "l": ell, "trials": trials, "seed": seed},
        {"nonzero_products": nonzero, "violations": len(failures)},
        failures,
    )
