"""Graded product on the direct sum of the limit complexes.

Two families multiply when one is empty, or when they have the same number
of members and disjoint unions.  Members are paired in canonical
(lexicographic) order, and the sign is the inversion count of the two cores.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .atomic import cup, stabilize
from .bicx import delta, delta_chain
from .chains import Chain
from .limit import UNIT, LimitIndex, limit_d, limit_d_chain
from .report import Report
from .setcore import ArrangementError, AtomSet, atoms_of, inversion_count

EMPTY_OPERAND = "empty-operand"
MATCHED = "size-match-and-disjoint"
SIZE_MISMATCH = "size-mismatch"
UNION_OVERLAP = "union-overlap"

PRODUCT_NONZERO = "product-nonzero"
OVERLAP_IN_CORES = "overlap-in-cores"
OUTSIDE = "outside-hypothesis"
IN_REGIME = (PRODUCT_NONZERO, SIZE_MISMATCH, OVERLAP_IN_CORES)


def _index(x) -> LimitIndex:
    if isinstance(x, LimitIndex):
        return x
    return LimitIndex.from_family(x)


@dataclass(frozen=True)
class CompatPair:
    left: LimitIndex
    right: LimitIndex
    compatible: bool
    reason: str


def compatible(a, b) -> CompatPair:
    a, b = _index(a), _index(b)
    if a.is_unit or b.is_unit:
        return CompatPair(a, b, True, EMPTY_OPERAND)
    if a.size != b.size:
        return CompatPair(a, b, False, SIZE_MISMATCH)
    if set(a.support()) & set(b.support()):
        return CompatPair(a, b, False, UNION_OVERLAP)
    return CompatPair(a, b, True, MATCHED)


def uplus(a, b) -> LimitIndex:
    """Member-wise union, pairing the i-th members of both canonical orders."""
    c = compatible(a, b)
    if not c.compatible:
        raise ArrangementError(f"families are not compatible ({c.reason})")
    if c.left.is_unit or c.right.is_unit:
        raise ArrangementError("uplus needs two nonempty families")
    pairs = zip(c.left.members(), c.right.members())
    return LimitIndex.from_family(tuple(sorted(x + y)) for x, y in pairs)


def epsilon(a, b) -> int:
    """Inversion count of the two cores (a full count, not a parity)."""
    return inversion_count(_index(a).core, _index(b).core)


def gproduct(a, b) -> Chain:
    c = compatible(a, b)
    if not c.compatible:
        return Chain()
    if c.left.is_unit:
        return Chain.single(c.right)
    if c.right.is_unit:
        return Chain.single(c.left)
    return Chain.single(uplus(c.left, c.right), (-1) ** epsilon(c.left, c.right))


def gproduct_chain(x: Chain, y: Chain) -> Chain:
    return x.bilinear(y, gproduct)


# -- random families ------------------------------------------------------------


def random_family(rng: random.Random, pool: list[int], size: int, member: int) -> LimitIndex:
    """A family of ``size`` distinct ``member``-subsets of ``pool`` (fewer if the pool is small)."""
    members = set()
    tries = 0
    while len(members) < size and tries < 50:
        members.add(tuple(sorted(rng.sample(pool, member))))
        tries += 1
    return LimitIndex.from_family(members)


def _random_operand(rng: random.Random, pool: list[int], size: int) -> LimitIndex:
    if not pool or rng.random() < 0.05:
        return UNIT
    member = rng.randint(1, min(3, len(pool)))
    return random_family(rng, pool, size, member)


def _split(rng: random.Random, n: int, parts: int) -> list[list[int]]:
    ground = list(range(1, n + 1))
    if rng.random() < 0.25:
        return [ground] * parts  # unrestricted: mostly incompatible
    out = [[] for _ in range(parts)]
    for x in ground:
        out[rng.randrange(parts)].append(x)
    return out


def verify_associativity(trials: int = 500, seed: int = 0, n: int = 9) -> Report:
    rng = random.Random(seed)
    failures = []
    nonzero = 0
    for _ in range(trials):
        size = rng.randint(1, 3)
        pools = _split(rng, n, 3)
        a, b, c = (_random_operand(rng, p, size if rng.random() < 0.9 else rng.randint(1, 3)) for p in pools)
        left = gproduct_chain(gproduct(a, b), Chain.single(c))
        right = gproduct_chain(Chain.single(a), gproduct(b, c))
        if left:
            nonzero += 1
        if left != right:
            failures.append({"a": str(a), "b": str(b), "c": str(c), "left": _fmt(left), "right": _fmt(right)})
    return Report(
        "assoc",
        not failures,
        {"trials": trials, "seed": seed, "n": n},
        {"nonzero_triples": nonzero, "violations": len(failures), "pairing": "canonical lexicographic order"},
        failures,
    )


def _fmt(c: Chain) -> list:
    return [[str(b), int(v)] for b, v in sorted(c.items())]


# -- Leibniz rule for delta --------------------------------------------------------


def leibniz_classify(a, b) -> str:
    a, b = _index(a), _index(b)
    if gproduct(a, b):
        return PRODUCT_NONZERO
    if a.size != b.size:
        return SIZE_MISMATCH
    if set(a.support()) & set(b.support()) <= set(a.core) & set(b.core):
        return OVERLAP_IN_CORES
    return OUTSIDE


def _core_size(b: LimitIndex) -> int:
    return len(b.core)


def leibniz_sides(a, b, sign_exponent: int | None = None) -> tuple[Chain, Chain]:
    """``delta(ab)`` and ``delta(a) b + (-1)^e a delta(b)`` with e = |core of a| by default."""
    a, b = _index(a), _index(b)
    e = _core_size(a) if sign_exponent is None else sign_exponent
    lhs = delta_chain(gproduct(a, b))
    rhs = gproduct_chain(delta(a), Chain.single(b)) + gproduct_chain(Chain.single(a), delta(b)).scale((-1) ** e)
    return lhs, rhs


def leibniz_check(a, b) -> Report:
    a, b = _index(a), _index(b)
    cls = leibniz_classify(a, b)
    lhs, rhs = leibniz_sides(a, b)
    equal = lhs == rhs
    details = {"class": cls, "lhs": _fmt(lhs), "rhs": _fmt(rhs), "equal": equal}
    notes = []
    if cls == OUTSIDE:
        if not equal:
            notes.append({"discrepancy": _fmt(rhs - lhs)})
        return Report("leibniz", True, {"a": str(a), "b": str(b)}, details, [], notes)
    failures = [] if equal else [{"a": str(a), "b": str(b), **details}]
    return Report("leibniz", equal, {"a": str(a), "b": str(b)}, details, failures)


def _random_pair(rng: random.Random, n: int, regime: str) -> tuple[LimitIndex, LimitIndex]:
    ground = list(range(1, n + 1))
    if regime == PRODUCT_NONZERO:
        size = rng.randint(1, 3)
        pa, pb = _split(rng, n, 2) if rng.random() < 0.8 else (ground, ground)
        return _random_operand(rng, pa, size), _random_operand(rng, pb, size)
    if regime == SIZE_MISMATCH:
        sa, sb = rng.sample([1, 2, 3, 4], 2)
        return _random_operand(rng, ground, sa), _random_operand(rng, ground, sb)
    # shared elements placed in both cores, everything else disjoint
    shared = rng.sample(ground, rng.randint(1, 2))
    rest = [x for x in ground if x not in shared]
    pa, pb = [], []
    for x in rest:
        (pa if rng.random() < 0.5 else pb).append(x)
    size = rng.randint(1, 3)
    out = []
    for pool in (pa, pb):
        if not pool:
            pool = [n + 1]
        fam = random_family(rng, pool, size, rng.randint(1, min(2, len(pool))))
        extra = tuple(x for x in rng.sample(pool, rng.randint(0, min(1, len(pool)))) if x not in fam.support())
        out.append(LimitIndex.from_family(tuple(sorted(m + tuple(shared) + extra)) for m in fam.members()))
    return out[0], out[1]


def leibniz_batch(count: int = 200, seed: int = 0, n: int = 10) -> Report:
    """Seeded in-regime pairs, cycling through the three hypothesis classes."""
    rng = random.Random(seed)
    regimes = list(IN_REGIME)
    by_class = {r: 0 for r in IN_REGIME}
    outside = 0
    failures = []
    checked = 0
    step = 0
    while checked < count:
        a, b = _random_pair(rng, n, regimes[step % 3])
        step += 1
        cls = leibniz_classify(a, b)
        if cls == OUTSIDE:
            outside += 1
            continue
        checked += 1
        by_class[cls] += 1
        lhs, rhs = leibniz_sides(a, b)
        if lhs != rhs:
            failures.append({"a": str(a), "b": str(b), "class": cls, "lhs": _fmt(lhs), "rhs": _fmt(rhs)})
    return Report(
        "leibniz",
        not failures,
        {"count": count, "seed": seed, "n": n},
        {"by_class": by_class, "outside_skipped": outside, "violations": len(failures)},
        failures,
    )


def delta_leibniz_counterexample() -> Report:
    """Zero product whose delta-Leibniz right side is nonzero."""
    a = LimitIndex.from_family([[1, 2], [1, 3]])
    b = LimitIndex.from_family([[2, 4], [2, 5]])
    target = LimitIndex.from_family([[1, 2, 4], [1, 3, 5]])
    lhs, rhs = leibniz_sides(a, b)
    _, rhs_even = leibniz_sides(a, b, sign_exponent=2)
    ok = (
        not gproduct(a, b)
        and not lhs
        and set(rhs) == {target}
        and set(rhs_even) == {target}
        and leibniz_classify(a, b) == OUTSIDE
    )
    return Report(
        "leibniz-delta-counterexample",
        ok,
        {"a": str(a), "b": str(b)},
        {
            "lhs": _fmt(lhs),
            "rhs_sign_core_size": _fmt(rhs),
            "rhs_sign_even": _fmt(rhs_even),
            "class": leibniz_classify(a, b),
        },
    )


def d_leibniz_counterexample() -> Report:
    """Zero product (member counts differ) whose d-Leibniz right side is nonzero for every sign choice."""
    a = LimitIndex.from_family([[1, 2], [2, 3], [3, 4]])
    b = LimitIndex.from_family([[6], [7]])
    target = LimitIndex.from_family([[1, 2, 6], [3, 4, 7]])
    da, db = limit_d(a), limit_d(b)
    lhs = limit_d_chain(gproduct(a, b))
    first = gproduct_chain(da, Chain.single(b))
    second = gproduct_chain(Chain.single(a), db)
    variants = {f"{s1:+d},{s2:+d}": first.scale(s1) + second.scale(s2) for s1 in (1, -1) for s2 in (1, -1)}
    ok = (
        not gproduct(a, b)
        and not lhs
        and set(da) == {LimitIndex.from_family([[1, 2], [3, 4]])}
        and not db
        and all(set(v) == {target} for v in variants.values())
    )
    return Report(
        "leibniz-d-counterexample",
        ok,
        {"a": str(a), "b": str(b)},
        {
            "product": _fmt(gproduct(a, b)),
            "d_a": _fmt(da),
            "d_b": _fmt(db),
            "lhs": _fmt(lhs),
            "rhs_by_sign_choice": {k: _fmt(v) for k, v in variants.items()},
        },
    )


# -- sign lemmas -------------------------------------------------------------------


@dataclass(frozen=True)
class SignWitness:
    epsilon: int
    positions: dict[int, int]
    gaps: tuple[int, ...]


def sign_witness(A: Iterable[int], B: Iterable[int]) -> SignWitness:
    """Inversion count, 1-based positions of A's elements in the merged core, and gap counts."""
    A, B = tuple(sorted(A)), tuple(sorted(B))
    merged = sorted(A + B)
    pos = {x: merged.index(x) + 1 for x in A}
    gaps = tuple(sum(1 for y in B if A[i] < y < A[i + 1]) for i in range(len(A) - 1))
    return SignWitness(inversion_count(A, B), pos, gaps)


def _drop(t: tuple[int, ...], x: int) -> tuple[int, ...]:
    return tuple(y for y in t if y != x)


def _lemma_failures(A: tuple[int, ...], B: tuple[int, ...]) -> list[dict]:
    """Both identities, removing from the first argument and (mirrored) from the second."""
    out = []
    w = sign_witness(A, B)
    for i in range(len(A) - 1):
        lhs = inversion_count(_drop(A, A[i + 1]), B)
        rhs = inversion_count(_drop(A, A[i]), B) - w.gaps[i]
        if lhs != rhs:
            out.append({"lemma": "inversions", "A": list(A), "B": list(B), "i": i + 1})
    parities = [(w.positions[a] + inversion_count(_drop(A, a), B)) % 2 for a in A]
    if any(parities[i] == parities[i + 1] for i in range(len(parities) - 1)):
        out.append({"lemma": "alternating", "A": list(A), "B": list(B)})

    wb = sign_witness(B, A)
    for j in range(len(B) - 1):
        lhs = inversion_count(A, _drop(B, B[j + 1]))
        rhs = inversion_count(A, _drop(B, B[j])) + wb.gaps[j]
        if lhs != rhs:
            out.append({"lemma": "inversions (second argument)", "A": list(A), "B": list(B), "j": j + 1})
    merged = sorted(A + B)
    parities = [(merged.index(b) + 1 + inversion_count(A, _drop(B, b))) % 2 for b in B]
    if any(parities[j] == parities[j + 1] for j in range(len(parities) - 1)):
        out.append({"lemma": "alternating (second argument)", "A": list(A), "B": list(B)})
    return out


def sign_lemmas_check(a, b) -> Report:
    c = compatible(a, b)
    if not c.compatible or c.left.is_unit or c.right.is_unit or not c.left.core or not c.right.core:
        raise ArrangementError("need compatible families with nonempty cores")
    A, B = c.left.core, c.right.core
    failures = _lemma_failures(A, B) + _lemma_failures(B, A)
    w = sign_witness(A, B)
    return Report(
        "signlemmas",
        not failures,
        {"a": str(c.left), "b": str(c.right)},
        {"epsilon": w.epsilon, "positions": {str(k): v for k, v in w.positions.items()}, "gaps": list(w.gaps)},
        failures,
    )


def sign_lemmas_exhaustive(n: int = 8) -> Report:
    """Every ordered pair of disjoint nonempty cores inside [n]."""
    failures = []
    pairs = 0
    ground = range(1, n + 1)
    # label each element 0 (unused), 1 (first core) or 2 (second core)
    for code in range(3 ** n):
        A, B, c = [], [], code
        for x in ground:
            c, r = divmod(c, 3)
            if r == 1:
                A.append(x)
            elif r == 2:
                B.append(x)
        if not A or not B:
            continue
        pairs += 1
        failures.extend(_lemma_failures(tuple(A), tuple(B)))
    return Report("signlemmas", not failures, {"n": n}, {"core_pairs": pairs, "violations": len(failures)}, failures[:20])


# -- the finite cup product does not survive stabilization --------------------------


def stabilization_cup_check(k: int, ell: int, max_size: int | None = None, pushes: int = 3) -> Report:
    """Push every pair with nonzero cup product through stabilization until it dies.

    Records how many pushes each pair survives; fails if one survives them all.
    """
    atoms = atoms_of(k, ell)
    limit = len(atoms) if max_size is None else max_size
    sets = [AtomSet(c, ell) for r in range(1, limit + 1) for c in combinations(atoms, r)]
    survived: dict[int, int] = {}
    failures = []
    pairs = 0
    for S in sets:
        for T in sets:
            if not cup(S, T):
                continue
            pairs += 1
            s, t = S, T
            steps = 0
            while steps < pushes and cup(s, t):
                s, t = stabilize(s), stabilize(t)
                steps += 1
            if cup(s, t):
                failures.append({"S": [list(x) for x in S], "T": [list(x) for x in T]})
            else:
                survived[steps] = survived.get(steps, 0) + 1
    return Report(
        "stabilization",
        pairs > 0 and not failures,
        {"k": k, "l": ell, "max_size": max_size, "pushes": pushes},
        {"nonzero_pairs": pairs, "vanished_after_pushes": {str(s): c for s, c in sorted(survived.items())}},
        failures[:20],
    )
