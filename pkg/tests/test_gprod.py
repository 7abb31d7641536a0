from itertools import combinations

import pytest
from hypothesis import assume, given, settings, strategies as st
from sympy.combinatorics import Permutation

from klim.bicx import delta
from klim.chains import Chain
from klim.gprod import (
    EMPTY_OPERAND,
    IN_REGIME,
    MATCHED,
    OUTSIDE,
    OVERLAP_IN_CORES,
    PRODUCT_NONZERO,
    SIZE_MISMATCH,
    UNION_OVERLAP,
    compatible,
    d_leibniz_counterexample,
    delta_leibniz_counterexample,
    epsilon,
    gproduct,
    gproduct_chain,
    leibniz_batch,
    leibniz_check,
    leibniz_classify,
    leibniz_sides,
    sign_lemmas_check,
    sign_lemmas_exhaustive,
    sign_witness,
    stabilization_cup_check,
    uplus,
    verify_associativity,
)
from klim.limit import UNIT, canonicalize, codegree_limit, limit_d
from klim.setcore import ArrangementError


def b(*members):
    return canonicalize(members)


def test_compatible_examples():
    c = compatible(b((1, 2), (1, 3)), b((4, 5), (4, 6)))
    assert c.compatible and c.reason == MATCHED
    c = compatible(b((1, 2), (1, 3)), b((2, 4), (2, 5)))
    assert not c.compatible and c.reason == UNION_OVERLAP
    c = compatible(UNIT, b((2, 4), (2, 5)))
    assert c.compatible and c.reason == EMPTY_OPERAND
    c = compatible(b((1, 2)), b((3,), (4,)))
    assert not c.compatible and c.reason == SIZE_MISMATCH


def test_uplus_examples():
    assert uplus(b((1, 2), (1, 3)), b((4, 5), (4, 6))) == b((1, 2, 4, 5), (1, 3, 4, 6))
    assert uplus(b((1, 2), (1, 3)), b((4,), (5,))) == b((1, 2, 4), (1, 3, 5))
    assert uplus(b((1, 2), (3, 4)), b((6,), (7,))) == b((1, 2, 6), (3, 4, 7))
    with pytest.raises(ArrangementError):
        uplus(b((1, 2), (1, 3)), b((2, 4), (2, 5)))


def test_gproduct_examples():
    assert gproduct(b((1, 2)), b((3, 4))) == {b((1, 2, 3, 4)): 1}
    assert gproduct(b((3, 4)), b((1, 2))) == {b((1, 2, 3, 4)): 1}
    assert epsilon(b((3, 4)), b((1, 2))) == 4
    x = b((2, 4), (2, 5))
    assert gproduct(UNIT, x) == gproduct(x, UNIT) == {x: 1}
    assert gproduct(b((2,)), b((1,))) == {b((1, 2)): -1}


def test_associativity_examples():
    one, two, three = b((1,)), b((2,)), b((3,))
    left = gproduct_chain(gproduct(one, two), Chain.single(three))
    right = gproduct_chain(Chain.single(one), gproduct(two, three))
    assert left == right and set(left) == {b((1, 2, 3))}
    r = verify_associativity(trials=500, seed=0, n=9)
    assert r.passed and r.details["nonzero_triples"] > 0


def test_leibniz_classify_examples():
    assert leibniz_classify(b((1, 2), (1, 3)), b((4, 5), (4, 6))) == PRODUCT_NONZERO
    assert leibniz_classify(b((1, 2), (2, 3), (3, 4)), b((6,), (7,))) == SIZE_MISMATCH
    assert leibniz_classify(b((1, 2), (1, 3)), b((2, 4), (2, 5))) == OUTSIDE
    assert leibniz_classify(b((1, 2), (1, 3)), b((1, 4), (1, 5))) == OVERLAP_IN_CORES


def test_leibniz_in_regime_sign():
    a, c = b((1, 2), (1, 3)), b((4, 5), (4, 6))
    r = leibniz_check(a, c)
    assert r.passed and r.details["equal"]
    # the second term carries (-1)^{|core a|} = -1
    lhs, rhs = leibniz_sides(a, c)
    plain = gproduct_chain(delta(a), Chain.single(c)) + gproduct_chain(Chain.single(a), delta(c))
    assert lhs == rhs != plain


def test_delta_counterexample():
    r = delta_leibniz_counterexample()
    assert r.passed
    assert r.details["lhs"] == []
    target = str(b((1, 2, 4), (1, 3, 5)))
    assert [t for t, _ in r.details["rhs_sign_core_size"]] == [target]
    assert [t for t, _ in r.details["rhs_sign_even"]] == [target]


def test_d_counterexample():
    r = d_leibniz_counterexample()
    assert r.passed
    assert gproduct(b((1, 2), (2, 3), (3, 4)), b((6,), (7,))) == Chain()
    assert limit_d(b((6,), (7,))) == Chain()
    assert set(limit_d(b((1, 2), (2, 3), (3, 4)))) == {b((1, 2), (3, 4))}
    assert set(gproduct(b((1, 2), (3, 4)), b((6,), (7,)))) == {b((1, 2, 6), (3, 4, 7))}
    target = str(b((1, 2, 6), (3, 4, 7)))
    for terms in r.details["rhs_by_sign_choice"].values():
        assert [t for t, _ in terms] == [target]


def test_leibniz_batch():
    r = leibniz_batch(count=200, seed=0, n=10)
    assert r.passed
    assert sum(r.details["by_class"].values()) == 200
    assert all(r.details["by_class"][c] > 0 for c in IN_REGIME)


def test_sign_witness_examples():
    w = sign_witness((1, 4), (2, 3))
    assert w.gaps == (2,) and w.epsilon == 2
    w = sign_witness((1, 2), (5, 6))
    assert w.gaps == (0,) and w.epsilon == 0
    assert sign_lemmas_check(b((1, 4)), b((2, 3))).passed
    assert sign_lemmas_check(b((1, 2)), b((5, 6))).passed
    with pytest.raises(ArrangementError):
        sign_lemmas_check(b((1, 2), (3, 4)), b((5,), (6,)))


def test_sign_lemmas_exhaustive():
    r = sign_lemmas_exhaustive(8)
    assert r.passed and r.details["core_pairs"] == 3 ** 8 - 2 * 2 ** 8 + 1


@pytest.mark.parametrize("k,ell", [(2, 3), (2, 4), (3, 5)])
def test_stabilization_kills_cup(k, ell):
    r = stabilization_cup_check(k, ell)
    assert r.passed and r.details["nonzero_pairs"] > 0


# -- properties ----------------------------------------------------------------------


@st.composite
def operands(draw, n=9):
    if draw(st.integers(0, 9)) == 0:
        return UNIT
    q = draw(st.integers(0, 3))
    pool = list(combinations(range(1, n + 1), q))
    fam = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=3, unique=True))
    return canonicalize(fam)


@given(st.lists(st.integers(1, 12), unique=True, max_size=5), st.lists(st.integers(1, 12), unique=True, max_size=5))
def test_epsilon_matches_permutation_inversions(xs, ys):
    ys = [y for y in ys if y not in xs]
    A, B = sorted(xs), sorted(ys)
    word = A + B
    perm = Permutation(sorted(range(len(word)), key=lambda i: word[i]))
    assert epsilon(b(tuple(A)), b(tuple(B))) == perm.inversions()


@given(operands(), operands(), operands())
def test_associativity_property(x, y, z):
    left = gproduct_chain(gproduct(x, y), Chain.single(z))
    right = gproduct_chain(Chain.single(x), gproduct(y, z))
    assert left == right


@given(operands())
def test_unit_property(x):
    assert gproduct(UNIT, x) == gproduct(x, UNIT) == {x: 1}


@given(operands(), operands())
def test_product_grading(x, y):
    for z in gproduct(x, y):
        if x.is_unit or y.is_unit:
            continue
        assert z.q == x.q + y.q
        # cores add, member count is shared
        assert codegree_limit(z) == codegree_limit(x) + codegree_limit(y) + 2 - x.size


@settings(max_examples=200)
@given(operands(), operands())
def test_leibniz_in_regime_property(x, y):
    assume(leibniz_classify(x, y) in IN_REGIME)
    lhs, rhs = leibniz_sides(x, y)
    assert lhs == rhs
