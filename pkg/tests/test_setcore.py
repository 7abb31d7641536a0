from itertools import combinations
from math import comb

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from klim.setcore import (
    ArrangementError,
    AtomSet,
    atoms_of,
    closure_partition,
    codim,
    complement,
    complement_family,
    free_vertices,
    inversion_count,
    is_independent,
    make_atom,
    pset_candidates,
)


def A(atoms, ell):
    return AtomSet.of(atoms, ell)


def test_atoms_of():
    assert atoms_of(2, 3) == [(1, 2), (1, 3), (2, 3)]
    assert atoms_of(3, 3) == [(1, 2, 3)]
    assert len(atoms_of(3, 6)) == comb(6, 3)
    with pytest.raises(ArrangementError):
        atoms_of(1, 3)
    with pytest.raises(ArrangementError):
        atoms_of(4, 3)


def test_atomset_validation():
    with pytest.raises(ArrangementError):
        AtomSet(((1, 3), (1, 2)), 3)
    with pytest.raises(ArrangementError):
        AtomSet(((1, 2), (1, 2, 3)), 3)
    with pytest.raises(ArrangementError):
        AtomSet(((1, 4),), 3)
    with pytest.raises(ArrangementError):
        make_atom([0, 1])
    assert A([[2, 1], [1, 2], [3, 1]], 3).atoms == ((1, 2), (1, 3))


def test_closure_partition_examples():
    assert closure_partition(A([[1, 2, 3], [3, 4, 5]], 5)) == ((1, 2, 3, 4, 5),)
    assert closure_partition(A([[1, 2], [3, 4]], 5)) == ((1, 2), (3, 4), (5,))
    assert closure_partition(A([], 4)) == ((1,), (2,), (3,), (4,))


def test_codim_examples():
    assert codim(A([[1, 2, 3]], 5)) == 2
    assert codim(A([[1, 2, 3], [3, 4, 5]], 5)) == 4
    assert codim(A([[1, 2], [3, 4]], 5)) == 2


def test_complement_examples():
    assert complement(A([[1, 2, 3]], 5)) == ((4, 5),)
    assert complement(A([[1, 2, 3], [1, 2, 4]], 4)) == ((3,), (4,))
    S = A([[1, 2], [1, 3]], 4)
    assert complement_family(complement(S), 4) == S


def test_free_vertices_examples():
    assert free_vertices((1, 2, 3), A([[1, 2, 3], [3, 4, 5]], 5)) == (1, 2)
    assert free_vertices((1, 2, 3), A([[1, 2, 3], [1, 2, 4], [2, 3, 4]], 4)) == ()
    assert free_vertices((1, 3, 4), A([[1, 3, 4], [1, 2, 5]], 5)) == (3, 4)
    with pytest.raises(ArrangementError):
        free_vertices((1, 2, 4), A([[1, 2, 3]], 4))


def test_pset_candidates_examples():
    assert (1, 2) in pset_candidates(A([[1, 3, 4], [1, 2, 5]], 5), 3)
    # a single atom is its own core, which no (k-1)-set can contain
    assert pset_candidates(A([[1, 2]], 2), 2) == []
    full = A([[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]], 4)
    assert pset_candidates(full, 3) == []


def test_is_independent_examples():
    assert not is_independent(A([[1, 2], [1, 3], [2, 3]], 3))
    assert is_independent(A([[1, 2], [3, 4]], 4))
    assert is_independent(A([[1, 2, 3], [1, 2, 4], [1, 2, 5]], 5))
    assert is_independent(A([], 3))


def test_inversion_count_examples():
    assert inversion_count((1, 2), (3, 4)) == 0
    assert inversion_count((3, 4), (1, 2)) == 4
    assert inversion_count((2,), (1, 3)) == 1
    with pytest.raises(ArrangementError):
        inversion_count((1, 2), (2, 3))


# -- properties ------------------------------------------------------------------


@st.composite
def atom_sets(draw, k_max=4, ell_max=7):
    ell = draw(st.integers(2, ell_max))
    k = draw(st.integers(2, min(k_max, ell)))
    atoms = atoms_of(k, ell)
    chosen = draw(st.lists(st.sampled_from(atoms), max_size=5, unique=True))
    return AtomSet(tuple(sorted(chosen)), ell)


def _nx_blocks(S):
    g = nx.Graph()
    g.add_nodes_from(range(1, S.ell + 1))
    for a in S.atoms:
        g.add_edges_from((a[0], x) for x in a[1:])
    return sorted(tuple(sorted(c)) for c in nx.connected_components(g))


@given(atom_sets())
def test_closure_matches_graph_components(S):
    assert list(closure_partition(S)) == _nx_blocks(S)


@given(atom_sets())
def test_codim_bounds_and_connected_case(S):
    c = codim(S)
    assert 0 <= c <= S.ell - 1
    blocks = [b for b in closure_partition(S) if len(b) > 1]
    if len(blocks) == 1:
        assert c == len(S.support()) - 1


@given(atom_sets(), st.data())
def test_codim_monotone(S, data):
    extra = data.draw(st.sampled_from(atoms_of(S.arity or 2, S.ell)))
    if S.atoms and len(extra) != S.arity:
        return
    T = S.union(AtomSet((extra,), S.ell))
    assert codim(S) <= codim(T)


@given(atom_sets())
def test_closure_idempotent_under_inner_atom(S):
    part = closure_partition(S)
    k = S.arity or 2
    for block in part:
        if len(block) >= k:
            inner = block[:k]
            T = S.union(AtomSet((inner,), S.ell))
            assert closure_partition(T) == part


@given(atom_sets())
def test_complement_involution(S):
    assert complement_family(complement(S), S.ell) == S


@given(st.sets(st.integers(1, 12), max_size=6), st.sets(st.integers(1, 12), max_size=6))
def test_inversion_count_symmetry(a, b):
    b = b - a
    assert inversion_count(sorted(a), sorted(b)) + inversion_count(sorted(b), sorted(a)) == len(a) * len(b)


@given(atom_sets())
def test_free_vertices_imply_independence(S):
    if S.atoms and all(free_vertices(a, S) for a in S.atoms):
        assert is_independent(S)


def test_pset_candidates_brute_force():
    S = A([[1, 3, 4], [1, 2, 5]], 5)
    expected = []
    for P in combinations(range(1, 6), 2):
        if set(S.core()) <= set(P) and all(set(free_vertices(a, S)) - set(P) for a in S.atoms):
            expected.append(P)
    assert pset_candidates(S, 3) == expected
