import random

import pytest
from hypothesis import given, settings, strategies as st

from klim import _pykernels, kernels
from klim.setcore import AtomSet, atoms_of, codim

try:
    from klim import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _masks(k, ell):
    atoms = atoms_of(k, ell)
    return atoms, [sum(1 << x for x in a) for a in atoms]


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("k,ell", [(2, 3), (2, 4), (3, 5)])
def test_python_kernels_match_setcore(k, ell):
    atoms, masks = _masks(k, ell)
    gens, codims = _pykernels.enumerate_generators(masks, len(atoms))
    assert len(gens) == 2 ** len(atoms)
    for S, c in zip(gens, codims):
        aset = AtomSet(tuple(a for i, a in enumerate(atoms) if S >> i & 1), ell)
        assert c == codim(aset)


@needs_ext
@pytest.mark.parametrize("k,ell,bound", [(2, 4, None), (3, 5, None), (3, 6, 3)])
def test_backends_agree(k, ell, bound):
    atoms, masks = _masks(k, ell)
    n = len(atoms) if bound is None else bound
    py = _pykernels.enumerate_generators(masks, n)
    cy = _ckernels.enumerate_generators(masks, n)
    assert list(py[0]) == list(cy[0]) and list(py[1]) == list(cy[1])
    gens = list(py[0])
    for S in gens[:: max(1, len(gens) // 500)]:
        assert list(_pykernels.removable(masks, S)) == list(_ckernels.removable(masks, S))
        assert _pykernels.codim_mask(masks, S) == _ckernels.codim_mask(masks, S)
    assert _pykernels.d_squared_defects(masks, gens) == _ckernels.d_squared_defects(masks, gens)


@st.composite
def int_rows(draw):
    ncols = draw(st.integers(1, 6))
    nrows = draw(st.integers(0, 6))
    rows = []
    for _ in range(nrows):
        cells = draw(st.dictionaries(st.integers(0, ncols - 1), st.integers(-5, 5).filter(bool), max_size=ncols))
        rows.append(cells)
    return rows, ncols


@needs_ext
@settings(max_examples=200)
@given(int_rows())
def test_rank_backends_agree(data):
    rows, ncols = data
    assert _ckernels.rank_int_rows(rows, ncols) == _pykernels.rank_int_rows(rows, ncols)


@needs_ext
def test_overflow_raises_and_wrapper_falls_back():
    big = 3 * 10**18
    rows = [{0: big, 1: 1}, {0: 1, 1: big}]
    with pytest.raises(OverflowError):
        _ckernels.rank_int_rows(rows, 2)
    assert kernels.rank_int_rows(rows, 2) == _pykernels.rank_int_rows(rows, 2) == 2


def test_rank_random_against_fractions():
    from klim.ratlin import SparseMatrix, rank
    import sympy

    rng = random.Random(5)
    for _ in range(20):
        dense = [[rng.choice([0, 0, 1, -1, 2]) for _ in range(7)] for _ in range(6)]
        assert rank(SparseMatrix.from_dense(dense)) == sympy.Matrix(dense).rank()


def test_pure_python_fallback_end_to_end():
    import json
    import os
    import subprocess
    import sys

    env = dict(os.environ, KLIM_PURE_PYTHON="1")
    proc = subprocess.run(
        [sys.executable, "-m", "klim.cli", "verify", "d2", "--k", "3", "--l", "5", "--format", "json"],
        capture_output=True, text=True, env=env, check=True,
    )
    details = json.loads(proc.stdout)["payload"]["details"]
    assert details["backend"] == "python" and details["violations"] == 0
