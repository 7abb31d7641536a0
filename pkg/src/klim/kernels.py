"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``KLIM_PURE_PYTHON=1`` to force the
pure-Python fallback.  Both expose the same functions.
"""

import os

from . import _pykernels

if os.environ.get("KLIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
codim_mask = _impl.codim_mask
removable = _impl.removable
enumerate_generators = _impl.enumerate_generators
d_squared_defects = _impl.d_squared_defects


def rank_int_rows(rows, ncols):
    if _impl is _pykernels:
        return _pykernels.rank_int_rows(rows, ncols)
    try:
        return _impl.rank_int_rows(rows, ncols)
    except OverflowError:
        # entries outgrew 64 bits; redo with unbounded integers
        return _pykernels.rank_int_rows(rows, ncols)
