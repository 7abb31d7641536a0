"""Compare the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--k 4 --l 6] [--repeat 3]

Every kernel's output is checked for equality across the two backends before
timings are reported.
"""

import argparse
import statistics
import time

from klim import _pykernels
from klim.atomic import build_complex
from klim.ratlin import _integer_rows
from klim.setcore import atoms_of

try:
    from klim import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, repeat):
    best = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best.append(time.perf_counter() - t)
    return out, min(best), statistics.median(best)


def workloads(k, ell):
    atoms = atoms_of(k, ell)
    masks = [sum(1 << x for x in a) for a in atoms]
    n = len(atoms)
    gens, _ = _pykernels.enumerate_generators(masks, n)
    cx = build_complex(k, ell)
    mats = [cx.d[p] for p in sorted(cx.d)]
    row_sets = [(_integer_rows(M.row_dicts()), M.ncols) for M in mats]

    def enum(mod):
        return lambda: mod.enumerate_generators(masks, n)

    def removable(mod):
        return lambda: [mod.removable(masks, S) for S in gens]

    def d2(mod):
        return lambda: mod.d_squared_defects(masks, gens)

    def rank(mod):
        return lambda: [mod.rank_int_rows(rows, nc) for rows, nc in row_sets]

    return {"enumerate": enum, "removable": removable, "d_squared": d2, "rank": rank}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--l", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        raise SystemExit("compiled kernels are not built; run pip install -e . --no-build-isolation")

    print(f"A({args.k},{args.l}), best of {args.repeat}")
    print(f"{'kernel':<12} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, make in workloads(args.k, args.l).items():
        py_out, py_t, _ = timed(make(_pykernels), args.repeat)
        c_out, c_t, _ = timed(make(_ckernels), args.repeat)
        if py_out != c_out:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<12} {py_t:>10.4f} {c_t:>10.4f} {py_t / c_t:>7.1f}x")


if __name__ == "__main__":
    main()
