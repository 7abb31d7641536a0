"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are repeated
in the terminal summary under "acceptance criteria".
"""

import json
import os
import subprocess
import sys
import time

import sympy

from klim.atomic import betti, verify_d_squared
from klim.bicx import (
    vanishing_check,
    verify_decomposition,
    verify_delta_exactness,
    verify_delta_squared,
    verify_double_complex,
)
from klim.gprod import d_leibniz_counterexample, delta_leibniz_counterexample, leibniz_batch, sign_lemmas_exhaustive
from klim.limit import canonicalize, verify_generation


def test_01_differential_validity(criterion):
    start = time.perf_counter()
    runs = [(2, 3, None), (2, 4, None), (2, 5, None), (3, 5, None), (4, 6, None), (3, 6, 6)]
    reports = [verify_d_squared(k, ell, bound) for k, ell, bound in runs]
    elapsed = time.perf_counter() - start
    checked = sum(r.details["generators_checked"] for r in reports)
    ok = all(r.passed for r in reports) and elapsed < 300
    assert criterion(1, "d^2 = 0 on A(2,3..5), A(3,5), A(4,6), A(3,6)|S|<=6",
                     ok, f"{checked} generators, {elapsed:.1f}s of 300s")


def test_02_braid_oracle(criterion):
    t = sympy.Symbol("t")
    expected = {3: [1, 3, 2], 4: [1, 6, 11, 6], 5: [1, 10, 35, 50, 24]}
    ok = True
    for ell, coeffs in expected.items():
        oracle = sympy.Poly(sympy.prod([1 + i * t for i in range(1, ell)]), t).all_coeffs()[::-1]
        assert [int(c) for c in oracle] == coeffs
        got = betti(2, ell)
        listed = [got.get(p, 0) for p in range(len(coeffs))]
        stray = {p: h for p, h in got.items() if h and not 0 <= p < len(coeffs)}
        ok &= listed == coeffs and not stray
    assert criterion(2, "betti(2,l) = coefficients of prod(1+it), l=3,4,5", ok)


def test_03_delta_squared(criterion):
    r = verify_delta_squared(6, 3)
    assert criterion(3, "delta^2 = 0 for union in [6], |Lambda| <= 3", r.passed,
                     f"{r.details['generators']} generators")


def test_04_decomposition(criterion):
    r = verify_decomposition(6, 3)
    assert criterion(4, "phi/psi round trips and chain map on the same truncation", r.passed,
                     f"{r.details['generators']} generators, {r.details['summands']} summands")


def test_05_summand_exactness(criterion):
    r = verify_delta_exactness(6, None)
    assert criterion(5, "zero delta-homology of every summand with label union in [6]", r.passed,
                     f"{r.details['summands_checked']} summands")


def test_06_double_complex(criterion):
    r = verify_double_complex(6, 3)
    d = r.details
    ok = (
        r.passed
        and d["relation"] == "commute"
        and d["relation_counts"]["commute"] > 0
        and not any(d["total_homology"].values())
    )
    assert criterion(6, "d and delta commute, D^2 = 0, columns exact, total homology 0", ok,
                     f"{d['generators']} generators, {d['relation_counts']['commute']} nontrivially commuting")


def test_07_generation(criterion):
    start = time.perf_counter()
    reports = [verify_generation(q, k) for q, k in [(1, 2), (1, 3), (2, 3), (2, 4)]]
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reports) and elapsed < 600
    assert criterion(7, "homology spanned by book classes plus boundaries", ok, f"{elapsed:.1f}s of 600s")


def test_08_leibniz(criterion):
    batch = leibniz_batch(count=200, seed=0, n=10)
    dcex = delta_leibniz_counterexample()
    ecex = d_leibniz_counterexample()
    t1 = str(canonicalize([(1, 2, 4), (1, 3, 5)]))
    t2 = str(canonicalize([(1, 2, 6), (3, 4, 7)]))
    ok = (
        batch.passed
        and sum(batch.details["by_class"].values()) == 200
        and dcex.passed
        and dcex.details["lhs"] == []
        and [t for t, _ in dcex.details["rhs_sign_core_size"]] == [t1]
        and ecex.passed
        and ecex.details["lhs"] == []
        and all([t for t, _ in terms] == [t2] for terms in ecex.details["rhs_by_sign_choice"].values())
    )
    assert criterion(8, "200 in-regime Leibniz pairs plus both counterexamples", ok)


def test_09_sign_lemmas(criterion):
    r = sign_lemmas_exhaustive(8)
    assert criterion(9, "inversion and alternating-parity identities over [8]", r.passed,
                     f"{r.details['core_pairs']} core pairs")


def test_10_vanishing(criterion):
    reports = [vanishing_check(k, ell) for k, ell in [(2, 3), (2, 4), (3, 5)]]
    ok = all(r.passed for r in reports)
    for r in reports:
        m = r.details["m"]
        ok &= all(int(key.split(",")[1]) <= m for key in r.details["support"])
    assert criterion(10, "homology support satisfies m >= n for A(2,3), A(2,4), A(3,5)", ok)


COMMANDS = [
    ["betti", "--k", "3", "--l", "5"],
    ["limit", "--q", "1", "--stage-k", "3"],
    ["verify", "exactness", "--n", "5"],
    ["verify", "leibniz", "--trials", "60"],
    ["verify", "assoc", "--trials", "100"],
    ["verify", "vanishing", "--k", "2", "--l", "4"],
    ["product", "--op", "graded", "--lhs", "[[1,2],[3,4]]", "--rhs", "[[6],[7]]"],
]


def _payload(argv, jobs, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    env.pop("KLIM_CACHE_DIR", None)
    proc = subprocess.run(
        [sys.executable, "-m", "klim.cli", *argv, "--jobs", str(jobs), "--format", "json"],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.dumps(json.loads(proc.stdout)["payload"], separators=(",", ":"))


def test_11_determinism(criterion):
    ok = True
    for argv in COMMANDS:
        outputs = {_payload(argv, jobs, seed) for jobs, seed in [(1, 0), (3, 1), (2, 12345)]}
        ok &= len(outputs) == 1
    assert criterion(11, "byte-identical payloads across --jobs and hash seeds", ok, f"{len(COMMANDS)} commands")
