"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria 1-9 run the same checks as the CLI --selftest; criterion 10 runs
the CLI twice and compares outputs byte for byte.
"""

import subprocess
import sys

import pytest

from entlink import selftest


def _run(fn, *args):
    r = fn(*args)
    line = "PASS" if r["passed"] else "FAIL"
    print(f"[{line}] {r['criterion']}: max_err={r['max_err']:.3g} "
          f"({r['seconds']:.2f}s) {r['note']}")
    assert r["passed"], r


def test_criterion_01_steady_state_closed_form():
    _run(selftest.criterion_steady_state)


def test_criterion_02_lp_vs_best_cutoff():
    _run(selftest.criterion_lp_vs_cutoffs)


def test_criterion_03_two_link_waiting_lp():
    _run(selftest.criterion_two_link_waiting)


def test_criterion_04_joining_fidelity_formulas():
    _run(selftest.criterion_joining_fidelities)


def test_criterion_05_distillation():
    _run(selftest.criterion_distillation)


def test_criterion_06_collective_waiting():
    _run(selftest.criterion_collective_waiting)


def test_criterion_07_satellite_link():
    _run(selftest.criterion_satellite_link)


def test_criterion_08_backward_recursion():
    _run(selftest.criterion_backward_recursion)


def test_criterion_09_key_rates():
    _run(selftest.criterion_key_rates)


def test_criterion_10_selftest_determinism(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        r = subprocess.run(
            [sys.executable, "-m", "entlink.cli", "--selftest", "--seed",
             "20260824", "--out", str(path)],
            capture_output=True, text=True, timeout=600)
        assert r.returncode == 0, r.stderr
        outs.append(path.read_bytes())
    identical = outs[0] == outs[1]
    print(f"[{'PASS' if identical else 'FAIL'}] selftest CSV byte-identical "
          f"across same-seed runs ({len(outs[0])} bytes)")
    assert identical
