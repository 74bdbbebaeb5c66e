"""Acceptance criteria 1-13 at desk scale, one PASS/FAIL line per criterion.

Every criterion compares exact integers or residues, so the tolerance is
zero throughout.  The whole suite must finish within the runtime budget.
"""

import time

import pytest

from contrakit.acceptance import CRITERIA, run_criterion

SEED = 0
TOLERANCE = 0  # exact equality of invariants, residues and congruence classes
RUNTIME_BUDGET_SECONDS = 120.0

_results = {}


@pytest.fixture(scope="module")
def desk_results():
    start = time.perf_counter()
    for i in sorted(CRITERIA):
        _results[i] = run_criterion(i, SEED, "desk")
    return _results, time.perf_counter() - start


@pytest.mark.parametrize("index", sorted(CRITERIA))
def test_criterion(index, desk_results, capsys):
    results, _ = desk_results
    r = results[index]
    with capsys.disabled():
        print(f"\ncriterion {index:2d} ({r.name}): {'PASS' if r.passed else 'FAIL'} "
              f"[tolerance {TOLERANCE}, {r.seconds:.1f}s]")
    assert r.passed, r.report.failures()


def test_runtime_budget(desk_results):
    _, total = desk_results
    assert total < RUNTIME_BUDGET_SECONDS, f"desk suite took {total:.1f}s"
