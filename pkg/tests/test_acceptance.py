"""The nine acceptance criteria at full size, one PASS/FAIL line each."""

from __future__ import annotations

import pytest

from finehier import checks

_REDUCTION = {}


def _reduction():
    if not _REDUCTION:
        _REDUCTION["results"] = checks.check_reduction(count=500, seed=0)
    return _REDUCTION["results"]


@pytest.fixture
def report(acceptance_log):
    def record(n: int, result: checks.CheckResult) -> None:
        line = f"criterion {n}: {result.line()}"
        acceptance_log.append(line)
        print(line)
        assert result.passed, result.failures
    return record


def test_criterion_1_h_preorder_oracle(report):
    r = checks.check_h_preorder(sizes=((2, 4), (3, 3)), time_limit=60.0)
    assert r.cases >= 1000
    report(1, r)


def test_criterion_2_linearization(report):
    report(2, checks.check_linearization(max_len=6))


def test_criterion_3_reduction_suite(report):
    r = _reduction()[0]
    assert r.cases >= 500
    report(3, r)


def test_criterion_4_reduced_families_determine(report):
    report(4, _reduction()[1])


def test_criterion_5_category_operator(report):
    report(5, checks.check_category(max_points=4, time_limit=300.0))


def test_criterion_6_preservation(report):
    report(6, checks.check_membership_preservation(max_points=4, max_nodes=3))


def test_criterion_7_hausdorff(report):
    r = checks.check_hausdorff(count=100, seed=0)
    assert r.cases >= 100 + 4
    report(7, r)


def test_criterion_8_noncollapse(report):
    report(8, checks.check_noncollapse(max_n=4))


def test_criterion_9_ordinals(report):
    report(9, checks.check_ordinals(max_coef=3))
