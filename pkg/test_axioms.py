#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Axiom Harness
Catalog, random instances, per-model checks and the differential suite
"""

import sys

import pytest

from bna_core import Sort, cell_count, sort_of
from axiom_harness import (
    CheckParams,
    Report,
    Unsatisfiable,
    axiom_catalog,
    check_axiom,
    check_normal_forms,
    differential_suite,
    find_axiom,
    normal_form_catalog,
    random_env,
    random_term,
    run_catalog,
    verify_sorts,
    wire_identity_suite,
)

SMALL = CheckParams(horizon=6, domain_size=2, max_ports=2, max_ops=4)


def test_catalog_tables():
    catalog = axiom_catalog()
    assert sum(ax.table == 1 for ax in catalog) == 18
    assert sum(ax.table == 2 for ax in catalog) == 2
    assert sum(ax.table == 3 for ax in catalog) == 22
    assert len({ax.name for ax in catalog}) == len(catalog)
    assert all(ax.expected == "fails-synchronously" for ax in catalog if ax.table == 2)


def test_catalog_texts():
    assert find_axiom("B7").equation() == "X(k,l) ; X(l,k) = I(k+l)"
    assert find_axiom("A3°").rhs == "sink(m) ; src(m)"
    assert find_axiom("B2").lhs == "I(0) ++ f"
    assert find_axiom("R6").variables == ["k", "l", "m", "n"]
    with pytest.raises(KeyError):
        find_axiom("Z9")


def test_every_axiom_is_well_sorted():
    for ax in axiom_catalog():
        verify_sorts(ax)


def test_instantiate():
    sides, metas = find_axiom("R1").instantiate({"k": 1, "l": 2, "m": 1, "n": 3})
    assert metas == {"g": Sort(1, 2), "f": Sort(3, 4)}
    assert sort_of(sides[0], metas) == sort_of(sides[1], metas) == Sort(1, 3)


def test_random_terms_are_well_sorted():
    env = random_env(2, seed=1)
    for seed in range(40):
        sort = Sort(seed % 3, (seed // 3) % 3)
        t = random_term(5, sort, env, seed, max_ports=2)
        assert sort_of(t, env) == sort


def test_random_term_determinism():
    env = random_env(3, seed=0)
    assert random_term(6, Sort(2, 1), env, 9) == random_term(6, Sort(2, 1), env, 9)
    small = random_term(1, Sort(1, 1), env, 2)
    assert sort_of(small, env) == Sort(1, 1)
    assert cell_count(small) <= 1
    with pytest.raises(Unsatisfiable):
        random_term(1, Sort(3, 0), env, 0, branching=False)


def test_relation_model_network_axioms():
    for name in ("F2", "B7", "R4"):
        report = check_axiom(find_axiom(name), "rel", 5, SMALL, seed=1)
        assert report.passed, report.counterexample
    with pytest.raises(ValueError):
        check_axiom(find_axiom("A11"), "rel", 1, SMALL)
    with pytest.raises(ValueError):
        check_axiom(find_axiom("A11"), "wires", 1, SMALL)


def test_synchronous_axioms_hold():
    for model in ("stream", "proc"):
        for name in ("A11", "A3°", "F4", "F5°", "R1"):
            report = check_axiom(find_axiom(name), model, 5, SMALL, seed=2)
            assert report.passed, report.counterexample
            assert report.counterexample is None


def test_originals_fail_synchronously():
    """A counterexample is the expected outcome"""
    for model in ("stream", "proc"):
        report = check_axiom(find_axiom("A3"), model, 10, SMALL, seed=0)
        assert report.passed
        assert report.counterexample
        assert report.trials <= 10


def test_catalog_runs():
    reports = run_catalog("rel", 2, SMALL, seed=3)
    assert len(reports) == 18 and all(r.passed for r in reports)
    reports = run_catalog("stream", 2, SMALL, seed=3, table=3)
    assert len(reports) == 22 and all(r.passed for r in reports)
    reports = run_catalog("proc", 2, SMALL, seed=3, table=2)
    assert [r.axiom for r in reports] == ["A3", "F5"]
    assert all(r.passed for r in reports)


def test_network_axioms_normalize_together():
    for ax in axiom_catalog():
        if ax.table == 1:
            report = check_normal_forms(ax, 3, SMALL, seed=5)
            assert report.passed, report.counterexample


def test_normal_form_catalog():
    """Twenty instances of every network axiom normalize to isomorphic forms"""
    reports = normal_form_catalog(20, SMALL, seed=5)
    assert len(reports) == 18
    assert all(r.model == "nf" and r.trials == 20 for r in reports)
    assert all(r.passed for r in reports), [r.counterexample for r in reports if not r.passed]


def test_wire_identity_suite():
    """Every constant and every sampled random cell is invisible behind a wire"""
    reports = wire_identity_suite(cells=20, trials=5, params=SMALL, seed=2)
    assert len(reports) == 26
    assert [r.axiom for r in reports[:6]] == [
        "wire I(1)", "wire X(1,1)", "wire cp(1)", "wire sink(1)", "wire eq(1)", "wire src(1)",
    ]
    assert all(r.axiom.startswith("wire p") for r in reports[6:])
    assert all(r.passed for r in reports), [r.counterexample for r in reports if not r.passed]


def test_differential_suite():
    report = differential_suite(count=20, size=5, horizon=6, seed=7, domain_size=2, max_ports=2)
    assert report.passed, report.divergences


def test_report_line():
    report = Report(axiom="B1", model="stream", passed=False, trials=3, seed=0, counterexample="a\nb")
    assert report.line() == "B1\tstream\tFAIL\t3\t0\ta | b"
    assert Report(axiom="F2", model="rel", passed=True, trials=5, seed=1).line() == "F2\trel\tPASS\t5\t1"


def main():
    """Run axiom harness checks"""
    print("=== Axiom Harness Tests ===")
    tests = [value for name, value in sorted(globals().items()) if name.startswith("test_")]
    failed = []
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failed.append(test.__name__)
            print(f"❌ {test.__name__}: {e}")
    print(f"\n📊 {len(tests) - len(failed)}/{len(tests)} passed")
    return not failed


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
