#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Data Transformer Model
Finite relations under the network operations, checked against brute force
"""

import sys

import numpy as np
import pytest

from bna_core import Cell, Copy, Feed, Id, Par, Seq, Sort, Transp
from relation_model import (
    FinRel,
    UnsupportedConstant,
    eval_rel,
    feedback,
    feedback_by_enumeration,
    from_pairs,
    identity,
    random_rel,
    transposition,
)

BITS = ("0", "1")


def test_feedback_of_swap_is_identity():
    assert eval_rel(Feed(Transp(1, 1), 1), {}, BITS) == identity(1, BITS)
    assert eval_rel(Feed(Transp(2, 2), 2), {}, BITS) == identity(2, BITS)


def test_feedback_of_identity_is_empty_network():
    rel = eval_rel(Feed(Id(1), 1), {}, BITS)
    assert rel.sort == Sort(0, 0)
    assert rel.pairs == frozenset({((), ())})


def test_global_crash():
    """Composing with the empty relation leaves nothing"""
    empty = random_rel(Sort(1, 1), BITS, 0.0, seed=1)
    anything = random_rel(Sort(1, 1), BITS, 0.7, seed=2)
    result = eval_rel(Seq(Cell("e"), Cell("a")), {"e": empty, "a": anything}, BITS)
    assert len(result) == 0


def test_random_relation_contract():
    assert len(random_rel(Sort(2, 1), BITS, 0.0, seed=5)) == 0
    assert len(random_rel(Sort(2, 1), BITS, 1.0, seed=5)) == 8
    a = random_rel(Sort(2, 2), BITS, 0.5, seed=42)
    b = random_rel(Sort(2, 2), BITS, 0.5, seed=42)
    assert a == b and a.pairs == b.pairs
    with pytest.raises(ValueError):
        random_rel(Sort(1, 1), BITS, 1.5, seed=0)


def test_transposition_pairs():
    rel = transposition(1, 2, BITS)
    assert (("0", "1", "1"), ("1", "1", "0")) in rel.pairs
    assert len(rel) == 8


def test_parallel_pairs_tuples():
    f = from_pairs(Sort(1, 1), BITS, [(("0",), ("1",))])
    g = from_pairs(Sort(1, 1), BITS, [(("1",), ("1",)), (("0",), ("0",))])
    both = eval_rel(Par(Cell("f"), Cell("g")), {"f": f, "g": g}, BITS)
    assert both.pairs == frozenset({(("0", "1"), ("1", "1")), (("0", "0"), ("1", "0"))})


def test_feedback_matches_enumeration():
    """The einsum feedback equals the existential definition"""
    for seed in range(10):
        for carrier in (BITS, ("a", "b", "c")):
            f = random_rel(Sort(3, 2), carrier, 0.4, seed=seed)
            for p in (0, 1, 2):
                assert feedback(f, p) == feedback_by_enumeration(f, p)


def test_monotone_in_cells():
    """Growing a cell relation never shrinks the network relation"""
    rng = np.random.default_rng(3)
    term = Feed(Seq(Par(Cell("f"), Id(1)), Transp(1, 1)), 1)
    small = random_rel(Sort(1, 1), BITS, 0.3, seed=9)
    large = FinRel(small.sort, BITS, small.matrix | (rng.random(small.matrix.shape) < 0.5))
    assert small.issubset(large)
    assert eval_rel(term, {"f": small}, BITS).issubset(eval_rel(term, {"f": large}, BITS))


def test_branching_constants_are_rejected():
    with pytest.raises(UnsupportedConstant):
        eval_rel(Copy(1), {}, BITS)


def main():
    """Run relation model checks"""
    print("=== Relation Model Tests ===")
    tests = [value for name, value in sorted(globals().items()) if name.startswith("test_")]
    passed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            print(f"❌ {test.__name__}: {e}")
            continue
        passed += 1
        print(f"✅ {test.__name__}")
    print(f"\n📊 {passed}/{len(tests)} passed")
    return passed == len(tests)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
