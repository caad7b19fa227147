#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Network Algebra Core
Sorts, block expansion, network families, derived operators and netlists
"""

import sys

import pytest
from hypothesis import given, settings, strategies as st

from bna_core import (
    BadShape,
    Cell,
    CellDef,
    CellEnv,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    MissingTableRow,
    Par,
    Seq,
    Sink,
    Sort,
    SortMismatch,
    Transp,
    UnboundCell,
    ValueOutsideDomain,
    build_regular,
    cell_count,
    dagger,
    expand_blocks,
    feedback_star,
    flatten,
    identification,
    left_feed,
    make_cell,
    mu,
    ramification,
    sort_of,
    star,
    substitute,
)

SORTS = {"f": Sort(2, 2), "g": Sort(1, 1), "h": Sort(2, 3)}

small = st.integers(min_value=0, max_value=3)

leaves = st.one_of(
    st.builds(Id, small),
    st.builds(Transp, small, small),
    st.builds(Copy, small),
    st.builds(Sink, small),
    st.builds(EqTest, small),
    st.builds(DummySource, small),
    st.just(Cell("f")),
    st.just(Cell("g")),
)


def _extend(children):
    # Only compositions that are well-sorted whatever the children are
    return st.one_of(
        st.builds(Par, children, children),
        st.builds(lambda t, k: Feed(Par(t, Id(k)), k), children, small),
    )


terms = st.recursive(leaves, _extend, max_leaves=6)


def _is_unary(t) -> bool:
    match t:
        case Par(left, right) | Seq(left, right):
            return _is_unary(left) and _is_unary(right)
        case Feed(body, width):
            return width == 1 and _is_unary(body)
        case Transp(m, n):
            return (m, n) == (1, 1)
        case Id(n) | Copy(n) | Sink(n) | EqTest(n) | DummySource(n):
            return n <= 1
    return True


def test_sort_examples():
    """Sorts of constants and the transposition example"""
    assert sort_of(Transp(2, 1)) == Sort(3, 3)
    assert str(sort_of(Transp(2, 1))) == "3 -> 3"
    assert sort_of(Copy(2)) == Sort(2, 4)
    assert sort_of(EqTest(3)) == Sort(6, 3)
    assert sort_of(Feed(Cell("f"), 1), SORTS) == Sort(1, 1)
    assert sort_of(Seq(Cell("h"), Par(Cell("f"), Cell("g"))), SORTS) == Sort(2, 3)


def test_sort_errors():
    """Mismatched compositions report the offending sorts"""
    with pytest.raises(SortMismatch) as info:
        sort_of(Seq(Id(2), Id(3)))
    assert info.value.left == Sort(2, 2)
    assert info.value.right == Sort(3, 3)
    with pytest.raises(SortMismatch):
        sort_of(Feed(Cell("g"), 2), SORTS)
    with pytest.raises(UnboundCell):
        sort_of(Cell("nope"), SORTS)
    with pytest.raises(ValueError):
        Id(-1)


@settings(max_examples=60, deadline=None)
@given(terms)
def test_expansion_preserves_sort(t):
    """Block expansion keeps the sort and leaves only unary constants"""
    expanded = expand_blocks(t)
    assert sort_of(expanded, SORTS) == sort_of(t, SORTS)
    assert _is_unary(expanded)
    assert expand_blocks(expanded) == expanded


def test_expansion_equations():
    """A few expansions written out by hand"""
    assert expand_blocks(Id(3)) == Par(Id(1), Par(Id(1), Id(1)))
    assert expand_blocks(Transp(2, 0)) == Par(Id(1), Id(1))
    assert expand_blocks(Copy(0)) == Id(0)
    assert expand_blocks(Feed(Cell("f"), 2)) == Feed(Feed(Cell("f"), 1), 1)
    assert expand_blocks(Feed(Cell("f"), 0)) == Cell("f")


def test_regular_network():
    """The 3-by-4 grid uses twelve cells and closes four feedback loops"""
    t = build_regular(3, 4, "f", SORTS)
    assert cell_count(t) == 12
    assert isinstance(t, Feed) and t.width == 4
    assert sort_of(t, SORTS) == Sort(3, 3)
    assert cell_count(build_regular(1, 2, "f")) == 2


def test_regular_network_shapes():
    with pytest.raises(BadShape):
        build_regular(4, 3, "f")
    with pytest.raises(BadShape):
        build_regular(0, 3, "f")
    with pytest.raises(BadShape):
        build_regular(1, 2, "g", SORTS)


def test_derived_operators():
    """Sorts of the derived operators"""
    assert sort_of(left_feed(Cell("h"), 2, SORTS), SORTS) == Sort(0, 1)
    assert sort_of(feedback_star(Cell("f"), SORTS), SORTS) == Sort(1, 1)
    assert sort_of(mu(Cell("g"), SORTS), SORTS) == Sort(0, 1)
    assert sort_of(star(Cell("g"), SORTS), SORTS) == Sort(1, 1)
    assert sort_of(dagger(Cell("h"), SORTS), SORTS) == Sort(2, 1)
    assert dagger(Cell("h"), SORTS) == left_feed(Seq(EqTest(2), Cell("h")), 2, SORTS)
    assert sort_of(dagger(Cell("g"), SORTS), SORTS) == Sort(1, 0)
    with pytest.raises(SortMismatch):
        star(Cell("f"), SORTS)


def test_branching_families():
    assert ramification(0) == Sink(1)
    assert ramification(2) == Copy(1)
    assert sort_of(ramification(1)) == Sort(1, 1)
    assert sort_of(ramification(4)) == Sort(1, 4)
    assert identification(0) == DummySource(1)
    assert identification(2) == EqTest(1)
    assert sort_of(identification(3)) == Sort(3, 1)


def test_substitute():
    t = Seq(Cell("g"), Feed(Par(Cell("g"), Id(1)), 1))
    replaced = substitute(t, {"g": Id(1)})
    assert cell_count(replaced) == 0
    assert sort_of(replaced) == Sort(1, 1)


def test_flatten_shapes():
    """One wire per identity strand and loop edge"""
    net = flatten(Id(1))
    assert [node.kind for node in net.nodes] == ["wire"]
    assert len(net.channels) == 2

    net = flatten(Feed(Copy(1), 1))
    assert net.count("copy1") == 1 and net.count("wire") == 1
    assert net.sort == Sort(0, 1)

    net = flatten(Seq(Id(1), Id(1)))
    assert net.count("wire") == 2
    assert len(net.channels) == 3


def test_cell_tables():
    """Tables must be total and stay inside the domain"""
    domain = ("0", "1")
    cell = make_cell("not", Sort(1, 1), lambda x: "1" if x == "0" else "0", ("0",), domain)
    env = CellEnv(domain=domain, cells={"not": cell})
    assert env.lookup("not").apply(("0",)) == ("1",)
    with pytest.raises(UnboundCell):
        env.lookup("missing")
    with pytest.raises(MissingTableRow):
        CellEnv(domain=domain, cells={"half": CellDef(name="half", sort=Sort(1, 1),
                                                      table={("0",): ("1",)}, init=("0",))})
    bad = make_cell("bad", Sort(1, 1), lambda x: "7", ("0",), domain)
    with pytest.raises(ValueOutsideDomain):
        CellEnv(domain=domain, cells={"bad": bad})


def main():
    """Run all core checks"""
    print("=== Network Algebra Core Tests ===")
    tests = [value for name, value in sorted(globals().items()) if name.startswith("test_")]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"❌ {test.__name__}: {e}")
    print(f"\n📊 Summary: {len(tests) - failed}/{len(tests)} passed")
    return failed == 0


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
