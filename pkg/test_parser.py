#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test Network Algebra Parser
Term syntax, environment documents and stream files
"""

import json
import sys

import pytest
from hypothesis import given, settings, strategies as st

from bna_core import (
    Cell,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    MissingTableRow,
    NondeterministicCell,
    Par,
    Seq,
    Sink,
    Sort,
    Transp,
)
from bna_parser import (
    TICK,
    DuplicatePort,
    EnvironmentFormatError,
    NatOverflow,
    NetworkSyntaxError,
    PortOutOfRange,
    UnknownSymbol,
    env_to_json,
    format_sort,
    parse_env,
    parse_streams,
    parse_term,
    print_streams,
    print_term,
)

nat = st.integers(min_value=0, max_value=12)

leaves = st.one_of(
    st.builds(Id, nat),
    st.builds(Transp, nat, nat),
    st.builds(Copy, nat),
    st.builds(Sink, nat),
    st.builds(EqTest, nat),
    st.builds(DummySource, nat),
    st.sampled_from(["f", "g", "succ4", "I", "cp"]).map(Cell),
)

terms = st.recursive(
    leaves,
    lambda children: st.one_of(
        st.builds(Par, children, children),
        st.builds(Seq, children, children),
        st.builds(Feed, children, nat),
    ),
    max_leaves=10,
)

ENV_DOC = {
    "domain": ["0", "1"],
    "cells": {
        "not": {"arity": [1, 1], "init": ["0"], "table": {"0": ["1"], "1": ["0"]}},
        "and": {"arity": [2, 1], "init": ["0"],
                "table": {"0,0": ["0"], "0,1": ["0"], "1,0": ["0"], "1,1": ["1"]}},
        "one": {"arity": [0, 1], "init": ["1"], "table": {"": ["1"]}},
    },
}


@settings(max_examples=150, deadline=None)
@given(terms)
def test_print_parse_round_trip(t):
    """Printing and parsing back gives the same tree"""
    assert parse_term(print_term(t)) == t


def test_precedence():
    """`++` binds loosest, `^` tightest"""
    assert parse_term("f ++ g ; h") == Par(Cell("f"), Seq(Cell("g"), Cell("h")))
    assert parse_term("f ; g ^ 2") == Seq(Cell("f"), Feed(Cell("g"), 2))
    assert parse_term("f ; g ; h") == Seq(Seq(Cell("f"), Cell("g")), Cell("h"))
    assert parse_term("(succ4 ; cp(1))^1") == Feed(Seq(Cell("succ4"), Copy(1)), 1)
    assert parse_term("X(2,1)") == Transp(2, 1)
    assert parse_term("  I ( 3 ) ") == Id(3)


def test_canonical_printing():
    assert print_term(parse_term("((I(2) ++ f) ; X(2,2))^2")) == "((I(2) ++ f) ; X(2,2)) ^ 2"
    assert print_term(Par(Cell("f"), Par(Cell("g"), Cell("h")))) == "f ++ (g ++ h)"
    assert print_term(Seq(Cell("f"), Seq(Cell("g"), Cell("h")))) == "f ; (g ; h)"


def test_syntax_errors():
    """Errors carry the byte offset of the offending token"""
    with pytest.raises(NetworkSyntaxError) as info:
        parse_term("I(1) ++")
    assert info.value.offset == 7
    with pytest.raises(NetworkSyntaxError) as info:
        parse_term("I(1) $")
    assert info.value.offset == 5
    with pytest.raises(NetworkSyntaxError):
        parse_term("X(1)")
    with pytest.raises(NetworkSyntaxError):
        parse_term("f g")
    with pytest.raises(NetworkSyntaxError):
        parse_term("")


def test_natural_overflow():
    with pytest.raises(NatOverflow):
        parse_term("I(99999999999999999999999)")
    assert parse_term("I(007)") == Id(7)


def test_format_sort():
    assert format_sort(Sort(3, 4)) == "3 -> 4"


def test_environment_document():
    env = parse_env(json.dumps(ENV_DOC))
    assert env.domain == ("0", "1")
    assert env.lookup("and").apply(("1", "1")) == ("1",)
    assert env.lookup("one").sort == Sort(0, 1)
    again = parse_env(env_to_json(env))
    assert again.domain == env.domain
    assert again.cells == env.cells


def test_environment_errors():
    with pytest.raises(EnvironmentFormatError):
        parse_env("{not json")
    with pytest.raises(EnvironmentFormatError):
        parse_env(json.dumps({"domain": ["0", TICK]}))
    with pytest.raises(EnvironmentFormatError):
        parse_env(json.dumps({"domain": ["0", "0"]}))
    with pytest.raises(EnvironmentFormatError):
        parse_env(json.dumps({"domain": [], "cells": {}}))

    partial = json.loads(json.dumps(ENV_DOC))
    del partial["cells"]["not"]["table"]["1"]
    with pytest.raises(MissingTableRow):
        parse_env(json.dumps(partial))

    choice = json.loads(json.dumps(ENV_DOC))
    choice["cells"]["not"]["table"]["0"] = [["0"], ["1"]]
    with pytest.raises(NondeterministicCell):
        parse_env(json.dumps(choice))
    choice["cells"]["not"]["table"]["0"] = [["1"]]
    assert parse_env(json.dumps(choice)).lookup("not").apply(("0",)) == ("1",)


def test_stream_files():
    """Missing ports and positions are ticks; comments are skipped"""
    text = "# two ports\n1: a b ~ c\n\n"
    streams = parse_streams(text, 2, 5, ("a", "b", "c"))
    assert streams == [("a", "b", TICK, "c", TICK), (TICK,) * 5]
    assert parse_streams("1: a b c", 1, 2, ("a", "b", "c")) == [("a", "b")]
    assert print_streams(streams) == "1: a b ~ c ~\n2: ~ ~ ~ ~ ~"
    assert parse_streams(print_streams(streams), 2, 5, ("a", "b", "c")) == streams


def test_stream_file_errors():
    with pytest.raises(UnknownSymbol):
        parse_streams("1: a z", 1, 4, ("a",))
    with pytest.raises(DuplicatePort):
        parse_streams("1: a\n1: a", 1, 4, ("a",))
    with pytest.raises(PortOutOfRange):
        parse_streams("3: a", 2, 4, ("a",))
    with pytest.raises(NetworkSyntaxError):
        parse_streams("a b c", 1, 4, ("a", "b", "c"))
    with pytest.raises(NetworkSyntaxError):
        parse_streams("\u00b2: a", 1, 3, ("a",))


def main():
    """Run parser checks and report"""
    print("=== Parser Tests ===")
    tests = [value for name, value in sorted(globals().items()) if name.startswith("test_")]
    results = []
    for test in tests:
        try:
            test()
            results.append(True)
            print(f"✅ {test.__name__}")
        except Exception as e:
            results.append(False)
            print(f"❌ {test.__name__}: {e}")
    print(f"\n📊 {sum(results)}/{len(results)} parser checks passed")
    return all(results)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
