#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Normal Forms
Brings terms into the cells-plus-bijective-connection normal form and decides equality up to cell permutation
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx
import networkx.algorithms.isomorphism as iso

from bna_core import (
    Cell,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    Par,
    Seq,
    Sink,
    Sort,
    SortEnv,
    Term,
    Transp,
    _cell_sort,
    expand_blocks,
    par_all,
    seq_all,
    sort_of,
)

logger = logging.getLogger(__name__)

# Branching constants are normalized as atoms under these names
ATOM_NAMES = {Copy: "#cp1", Sink: "#sink1", EqTest: "#eq1", DummySource: "#src1"}
ATOM_TERMS = {"#cp1": Copy(1), "#sink1": Sink(1), "#eq1": EqTest(1), "#src1": DummySource(1)}

# Symbolic port names: ("in", i) / ("co", cell, j) are sources, ("out", i) / ("ci", cell, j) targets
Port = Tuple


@dataclass(frozen=True)
class NormalForm:
    """((I_m ++ x_1 ++ ... ++ x_k) ; f) fed back over the cell inputs"""
    external: Sort
    cells: Tuple[Tuple[str, Sort], ...]
    connection: Tuple[int, ...]
    feed_width: int

    def source_count(self) -> int:
        return self.external.inputs + sum(s.outputs for _, s in self.cells)


@dataclass
class _Wiring:
    """Normal form under construction, with symbolic ports"""
    m: int
    n: int
    cells: List[Tuple[str, Sort]]
    conn: Dict[Port, Port]


def _shift(port: Port, ext: int, cell: int) -> Port:
    if port[0] in ("in", "out"):
        return (port[0], port[1] + ext)
    return (port[0], port[1] + cell, port[2])


def _atom(t: Term, env: SortEnv) -> _Wiring:
    match t:
        case Id(n):
            return _Wiring(n, n, [], {("in", i): ("out", i) for i in range(n)})
        case Transp(m, n):
            conn = {("in", i): ("out", n + i) for i in range(m)}
            conn.update({("in", m + j): ("out", j) for j in range(n)})
            return _Wiring(m + n, n + m, [], conn)
        case Cell(name):
            s = _cell_sort(name, env)
            conn = {("in", i): ("ci", 0, i) for i in range(s.inputs)}
            conn.update({("co", 0, j): ("out", j) for j in range(s.outputs)})
            return _Wiring(s.inputs, s.outputs, [(name, s)], conn)
        case Copy(1) | Sink(1) | EqTest(1) | DummySource(1):
            return _atom(Cell(ATOM_NAMES[type(t)]), env)
    raise TypeError(f"unexpected term after block expansion: {t!r}")


def _build(t: Term, env: SortEnv) -> _Wiring:
    match t:
        case Par(left, right):
            a, b = _build(left, env), _build(right, env)
            conn = dict(a.conn)
            for src, dst in b.conn.items():
                conn[_shift(src, a.m, len(a.cells))] = _shift(dst, a.n, len(a.cells))
            return _Wiring(a.m + b.m, a.n + b.n, a.cells + b.cells, conn)
        case Seq(left, right):
            a, b = _build(left, env), _build(right, env)
            offset = len(a.cells)
            conn = {}
            for src, dst in a.conn.items():
                if dst[0] == "out":
                    dst = _shift(b.conn[("in", dst[1])], 0, offset)
                conn[src] = dst
            for src, dst in b.conn.items():
                if src[0] == "co":
                    conn[_shift(src, 0, offset)] = _shift(dst, 0, offset)
            return _Wiring(a.m, b.n, a.cells + b.cells, conn)
        case Feed(body, width):
            b = _build(body, env)
            m, n = b.m - width, b.n - width
            conn = {}
            for src, dst in b.conn.items():
                if src[0] == "in" and src[1] >= m:
                    continue
                # Follow the loop until the datum leaves the fed-back ports
                while dst[0] == "out" and dst[1] >= n:
                    dst = b.conn[("in", m + dst[1] - n)]
                conn[src] = dst
            return _Wiring(m, n, b.cells, conn)
    return _atom(t, env)


def _index(w: _Wiring) -> NormalForm:
    out_offset, in_offset = [], []
    outs = ins = 0
    for _, s in w.cells:
        out_offset.append(outs)
        in_offset.append(ins)
        outs += s.outputs
        ins += s.inputs

    def source(port: Port) -> int:
        return port[1] if port[0] == "in" else w.m + out_offset[port[1]] + port[2]

    def target(port: Port) -> int:
        return port[1] if port[0] == "out" else w.n + in_offset[port[1]] + port[2]

    connection = [0] * (w.m + outs)
    for src, dst in w.conn.items():
        connection[source(src)] = target(dst)
    return NormalForm(Sort(w.m, w.n), tuple(w.cells), tuple(connection), ins)


def to_normal_form(t: Term, env: SortEnv = None) -> NormalForm:
    """Normalize a term; branching constants become reserved atomic cells"""
    sort_of(t, env)
    nf = _index(_build(expand_blocks(t), env))
    logger.debug(f"Normal form with {len(nf.cells)} cells, feedback width {nf.feed_width}")
    return nf


# ---------------------------------------------------------------------------
# Back to terms
# ---------------------------------------------------------------------------

def permutation_term(perm: Tuple[int, ...]) -> Term:
    """A term of Id and Transp that sends input position i to output position perm[i]"""
    size = len(perm)
    if all(p == i for i, p in enumerate(perm)):
        return Id(size)
    for a in range(1, size):
        if all(perm[i] == size - a + i for i in range(a)) and all(perm[a + j] == j for j in range(size - a)):
            return Transp(a, size - a)

    # Odd-even transposition sort; each round swaps disjoint neighbours
    current = list(perm)
    layers = []
    for round_ in range(size):
        swaps = [k for k in range(round_ % 2, size - 1, 2) if current[k] > current[k + 1]]
        if not swaps:
            if all(current[k] <= current[k + 1] for k in range(size - 1)):
                break
            continue
        parts, pos = [], 0
        for k in swaps:
            if k > pos:
                parts.append(Id(k - pos))
            parts.append(Transp(1, 1))
            current[k], current[k + 1] = current[k + 1], current[k]
            pos = k + 2
        if pos < size:
            parts.append(Id(size - pos))
        layers.append(par_all(parts))
    return seq_all(layers)


def nf_to_term(nf: NormalForm) -> Term:
    """((I_m ++ x_1 ++ ... ++ x_k) ; f) ^ w, with reserved atoms turned back into constants"""
    wiring = permutation_term(nf.connection)
    if not nf.cells:
        return wiring
    atoms = [ATOM_TERMS.get(name, Cell(name)) for name, _ in nf.cells]
    body = Seq(par_all([Id(nf.external.inputs)] + atoms), wiring)
    return Feed(body, nf.feed_width) if nf.feed_width else body


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

_node_match = iso.categorical_node_match("label", None)
_edge_match = iso.categorical_multiedge_match("ports", None)


def to_graph(nf: NormalForm) -> nx.MultiDiGraph:
    """Port graph of a normal form: boundary ports and cells are nodes, each connection an edge"""
    graph = nx.MultiDiGraph()
    sources: List[Tuple[Tuple, int]] = []
    targets: List[Tuple[Tuple, int]] = []
    for i in range(nf.external.inputs):
        graph.add_node(("in", i), label=("in", i))
        sources.append((("in", i), 0))
    for i in range(nf.external.outputs):
        graph.add_node(("out", i), label=("out", i))
        targets.append((("out", i), 0))
    for c, (name, s) in enumerate(nf.cells):
        graph.add_node(("cell", c), label=(name, s.inputs, s.outputs))
        sources += [(("cell", c), j) for j in range(s.outputs)]
        targets += [(("cell", c), j) for j in range(s.inputs)]
    for i, t in enumerate(nf.connection):
        (u, j), (v, k) = sources[i], targets[t]
        graph.add_edge(u, v, ports=(j, k))
    return graph


def iso_equal(a: NormalForm, b: NormalForm) -> bool:
    """True iff the normal forms agree up to a name- and sort-preserving permutation of cells"""
    if a.external != b.external or a.feed_width != b.feed_width:
        return False
    if sorted(a.cells, key=_cell_key) != sorted(b.cells, key=_cell_key):
        return False
    return nx.is_isomorphic(to_graph(a), to_graph(b), node_match=_node_match, edge_match=_edge_match)


def _cell_key(cell: Tuple[str, Sort]) -> Tuple[str, int, int]:
    name, s = cell
    return (name, s.inputs, s.outputs)


def terms_iso_equal(left: Term, right: Term, env: SortEnv = None) -> bool:
    return iso_equal(to_normal_form(left, env), to_normal_form(right, env))
