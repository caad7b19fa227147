#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Algebra Core
Typed network terms, sort inference, block expansion, derived operators and netlists
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator

logger = logging.getLogger(__name__)


class NetworkAlgebraError(Exception):
    """Base class for every error raised by the network algebra kernel"""


class SortMismatch(NetworkAlgebraError):
    """Raised at the subterm whose operand sorts do not fit together"""

    def __init__(self, term: "Term", left: "Sort", right: "Sort", detail: str):
        self.term = term
        self.left = left
        self.right = right
        super().__init__(f"{detail}: {left} vs {right} in {term!r}")


class UnboundCell(NetworkAlgebraError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"cell {name!r} is not bound in the environment")


class BadShape(NetworkAlgebraError):
    """Raised when a network family is requested with unusable parameters"""


class MissingTableRow(NetworkAlgebraError):
    def __init__(self, cell: str, row: Tuple[str, ...]):
        self.cell = cell
        self.row = row
        super().__init__(f"cell {cell!r} has no table row for input {','.join(row) or '()'}")


class ValueOutsideDomain(NetworkAlgebraError):
    def __init__(self, cell: str, value: str):
        self.cell = cell
        self.value = value
        super().__init__(f"cell {cell!r} uses {value!r}, which is not in the data domain")


class BadArity(NetworkAlgebraError):
    """Raised when a tuple length disagrees with the declared cell sort"""


class NondeterministicCell(NetworkAlgebraError):
    def __init__(self, cell: str, row: Tuple[str, ...]):
        self.cell = cell
        self.row = row
        super().__init__(f"cell {cell!r} offers several outputs for input {','.join(row) or '()'}; only functional cells are supported")


@dataclass(frozen=True)
class Sort:
    """Number of input and output ports of a network"""
    inputs: int
    outputs: int

    def __post_init__(self):
        if self.inputs < 0 or self.outputs < 0:
            raise ValueError(f"sort counts must be natural, got {self.inputs} -> {self.outputs}")

    def __str__(self) -> str:
        return f"{self.inputs} -> {self.outputs}"


# Reserved cell names used when branching constants are treated as atoms
RESERVED_CELLS = {"#cp1": Sort(1, 2), "#sink1": Sort(1, 0), "#eq1": Sort(2, 1), "#src1": Sort(0, 1)}


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def _natural(*counts: int) -> None:
    for count in counts:
        if not isinstance(count, int) or isinstance(count, bool) or count < 0:
            raise ValueError(f"port counts must be natural numbers, got {count!r}")


class Term:
    """Base class of network expressions"""
    __slots__ = ()


@dataclass(frozen=True)
class Par(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Seq(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Feed(Term):
    body: Term
    width: int

    def __post_init__(self):
        _natural(self.width)


@dataclass(frozen=True)
class Id(Term):
    n: int

    def __post_init__(self):
        _natural(self.n)


@dataclass(frozen=True)
class Transp(Term):
    m: int
    n: int

    def __post_init__(self):
        _natural(self.m, self.n)


@dataclass(frozen=True)
class Copy(Term):
    m: int

    def __post_init__(self):
        _natural(self.m)


@dataclass(frozen=True)
class Sink(Term):
    m: int

    def __post_init__(self):
        _natural(self.m)


@dataclass(frozen=True)
class EqTest(Term):
    m: int

    def __post_init__(self):
        _natural(self.m)


@dataclass(frozen=True)
class DummySource(Term):
    m: int

    def __post_init__(self):
        _natural(self.m)


@dataclass(frozen=True)
class Cell(Term):
    name: str


BRANCHING = (Copy, Sink, EqTest, DummySource)


# ---------------------------------------------------------------------------
# Cell environments
# ---------------------------------------------------------------------------

class CellDef(BaseModel):
    """A deterministic cell: sort, total function table and initial output tuple"""
    model_config = ConfigDict(frozen=True)

    name: str
    sort: Sort
    table: Dict[Tuple[str, ...], Tuple[str, ...]]
    init: Tuple[str, ...]

    def apply(self, inputs: Tuple[str, ...]) -> Tuple[str, ...]:
        return self.table[inputs]


class CellEnv(BaseModel):
    """Finite data domain plus the named cells that terms may reference"""
    model_config = ConfigDict(frozen=True)

    domain: Tuple[str, ...]
    cells: Dict[str, CellDef] = {}

    @model_validator(mode="after")
    def _check_tables(self) -> "CellEnv":
        if not self.domain:
            raise ValueError("the data domain must be nonempty")
        for cell in self.cells.values():
            check_cell_def(cell, self.domain)
        return self

    def lookup(self, name: str) -> CellDef:
        try:
            return self.cells[name]
        except KeyError:
            raise UnboundCell(name)

    def sorts(self) -> Dict[str, Sort]:
        return {name: cell.sort for name, cell in self.cells.items()}


def check_cell_def(cell: CellDef, domain: Tuple[str, ...]) -> None:
    """Check that a cell table is total on D^m, maps into D^n and has a valid init tuple"""
    symbols = set(domain)
    m, n = cell.sort.inputs, cell.sort.outputs
    if len(cell.init) != n:
        raise BadArity(f"cell {cell.name!r} init tuple has {len(cell.init)} entries, sort needs {n}")
    for value in cell.init:
        if value not in symbols:
            raise ValueOutsideDomain(cell.name, value)
    for row, result in cell.table.items():
        if len(row) != m or len(result) != n:
            raise BadArity(f"cell {cell.name!r} row {row} -> {result} does not fit sort {cell.sort}")
        for value in row + result:
            if value not in symbols:
                raise ValueOutsideDomain(cell.name, value)
    for row in product(domain, repeat=m):
        if tuple(row) not in cell.table:
            raise MissingTableRow(cell.name, tuple(row))


def make_cell(name: str, sort: Sort, fn, init: Tuple[str, ...], domain: Tuple[str, ...]) -> CellDef:
    """Tabulate a Python function over D^m into a CellDef"""
    table = {}
    for args in product(domain, repeat=sort.inputs):
        result = fn(*args)
        table[tuple(args)] = tuple(result) if isinstance(result, (tuple, list)) else (result,)
    return CellDef(name=name, sort=sort, table=table, init=tuple(init))


SortEnv = Union[CellEnv, Mapping[str, Sort], None]


def _cell_sort(name: str, env: SortEnv) -> Sort:
    if name in RESERVED_CELLS:
        return RESERVED_CELLS[name]
    if isinstance(env, CellEnv):
        return env.lookup(name).sort
    if env is not None and name in env:
        return env[name]
    raise UnboundCell(name)


# ---------------------------------------------------------------------------
# Sort inference
# ---------------------------------------------------------------------------

def sort_of(t: Term, env: SortEnv = None) -> Sort:
    """Infer the sort of a term, raising SortMismatch at the offending subterm"""
    match t:
        case Id(n):
            return Sort(n, n)
        case Transp(m, n):
            return Sort(m + n, n + m)
        case Copy(m):
            return Sort(m, 2 * m)
        case Sink(m):
            return Sort(m, 0)
        case EqTest(m):
            return Sort(2 * m, m)
        case DummySource(m):
            return Sort(0, m)
        case Cell(name):
            return _cell_sort(name, env)
        case Par(left, right):
            a, b = sort_of(left, env), sort_of(right, env)
            return Sort(a.inputs + b.inputs, a.outputs + b.outputs)
        case Seq(left, right):
            a, b = sort_of(left, env), sort_of(right, env)
            if a.outputs != b.inputs:
                raise SortMismatch(t, a, b, "sequential composition needs left outputs = right inputs")
            return Sort(a.inputs, b.outputs)
        case Feed(body, width):
            s = sort_of(body, env)
            if width > min(s.inputs, s.outputs):
                raise SortMismatch(t, s, Sort(width, width), "feedback wider than the body")
            return Sort(s.inputs - width, s.outputs - width)
    raise TypeError(f"not a network term: {t!r}")


def cell_count(t: Term) -> int:
    """Number of named cell occurrences"""
    match t:
        case Cell():
            return 1
        case Par(left, right) | Seq(left, right):
            return cell_count(left) + cell_count(right)
        case Feed(body, _):
            return cell_count(body)
    return 0


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace named cells by terms"""
    match t:
        case Cell(name):
            return mapping.get(name, t)
        case Par(left, right):
            return Par(substitute(left, mapping), substitute(right, mapping))
        case Seq(left, right):
            return Seq(substitute(left, mapping), substitute(right, mapping))
        case Feed(body, width):
            return Feed(substitute(body, mapping), width)
    return t


def par_all(terms: List[Term]) -> Term:
    """Left-nested parallel composition, I(0) when empty"""
    if not terms:
        return Id(0)
    result = terms[0]
    for term in terms[1:]:
        result = Par(result, term)
    return result


def seq_all(terms: List[Term]) -> Term:
    """Left-nested sequential composition of a nonempty list"""
    result = terms[0]
    for term in terms[1:]:
        result = Seq(result, term)
    return result


# ---------------------------------------------------------------------------
# Block expansion
# ---------------------------------------------------------------------------

def expand_blocks(t: Term) -> Term:
    """Rewrite block constants and wide feedback into their unary defining equations"""
    match t:
        case Par(left, right):
            return Par(expand_blocks(left), expand_blocks(right))
        case Seq(left, right):
            return Seq(expand_blocks(left), expand_blocks(right))
        case Feed(body, width):
            inner = expand_blocks(body)
            # R5 for width 0, R6 peels one port at a time
            for _ in range(width):
                inner = Feed(inner, 1)
            return inner
        case Id(n):
            return _expand_identity(n)
        case Transp(m, n):
            return _expand_transposition(m, n)
        case Copy(m):
            if m <= 1:
                return Id(0) if m == 0 else t
            # A19 with the block split as 1 + (m-1)
            return Seq(
                Par(Copy(1), expand_blocks(Copy(m - 1))),
                Par(Par(Id(1), _expand_transposition(1, m - 1)), _expand_identity(m - 1)),
            )
        case EqTest(m):
            if m <= 1:
                return Id(0) if m == 0 else t
            # A15 with the block split as 1 + (m-1)
            return Seq(
                Par(Par(Id(1), _expand_transposition(m - 1, 1)), _expand_identity(m - 1)),
                Par(EqTest(1), expand_blocks(EqTest(m - 1))),
            )
        case Sink(m):
            if m <= 1:
                return Id(0) if m == 0 else t
            return Par(Sink(1), expand_blocks(Sink(m - 1)))
        case DummySource(m):
            if m <= 1:
                return Id(0) if m == 0 else t
            return Par(DummySource(1), expand_blocks(DummySource(m - 1)))
    return t


def _expand_identity(n: int) -> Term:
    # B6
    if n <= 1:
        return Id(n)
    return Par(Id(1), _expand_identity(n - 1))


def _expand_transposition(m: int, n: int) -> Term:
    if m == 0:
        return _expand_identity(n)
    if n == 0:
        # B8
        return _expand_identity(m)
    if m == 1 and n == 1:
        return Transp(1, 1)
    if m == 1:
        # B9 with l = 1
        return Seq(
            Par(Transp(1, 1), _expand_identity(n - 1)),
            Par(Id(1), _expand_transposition(1, n - 1)),
        )
    # tr(1+k, n) = (I_1 ++ tr(k, n)) ; (tr(1, n) ++ I_k), derived from B7 and B9
    return Seq(
        Par(Id(1), _expand_transposition(m - 1, n)),
        Par(_expand_transposition(1, n), _expand_identity(m - 1)),
    )


# ---------------------------------------------------------------------------
# Network families and derived operators
# ---------------------------------------------------------------------------

def build_regular(k: int, l: int, cell: str, env: SortEnv = None) -> Term:
    """The regular k-by-l grid network built from a 2 -> 2 cell"""
    if not 0 < k < l:
        raise BadShape(f"regular network needs 0 < k < l, got k={k}, l={l}")
    if env is not None:
        cell_sort = _cell_sort(cell, env)
        if cell_sort != Sort(2, 2):
            raise BadShape(f"regular network needs a 2 -> 2 cell, {cell} is {cell_sort}")

    f = Cell(cell)

    def layer(left: int, count: int, right: int) -> Term:
        return par_all([Id(left)] + [f] * count + [Id(right)])

    layers = [layer(k - i, i, l - i) for i in range(1, k)]
    layers += [layer(i, k, l - k - i) for i in range(0, l - k + 1)]
    layers += [layer(l - i, i, k - i) for i in range(k - 1, 0, -1)]
    layers.append(Transp(l, k))
    return Feed(seq_all(layers), l)


def left_feed(t: Term, p: int, env: SortEnv = None) -> Term:
    """Feedback over the first p ports, expressed with right feedback"""
    s = sort_of(t, env)
    if p > min(s.inputs, s.outputs):
        raise SortMismatch(t, s, Sort(p, p), "left feedback wider than the body")
    m, n = s.inputs - p, s.outputs - p
    return Feed(Seq(Seq(Transp(m, p), t), Transp(p, n)), p)


def feedback_star(t: Term, env: SortEnv = None) -> Term:
    """Left feedback of width one, for t : 1+m -> 1+n"""
    return left_feed(t, 1, env)


def mu(t: Term, env: SortEnv = None) -> Term:
    """(t ; cp_m) fed back over m, for t : n+m -> m"""
    s = sort_of(t, env)
    m = s.outputs
    if s.inputs < m:
        raise SortMismatch(t, s, Sort(m, m), "mu needs at least as many inputs as outputs")
    return Feed(Seq(t, Copy(m)), m)


def _require(t: Term, env: SortEnv, expected: Sort, what: str) -> None:
    s = sort_of(t, env)
    if s != expected:
        raise SortMismatch(t, s, expected, f"{what} needs sort {expected}")


def star(t: Term, env: SortEnv = None) -> Term:
    """Unary star of a 1 -> 1 network"""
    _require(t, env, Sort(1, 1), "star")
    loop = Feed(Seq(Seq(EqTest(1), t), Copy(1)), 1)
    return Seq(Seq(Copy(1), Par(Id(1), loop)), EqTest(1))


def binary_star(t: Term, g: Term, env: SortEnv = None) -> Term:
    """Binary star t*g of two 1 -> 1 networks, looping through left feedback"""
    _require(t, env, Sort(1, 1), "binary star")
    _require(g, env, Sort(1, 1), "binary star")
    loop = left_feed(Seq(Seq(EqTest(1), t), Copy(1)), 1, env)
    return Seq(Seq(Seq(Copy(1), Par(Id(1), loop)), EqTest(1)), g)


def dagger(t: Term, env: SortEnv = None) -> Term:
    """Iteration of t : m -> m+n, merging the first m outputs back with eq_m"""
    s = sort_of(t, env)
    m = s.inputs
    if s.outputs < m:
        raise SortMismatch(t, s, Sort(m, m), "dagger needs sort m -> m+n")
    return left_feed(Seq(EqTest(m), t), m, env)


def ramification(k: int) -> Term:
    """1 -> k branching, from cp and sink via rmf_{k+1} = cp ; (rmf_k ++ I)"""
    _natural(k)
    if k == 0:
        return Sink(1)
    if k == 2:
        return Copy(1)
    return Seq(Copy(1), Par(ramification(k - 1), Id(1)))


def identification(k: int) -> Term:
    """k -> 1 merging, from eq and src via idf_{k+1} = (idf_k ++ I) ; eq"""
    _natural(k)
    if k == 0:
        return DummySource(1)
    if k == 2:
        return EqTest(1)
    return Seq(Par(identification(k - 1), Id(1)), EqTest(1))


# ---------------------------------------------------------------------------
# Netlists
# ---------------------------------------------------------------------------

ENV = -1


@dataclass(frozen=True)
class Endpoint:
    """A node port; node ENV stands for the external inputs/outputs"""
    node: int
    port: int


@dataclass
class Node:
    kind: str          # wire | cell | copy1 | sink1 | eq1 | source1
    label: str
    inputs: int
    outputs: int


@dataclass
class Netlist:
    """Primitive nodes joined by point-to-point channels"""
    sort: Sort
    nodes: List[Node] = field(default_factory=list)
    channels: List[Tuple[Endpoint, Endpoint]] = field(default_factory=list)

    def add(self, kind: str, label: str, inputs: int, outputs: int) -> int:
        self.nodes.append(Node(kind, label, inputs, outputs))
        return len(self.nodes) - 1

    def connect(self, src: Endpoint, dst: Endpoint) -> None:
        self.channels.append((src, dst))

    def count(self, kind: str) -> int:
        return sum(1 for node in self.nodes if node.kind == kind)


def flatten(t: Term, env: SortEnv = None) -> Netlist:
    """Lay out a term as a netlist of wires, cells and unary branching nodes"""
    net = Netlist(sort=sort_of(t, env))
    ins, outs = _lay_out(t, env, net)
    for i, slot in enumerate(ins):
        net.connect(Endpoint(ENV, i), slot)
    for j, slot in enumerate(outs):
        net.connect(slot, Endpoint(ENV, j))
    logger.debug(f"Flattened term into {len(net.nodes)} nodes, {len(net.channels)} channels")
    return net


def _wires(net: Netlist, n: int) -> List[int]:
    return [net.add("wire", "msd", 1, 1) for _ in range(n)]


def _lay_out(t: Term, env: SortEnv, net: Netlist) -> Tuple[List[Endpoint], List[Endpoint]]:
    match t:
        case Id(n):
            wires = _wires(net, n)
            return [Endpoint(w, 0) for w in wires], [Endpoint(w, 0) for w in wires]
        case Transp(m, n):
            wires = _wires(net, m + n)
            outs = [Endpoint(w, 0) for w in wires[m:]] + [Endpoint(w, 0) for w in wires[:m]]
            return [Endpoint(w, 0) for w in wires], outs
        case Copy(m):
            nodes = [net.add("copy1", "cp", 1, 2) for _ in range(m)]
            outs = [Endpoint(c, 0) for c in nodes] + [Endpoint(c, 1) for c in nodes]
            return [Endpoint(c, 0) for c in nodes], outs
        case EqTest(m):
            nodes = [net.add("eq1", "eq", 2, 1) for _ in range(m)]
            ins = [Endpoint(e, 0) for e in nodes] + [Endpoint(e, 1) for e in nodes]
            return ins, [Endpoint(e, 0) for e in nodes]
        case Sink(m):
            nodes = [net.add("sink1", "sink", 1, 0) for _ in range(m)]
            return [Endpoint(s, 0) for s in nodes], []
        case DummySource(m):
            nodes = [net.add("source1", "src", 0, 1) for _ in range(m)]
            return [], [Endpoint(s, 0) for s in nodes]
        case Cell(name):
            s = _cell_sort(name, env)
            c = net.add("cell", name, s.inputs, s.outputs)
            return [Endpoint(c, i) for i in range(s.inputs)], [Endpoint(c, j) for j in range(s.outputs)]
        case Par(left, right):
            li, lo = _lay_out(left, env, net)
            ri, ro = _lay_out(right, env, net)
            return li + ri, lo + ro
        case Seq(left, right):
            li, lo = _lay_out(left, env, net)
            ri, ro = _lay_out(right, env, net)
            for src, dst in zip(lo, ri):
                net.connect(src, dst)
            return li, ro
        case Feed(body, width):
            bi, bo = _lay_out(body, env, net)
            m, n = len(bi) - width, len(bo) - width
            # One wire per loop edge
            for k in range(width):
                w = net.add("wire", "msd", 1, 1)
                net.connect(bo[n + k], Endpoint(w, 0))
                net.connect(Endpoint(w, 0), bi[m + k])
            return bi[:m], bo[:n]
    raise TypeError(f"not a network term: {t!r}")
