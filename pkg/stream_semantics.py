#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Synchronous Stream Transformer Model
Tick-indexed evaluation of deterministic networks with direct-connection tracking and synchronous feedback
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from bna_core import (
    ENV,
    Cell,
    CellEnv,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    NetworkAlgebraError,
    Netlist,
    Par,
    Seq,
    Sink,
    Sort,
    Term,
    Transp,
    flatten,
    sort_of,
)
from bna_parser import TICK, Stream, pad, print_streams, print_term

logger = logging.getLogger(__name__)

_UNKNOWN = None


class SlotCollision(NetworkAlgebraError):
    """A second datum reached a cell input that is already filled in the current waiting period"""

    def __init__(self, tick: int, cell: str, port: int, partial: Tuple[Stream, ...] = ()):
        self.tick = tick
        self.cell = cell
        self.port = port
        self.partial = partial
        super().__init__(f"slot collision at tick {tick}: cell {cell} input {port + 1} is already filled")


@dataclass(frozen=True)
class Observation:
    """Output prefixes, cut at the collision tick if the run collided"""
    streams: Tuple[Stream, ...]
    collision: Optional[int] = None

    def prefix(self, length: int) -> "Observation":
        if self.collision is not None and self.collision < length:
            return self
        return Observation(tuple(s[:length] for s in self.streams), None)

    def describe(self) -> str:
        text = print_streams(self.streams) or "(no output ports)"
        if self.collision is not None:
            text += f"\n(slot collision at tick {self.collision})"
        return text


# ---------------------------------------------------------------------------
# Direct connections
# ---------------------------------------------------------------------------

def _dc(t: Term, env) -> FrozenSet[Tuple[int, int]]:
    match t:
        case Id(n):
            return frozenset((i, i) for i in range(n))
        case Transp(m, n):
            return frozenset([(i, n + i) for i in range(m)] + [(m + j, j) for j in range(n)])
        case Copy(m):
            return frozenset([(i, i) for i in range(m)] + [(i, m + i) for i in range(m)])
        case Sink() | EqTest() | DummySource() | Cell():
            return frozenset()
        case Par(left, right):
            a = sort_of(left, env)
            return _dc(left, env) | frozenset((i + a.inputs, j + a.outputs) for i, j in _dc(right, env))
        case Seq(left, right):
            first, second = _dc(left, env), _dc(right, env)
            return frozenset((i, k) for i, j in first for j2, k in second if j == j2)
        case Feed(body, width):
            s = sort_of(body, env)
            m, n = s.inputs - width, s.outputs - width
            source = {j: i for i, j in _dc(body, env)}
            pairs = set()
            for j in range(n):
                i, seen = source.get(j), set()
                # Fed-back inputs take the source of their loop output; a closed loop carries ticks
                while i is not None and i >= m and i not in seen:
                    seen.add(i)
                    i = source.get(n + i - m)
                if i is not None and i < m:
                    pairs.add((i, j))
            return frozenset(pairs)
    raise TypeError(f"not a network term: {t!r}")


def direct_connections(t: Term, env=None) -> FrozenSet[Tuple[int, int]]:
    """Syntactic dc set with 1-based (input, output) port numbers"""
    return frozenset((i + 1, j + 1) for i, j in _dc(t, env))


def is_direct_connection(t: Term, env=None) -> bool:
    """Every input is directly connected to some output and every output to some input"""
    s = sort_of(t, env)
    dc = direct_connections(t, env)
    return ({i for i, _ in dc} == set(range(1, s.inputs + 1))
            and {j for _, j in dc} == set(range(1, s.outputs + 1)))


# ---------------------------------------------------------------------------
# Machines
# ---------------------------------------------------------------------------

@dataclass
class _CellState:
    emit_now: bool
    outputs: Tuple[str, ...]
    slots: List[Optional[str]]


@dataclass
class Machine:
    """Compiled network: netlist, dc set and per-cell timing state"""
    sort: Sort
    dc: FrozenSet[Tuple[int, int]]
    netlist: Netlist
    env: CellEnv
    states: Dict[int, _CellState] = field(default_factory=dict)
    tick: int = 0

    def __post_init__(self):
        net = self.netlist
        self._in_channel: Dict[Tuple[int, int], int] = {}
        self._out_channel: Dict[Tuple[int, int], int] = {}
        for index, (src, dst) in enumerate(net.channels):
            self._out_channel[(src.node, src.port)] = index
            self._in_channel[(dst.node, dst.port)] = index
        if not self.states:
            self.reset()

    def reset(self) -> None:
        self.tick = 0
        self.states = {}
        for index, node in enumerate(self.netlist.nodes):
            if node.kind == "cell":
                cell = self.env.lookup(node.label)
                self.states[index] = _CellState(True, cell.init, [None] * node.inputs)

    def clone(self) -> "Machine":
        return Machine(self.sort, self.dc, self.netlist, self.env)

    def step(self, inputs: Sequence[str]) -> Tuple[str, ...]:
        """Advance one tick; returns the output data of this tick"""
        net = self.netlist
        values: List[Optional[str]] = [_UNKNOWN] * len(net.channels)
        for i, datum in enumerate(inputs):
            values[self._out_channel[(ENV, i)]] = datum

        # (1) cells and sources contribute without looking at this tick's inputs
        for index, node in enumerate(net.nodes):
            if node.kind == "cell":
                state = self.states[index]
                for j in range(node.outputs):
                    values[self._out_channel[(index, j)]] = state.outputs[j] if state.emit_now else TICK
                state.emit_now = False
            elif node.kind == "source1":
                values[self._out_channel[(index, 0)]] = TICK

        # (2) instantaneous propagation to a fixed point
        changed = True
        while changed:
            changed = False
            for index, node in enumerate(net.nodes):
                if node.kind in ("wire", "copy1"):
                    datum = values[self._in_channel[(index, 0)]]
                    if datum is _UNKNOWN:
                        continue
                    for j in range(node.outputs):
                        out = self._out_channel[(index, j)]
                        if values[out] is _UNKNOWN:
                            values[out] = datum
                            changed = True
                elif node.kind == "eq1":
                    out = self._out_channel[(index, 0)]
                    if values[out] is not _UNKNOWN:
                        continue
                    a = values[self._in_channel[(index, 0)]]
                    b = values[self._in_channel[(index, 1)]]
                    if a is not _UNKNOWN and b is not _UNKNOWN:
                        values[out] = a if a == b else TICK
                        changed = True
        # Whatever is still unknown sits on, or behind, a cell-free cycle
        values = [TICK if v is _UNKNOWN else v for v in values]

        # (3) cells consume arrived data and restart when complete
        for index, state in self.states.items():
            node = net.nodes[index]
            for j in range(node.inputs):
                datum = values[self._in_channel[(index, j)]]
                if datum == TICK:
                    continue
                if state.slots[j] is not None:
                    raise SlotCollision(self.tick, node.label, j)
                state.slots[j] = datum
            if all(slot is not None for slot in state.slots):
                state.outputs = self.env.lookup(node.label).apply(tuple(state.slots))
                state.emit_now = True
                state.slots = [None] * node.inputs

        self.tick += 1
        return tuple(values[self._in_channel[(ENV, j)]] for j in range(self.sort.outputs))

    def run(self, inputs: Sequence[Stream], horizon: int) -> List[Stream]:
        columns: List[Tuple[str, ...]] = []
        streams = [pad(s, horizon) for s in inputs]
        for k in range(horizon):
            try:
                columns.append(self.step([s[k] for s in streams]))
            except SlotCollision as e:
                e.partial = _transpose(columns, self.sort.outputs)
                raise
        return list(_transpose(columns, self.sort.outputs))


def _transpose(columns: List[Tuple[str, ...]], width: int) -> Tuple[Stream, ...]:
    return tuple(tuple(column[j] for column in columns) for j in range(width))


def compile(t: Term, env: CellEnv) -> Machine:
    """Compile a term into a fresh machine at tick 0"""
    s = sort_of(t, env)
    net = flatten(t, env)
    return Machine(sort=s, dc=direct_connections(t, env), netlist=net, env=env)


def eval_prefix(t: Term, env: CellEnv, inputs: Sequence[Stream], horizon: int) -> List[Stream]:
    """Output prefixes of length `horizon`; missing input positions are ticks"""
    machine = compile(t, env)
    if len(inputs) != machine.sort.inputs:
        raise ValueError(f"term has {machine.sort.inputs} inputs, got {len(inputs)} streams")
    return machine.run(inputs, horizon)


def observe(t: Term, env: CellEnv, inputs: Sequence[Stream], horizon: int) -> Observation:
    """eval_prefix with a slot collision turned into an observable outcome"""
    try:
        return Observation(tuple(eval_prefix(t, env, inputs, horizon)))
    except SlotCollision as e:
        return Observation(e.partial, e.tick)


# ---------------------------------------------------------------------------
# Sampling checks
# ---------------------------------------------------------------------------

def random_streams(rng: np.random.Generator, m: int, horizon: int, domain: Sequence[str],
                   tick_rate: float = 0.25) -> List[Stream]:
    """m random streams; each position is a tick with probability tick_rate"""
    streams = []
    for _ in range(m):
        picks = rng.integers(0, len(domain), size=horizon)
        ticks = rng.random(horizon) < tick_rate
        streams.append(tuple(TICK if ticks[k] else domain[picks[k]] for k in range(horizon)))
    return streams


class PropertyReport(BaseModel):
    """Outcome of a sampling check, with a counterexample when it fails"""
    holds: bool
    trials: int
    seed: int
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.holds


def is_proper(t: Term, env: CellEnv, trials: int = 50, horizon: int = 16, seed: int = 0) -> PropertyReport:
    """Randomized check that the network is determined by the past"""
    rng = np.random.default_rng(seed)
    s = sort_of(t, env)
    first: Optional[Tuple[List[Stream], Observation]] = None
    for trial in range(trials):
        x = random_streams(rng, s.inputs, horizon, env.domain)
        seen = observe(t, env, x, horizon)

        head = seen.prefix(1)
        if first is None:
            first = (x, head)
        elif head != first[1]:
            witness = (f"tick 0 output differs:\ninputs\n{print_streams(first[0])}\ngive\n{first[1].describe()}\n"
                       f"inputs\n{print_streams(x)}\ngive\n{head.describe()}")
            logger.debug(f"❌ {print_term(t)} is not proper: {witness}")
            return PropertyReport(holds=False, trials=trial + 1, seed=seed, witness=witness)

        if horizon < 2:
            continue
        k = int(rng.integers(0, horizon - 1))
        tail = random_streams(rng, s.inputs, horizon, env.domain)
        x2 = [a[:k + 1] + b[k + 1:] for a, b in zip(x, tail)]
        other = observe(t, env, x2, horizon)
        if seen.prefix(k + 2) != other.prefix(k + 2):
            witness = (f"inputs agree up to tick {k} but outputs differ by tick {k + 1}:\n"
                       f"{print_streams(x)}\nvs\n{print_streams(x2)}")
            return PropertyReport(holds=False, trials=trial + 1, seed=seed, witness=witness)
    return PropertyReport(holds=True, trials=trials, seed=seed)


def check_dc_soundness(t: Term, env: CellEnv, trials: int = 50, horizon: int = 16, seed: int = 0) -> PropertyReport:
    """Sample inputs and confirm every dc pair copies its input stream to its output stream"""
    rng = np.random.default_rng(seed)
    s = sort_of(t, env)
    dc = direct_connections(t, env)
    for trial in range(trials):
        x = random_streams(rng, s.inputs, horizon, env.domain)
        seen = observe(t, env, x, horizon)
        cut = horizon if seen.collision is None else seen.collision
        for i, j in sorted(dc):
            if seen.streams[j - 1][:cut] != x[i - 1][:cut]:
                witness = f"port {i} -> {j}:\n{print_streams(x)}\ngives\n{seen.describe()}"
                return PropertyReport(holds=False, trials=trial + 1, seed=seed, witness=witness)
    return PropertyReport(holds=True, trials=trials, seed=seed)
