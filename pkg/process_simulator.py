#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Process Network Simulator
Discrete-event simulation of wire, cell and branching processes exchanging data within time slices
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from bna_core import (
    ENV,
    CellEnv,
    Id,
    NetworkAlgebraError,
    Netlist,
    Seq,
    Sort,
    Term,
    flatten,
    sort_of,
)
from bna_parser import TICK, Stream, pad, print_streams, print_term
from stream_semantics import Observation, PropertyReport, SlotCollision, random_streams

logger = logging.getLogger(__name__)

SCHEDULERS = ("fifo", "lifo", "random")
EQ_VARIANTS = ("faithful", "simple")


class CapacityViolation(NetworkAlgebraError):
    """A channel was offered a second datum in one slice"""

    def __init__(self, slice_: int, channel: int):
        self.slice = slice_
        self.channel = channel
        super().__init__(f"channel {channel} received two data in slice {slice_}")


@dataclass(frozen=True)
class Event:
    slice: int
    kind: str          # send | read | commit
    channel: int
    datum: str


@dataclass
class ProcessNet:
    """Process instances over a netlist; one channel buffer per netlist channel"""
    sort: Sort
    netlist: Netlist
    env: CellEnv
    eq_variant: str = "faithful"
    slice: int = 0
    buffers: List[Optional[str]] = field(default_factory=list)
    # Per cell: [restart flag, output tuple, slots]; per eq: latched pair
    cells: Dict[int, list] = field(default_factory=dict)
    latches: Dict[int, List[Optional[str]]] = field(default_factory=dict)

    def __post_init__(self):
        self.into: Dict[Tuple[int, int], int] = {}
        self.outof: Dict[Tuple[int, int], int] = {}
        for index, (src, dst) in enumerate(self.netlist.channels):
            self.outof[(src.node, src.port)] = index
            self.into[(dst.node, dst.port)] = index
        self.reset()

    def reset(self) -> None:
        self.slice = 0
        self.buffers = [None] * len(self.netlist.channels)
        self.cells, self.latches = {}, {}
        for index, node in enumerate(self.netlist.nodes):
            if node.kind == "cell":
                self.cells[index] = [True, self.env.lookup(node.label).init, [None] * node.inputs]
            elif node.kind == "eq1":
                self.latches[index] = [None, None]


def instantiate(t: Term, env: CellEnv, eq_variant: str = "faithful") -> ProcessNet:
    """One msd process per wire and loop edge, one process per constant and cell"""
    if eq_variant not in EQ_VARIANTS:
        raise ValueError(f"unknown equality test variant {eq_variant!r}")
    net = flatten(t, env)
    for node in net.nodes:
        if node.kind == "cell":
            env.lookup(node.label)
    logger.debug(f"Instantiated {len(net.nodes)} processes ({net.count('wire')} msd)")
    return ProcessNet(sort=sort_of(t, env), netlist=net, env=env, eq_variant=eq_variant)


class _Slice:
    """Ready-queue execution of one time slice"""

    def __init__(self, net: ProcessNet, scheduler: str, rng: np.random.Generator,
                 log: List[Event], outputs: List[str]):
        self.net = net
        self.scheduler = scheduler
        self.rng = rng
        self.log = log
        self.outputs = outputs
        self.ready: deque = deque()
        self.sent: set = set()
        self.completed: set = set()

    def send(self, channel: int, datum: str) -> None:
        net = self.net
        if channel in self.sent:
            raise CapacityViolation(net.slice, channel)
        if net.buffers[channel] is not None:
            # The previous datum was never read: its slot is still filled
            dst = net.netlist.channels[channel][1]
            raise SlotCollision(net.slice, net.netlist.nodes[dst.node].label, dst.port)
        self.sent.add(channel)
        net.buffers[channel] = datum
        self.log.append(Event(net.slice, "send", channel, datum))
        self.ready.append(channel)

    def read(self, channel: int) -> str:
        datum = self.net.buffers[channel]
        self.net.buffers[channel] = None
        self.log.append(Event(self.net.slice, "read", channel, datum))
        return datum

    def pick(self) -> int:
        if self.scheduler == "fifo":
            return self.ready.popleft()
        if self.scheduler == "lifo":
            return self.ready.pop()
        k = int(self.rng.integers(0, len(self.ready)))
        self.ready.rotate(-k)
        return self.ready.popleft()

    def deliver(self, channel: int) -> None:
        net = self.net
        dst = net.netlist.channels[channel][1]
        if dst.node == ENV:
            self.outputs[dst.port] = self.read(channel)
            return
        node = net.netlist.nodes[dst.node]
        out = net.outof
        if node.kind == "wire":
            self.send(out[(dst.node, 0)], self.read(channel))
        elif node.kind == "copy1":
            datum = self.read(channel)
            self.send(out[(dst.node, 0)], datum)
            self.send(out[(dst.node, 1)], datum)
        elif node.kind == "sink1":
            self.read(channel)
        elif node.kind == "eq1":
            latch = net.latches[dst.node]
            if latch[dst.port] is not None:
                return
            latch[dst.port] = self.read(channel)
            if latch[0] is not None and latch[1] is not None:
                if latch[0] == latch[1]:
                    self.send(out[(dst.node, 0)], latch[0])
                net.latches[dst.node] = [None, None]
        elif node.kind == "cell":
            state = net.cells[dst.node]
            if dst.node in self.completed or state[2][dst.port] is not None:
                return
            state[2][dst.port] = self.read(channel)
            if all(slot is not None for slot in state[2]):
                self.commit(dst.node)

    def commit(self, index: int) -> None:
        state = self.net.cells[index]
        node = self.net.netlist.nodes[index]
        consumed = tuple(state[2])
        state[1] = self.net.env.lookup(node.label).apply(consumed)
        state[0] = True
        state[2] = [None] * node.inputs
        self.completed.add(index)
        self.log.append(Event(self.net.slice, "commit", -1, ",".join(consumed)))

    def run(self, inputs: Sequence[str]) -> None:
        net = self.net
        for index, state in net.cells.items():
            if state[0]:
                state[0] = False
                for j, datum in enumerate(state[1]):
                    self.send(net.outof[(index, j)], datum)
        for i, datum in enumerate(inputs):
            if datum != TICK:
                self.send(net.outof[(ENV, i)], datum)

        while self.ready:
            self.deliver(self.pick())

        for index, node in enumerate(net.netlist.nodes):
            if node.kind == "cell" and node.inputs == 0:
                self.commit(index)
        for channel, datum in enumerate(net.buffers):
            if datum is not None:
                dst = net.netlist.channels[channel][1]
                raise SlotCollision(net.slice, net.netlist.nodes[dst.node].label, dst.port)
        if net.eq_variant == "faithful":
            # A lone datum at an equality test is abandoned at the end of the slice
            for index in net.latches:
                net.latches[index] = [None, None]


def run(net: ProcessNet, inputs: Sequence[Stream], horizon: int, scheduler: str = "fifo",
        seed: int = 0) -> Tuple[List[Stream], List[Event]]:
    """Simulate `horizon` slices; returns the output streams and the event log"""
    if scheduler not in SCHEDULERS:
        raise ValueError(f"unknown scheduler {scheduler!r}; choose one of {', '.join(SCHEDULERS)}")
    if len(inputs) != net.sort.inputs:
        raise ValueError(f"net has {net.sort.inputs} inputs, got {len(inputs)} streams")
    rng = np.random.default_rng(seed)
    streams = [pad(s, horizon) for s in inputs]
    columns: List[Tuple[str, ...]] = []
    log: List[Event] = []
    net.reset()
    for k in range(horizon):
        outputs = [TICK] * net.sort.outputs
        try:
            _Slice(net, scheduler, rng, log, outputs).run([s[k] for s in streams])
        except SlotCollision as e:
            e.partial = tuple(tuple(c[j] for c in columns) for j in range(net.sort.outputs))
            e.log = log
            raise
        columns.append(tuple(outputs))
        net.slice += 1
    return [tuple(c[j] for c in columns) for j in range(net.sort.outputs)], log


def observe(t: Term, env: CellEnv, inputs: Sequence[Stream], horizon: int, scheduler: str = "fifo",
            seed: int = 0, eq_variant: str = "faithful") -> Observation:
    """Simulation outcome with a slot collision turned into an observable"""
    net = instantiate(t, env, eq_variant)
    try:
        streams, _ = run(net, inputs, horizon, scheduler, seed)
        return Observation(tuple(streams))
    except SlotCollision as e:
        return Observation(e.partial, e.tick)


def format_event_log(events: Sequence[Event]) -> str:
    """One `slice<TAB>kind<TAB>channel<TAB>datum` line per event"""
    return "\n".join(f"{e.slice}\t{e.kind}\t{e.channel}\t{e.datum}" for e in events)


def check_capacity(events: Sequence[Event]) -> bool:
    """No channel carries two data in one slice"""
    seen = set()
    for e in events:
        if e.kind != "send":
            continue
        if (e.slice, e.channel) in seen:
            return False
        seen.add((e.slice, e.channel))
    return True


def check_wire_identity(f: Term, env: CellEnv, horizon: int = 16, trials: int = 20, seed: int = 0) -> PropertyReport:
    """Compare I_m ; f, f and f ; I_n on sampled inputs"""
    s = sort_of(f, env)
    variants = [Seq(Id(s.inputs), f), f, Seq(f, Id(s.outputs))]
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        x = random_streams(rng, s.inputs, horizon, env.domain)
        seen = [observe(v, env, x, horizon) for v in variants]
        if not (seen[0] == seen[1] == seen[2]):
            witness = (f"{print_term(f)} on\n{print_streams(x)}\n"
                       + "\n".join(f"{print_term(v)} gives\n{o.describe()}" for v, o in zip(variants, seen)))
            logger.error(f"❌ Wire identity fails for {print_term(f)}")
            return PropertyReport(holds=False, trials=trial + 1, seed=seed, witness=witness)
    return PropertyReport(holds=True, trials=trials, seed=seed)
