#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Algebra Parser
Text syntax for terms, cell environment documents and stream files, with a round-trip printer
"""

from __future__ import annotations

import json
import logging
import re
import sys
from typing import Dict, List, Sequence, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator

from bna_core import (
    BadArity,
    Cell,
    CellDef,
    CellEnv,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    NetworkAlgebraError,
    NondeterministicCell,
    Par,
    Seq,
    Sink,
    Sort,
    Term,
    Transp,
    check_cell_def,
)

logger = logging.getLogger(__name__)

TICK = "~"
Stream = Tuple[str, ...]

# Largest count accepted for a port number or block width
MAX_NATURAL = sys.maxsize

# Surface names of the constants; the first item is the arity of the call
CONSTANTS = {
    "I": (1, Id),
    "X": (2, Transp),
    "cp": (1, Copy),
    "sink": (1, Sink),
    "eq": (1, EqTest),
    "src": (1, DummySource),
}

_TOKEN = re.compile(r"\s*(?:(?P<nat>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\+\+|[;^(),]))")


class NetworkSyntaxError(NetworkAlgebraError):
    """Malformed term or stream text; offset is a byte offset into the UTF-8 text"""

    def __init__(self, message: str, text: str, position: int):
        self.offset = len(text[:position].encode("utf-8"))
        super().__init__(f"{message} at byte {self.offset}")


class NatOverflow(NetworkAlgebraError):
    def __init__(self, digits: str, offset: int):
        self.offset = offset
        super().__init__(f"count {digits} at byte {offset} exceeds {MAX_NATURAL}")


class EnvironmentFormatError(NetworkAlgebraError):
    """The environment document is not valid JSON of the expected shape"""


class UnknownSymbol(NetworkAlgebraError):
    def __init__(self, token: str, port: int):
        self.token = token
        self.port = port
        super().__init__(f"stream token {token!r} on port {port} is neither a datum nor '{TICK}'")


class DuplicatePort(NetworkAlgebraError):
    def __init__(self, port: int):
        self.port = port
        super().__init__(f"port {port} is declared twice")


class PortOutOfRange(NetworkAlgebraError):
    def __init__(self, port: int, m: int):
        self.port = port
        super().__init__(f"port {port} is outside 1..{m}")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class _TermReader:
    """Recursive-descent reader: `++` loosest, then `;`, then postfix `^n`"""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if match is None:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise NetworkSyntaxError(f"unexpected character {text[start]!r}", text, start)
            kind = match.lastgroup
            start = match.start(kind)
            self.tokens.append((kind, match.group(kind), start))
            pos = match.end()
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("end", "", len(self.text))

    def take(self, value: str = None) -> Tuple[str, str, int]:
        token = self.peek()
        if value is not None and token[1] != value:
            found = "end of input" if token[0] == "end" else repr(token[1])
            raise NetworkSyntaxError(f"expected {value!r}, found {found}", self.text, token[2])
        self.index += 1
        return token

    def natural(self) -> int:
        kind, value, pos = self.take()
        if kind != "nat":
            raise NetworkSyntaxError("expected a natural number", self.text, pos)
        digits = value.lstrip("0") or "0"
        if len(digits) > len(str(MAX_NATURAL)) or int(digits) > MAX_NATURAL:
            raise NatOverflow(value, len(self.text[:pos].encode("utf-8")))
        return int(digits)

    def expression(self) -> Term:
        term = self.sequence()
        while self.peek()[1] == "++":
            self.take()
            term = Par(term, self.sequence())
        return term

    def sequence(self) -> Term:
        term = self.postfix()
        while self.peek()[1] == ";":
            self.take()
            term = Seq(term, self.postfix())
        return term

    def postfix(self) -> Term:
        term = self.atom()
        while self.peek()[1] == "^":
            self.take()
            term = Feed(term, self.natural())
        return term

    def atom(self) -> Term:
        kind, value, pos = self.peek()
        if value == "(" and kind == "op":
            self.take()
            term = self.expression()
            self.take(")")
            return term
        if kind == "ident":
            self.take()
            if value in CONSTANTS and self.peek()[1] == "(":
                arity, constructor = CONSTANTS[value]
                self.take("(")
                args = [self.natural()]
                for _ in range(arity - 1):
                    self.take(",")
                    args.append(self.natural())
                self.take(")")
                return constructor(*args)
            return Cell(value)
        found = "end of input" if kind == "end" else repr(value)
        raise NetworkSyntaxError(f"expected a network, found {found}", self.text, pos)


def parse_term(text: str) -> Term:
    """Parse a term in the ASCII network syntax"""
    reader = _TermReader(text)
    term = reader.expression()
    kind, value, pos = reader.peek()
    if kind != "end":
        raise NetworkSyntaxError(f"unexpected {value!r}", text, pos)
    return term


_PAR, _SEQ, _POSTFIX = 0, 1, 2


def print_term(t: Term) -> str:
    """Print a term with the fewest parentheses that still parse back to it"""
    return _print(t, _PAR)


def _print(t: Term, level: int) -> str:
    match t:
        case Par(left, right):
            text = f"{_print(left, _PAR)} ++ {_print(right, _SEQ)}"
            return f"({text})" if level > _PAR else text
        case Seq(left, right):
            text = f"{_print(left, _SEQ)} ; {_print(right, _POSTFIX)}"
            return f"({text})" if level > _SEQ else text
        case Feed(body, width):
            return f"{_print(body, _POSTFIX)} ^ {width}"
        case Id(n):
            return f"I({n})"
        case Transp(m, n):
            return f"X({m},{n})"
        case Copy(m):
            return f"cp({m})"
        case Sink(m):
            return f"sink({m})"
        case EqTest(m):
            return f"eq({m})"
        case DummySource(m):
            return f"src({m})"
        case Cell(name):
            return name
    raise TypeError(f"not a network term: {t!r}")


def format_sort(sort: Sort) -> str:
    return f"{sort.inputs} -> {sort.outputs}"


# ---------------------------------------------------------------------------
# Environment documents
# ---------------------------------------------------------------------------

class CellDocument(BaseModel):
    """One cell entry of an environment file"""
    arity: List[int]
    init: List[str]
    table: Dict[str, Union[List[str], List[List[str]]]]


class EnvDocument(BaseModel):
    """Environment file: data domain plus cell tables"""
    domain: List[str]
    cells: Dict[str, CellDocument] = {}

    @field_validator("domain")
    @classmethod
    def symbols_are_tokens(cls, domain: List[str]) -> List[str]:
        for symbol in domain:
            if not symbol or symbol == TICK or "," in symbol or any(c.isspace() for c in symbol):
                raise ValueError(f"domain symbol {symbol!r} cannot be used as a stream token")
        if len(set(domain)) != len(domain):
            raise ValueError("domain symbols must be distinct")
        return domain


def parse_env(text: str) -> CellEnv:
    """Read a JSON environment document and check every cell table for totality"""
    try:
        document = EnvDocument.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise EnvironmentFormatError(f"environment is not valid JSON: {e}")
    except ValidationError as e:
        raise EnvironmentFormatError(f"environment has the wrong shape: {e}")

    domain = tuple(document.domain)
    cells = {}
    for name, entry in document.cells.items():
        if len(entry.arity) != 2 or min(entry.arity) < 0:
            raise BadArity(f"cell {name!r} arity must be [inputs, outputs], got {entry.arity}")
        sort = Sort(entry.arity[0], entry.arity[1])
        table = {}
        for key, result in entry.table.items():
            row = tuple(key.split(",")) if key != "" else ()
            if result and isinstance(result[0], list):
                # A list of alternatives is accepted only when it has one entry
                if len(result) != 1:
                    raise NondeterministicCell(name, row)
                result = result[0]
            table[row] = tuple(result)
        cell = CellDef(name=name, sort=sort, table=table, init=tuple(entry.init))
        check_cell_def(cell, domain)
        cells[name] = cell

    try:
        env = CellEnv(domain=domain, cells=cells)
    except ValidationError as e:
        raise EnvironmentFormatError(f"environment is not usable: {e}")
    logger.debug(f"Loaded environment with {len(cells)} cells over {len(domain)} symbols")
    return env


def env_to_json(env: CellEnv) -> str:
    """Serialize an environment back into the document format"""
    document = {
        "domain": list(env.domain),
        "cells": {
            name: {
                "arity": [cell.sort.inputs, cell.sort.outputs],
                "init": list(cell.init),
                "table": {",".join(row): list(result) for row, result in cell.table.items()},
            }
            for name, cell in env.cells.items()
        },
    }
    return json.dumps(document, indent=2)


# ---------------------------------------------------------------------------
# Stream files
# ---------------------------------------------------------------------------

def pad(stream: Sequence[str], horizon: int) -> Stream:
    """Truncate or extend a stream prefix with ticks to exactly `horizon` entries"""
    prefix = tuple(stream[:horizon])
    return prefix + (TICK,) * (horizon - len(prefix))


def parse_streams(text: str, m: int, horizon: int, domain: Sequence[str]) -> List[Stream]:
    """Read `port: token*` lines into m streams of length horizon"""
    symbols = set(domain)
    declared: Dict[int, List[str]] = {}
    offset = 0
    for line in text.splitlines(keepends=True):
        content = line.strip()
        if content and not content.startswith("#"):
            head, sep, rest = content.partition(":")
            if not sep or not (head.strip().isascii() and head.strip().isdigit()):
                raise NetworkSyntaxError("expected `port: tokens`", text, offset + line.index(content[0]))
            port = int(head.strip())
            if not 1 <= port <= m:
                raise PortOutOfRange(port, m)
            if port in declared:
                raise DuplicatePort(port)
            tokens = rest.split()
            for token in tokens:
                if token != TICK and token not in symbols:
                    raise UnknownSymbol(token, port)
            declared[port] = tokens
        offset += len(line)
    return [pad(declared.get(port, []), horizon) for port in range(1, m + 1)]


def print_streams(streams: Sequence[Stream]) -> str:
    """Stream-file text, one `port: tokens` line per stream"""
    lines = []
    for port, stream in enumerate(streams, start=1):
        body = " ".join(stream)
        lines.append(f"{port}: {body}" if body else f"{port}:")
    return "\n".join(lines)
