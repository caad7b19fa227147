#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Data Transformer Model
Finite relations over S^m x S^n with the five network algebra operations, stored as boolean matrices
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Mapping, Sequence, Tuple

import numpy as np

from bna_core import (
    BRANCHING,
    Cell,
    Feed,
    Id,
    NetworkAlgebraError,
    Par,
    Seq,
    Sort,
    SortMismatch,
    Term,
    Transp,
    UnboundCell,
    sort_of,
)

logger = logging.getLogger(__name__)


class UnsupportedConstant(NetworkAlgebraError):
    def __init__(self, term: Term):
        self.term = term
        super().__init__(f"{type(term).__name__} has no interpretation in the relation model")


@dataclass(frozen=True, eq=False)
class FinRel:
    """Relation f subset of S^m x S^n; row = rank of the input tuple, column = rank of the output tuple"""
    sort: Sort
    carrier: Tuple[str, ...]
    matrix: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinRel):
            return NotImplemented
        return (self.sort == other.sort and self.carrier == other.carrier
                and np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    @property
    def pairs(self) -> FrozenSet[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
        rows, cols = np.nonzero(self.matrix)
        return frozenset(
            (_unrank(int(r), self.sort.inputs, self.carrier), _unrank(int(c), self.sort.outputs, self.carrier))
            for r, c in zip(rows, cols)
        )

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def issubset(self, other: "FinRel") -> bool:
        return bool(np.all(other.matrix[self.matrix]))


def _unrank(index: int, width: int, carrier: Sequence[str]) -> Tuple[str, ...]:
    size = len(carrier)
    digits = []
    for _ in range(width):
        index, digit = divmod(index, size)
        digits.append(carrier[digit])
    return tuple(reversed(digits))


def _rank(values: Sequence[str], carrier: Sequence[str]) -> int:
    index = 0
    for value in values:
        index = index * len(carrier) + carrier.index(value)
    return index


def from_pairs(sort: Sort, carrier: Sequence[str], pairs) -> FinRel:
    carrier = tuple(carrier)
    size = len(carrier)
    matrix = np.zeros((size ** sort.inputs, size ** sort.outputs), dtype=bool)
    for x, y in pairs:
        if len(x) != sort.inputs or len(y) != sort.outputs:
            raise ValueError(f"pair {x} -> {y} does not fit sort {sort}")
        matrix[_rank(x, carrier), _rank(y, carrier)] = True
    return FinRel(sort, carrier, matrix)


def identity(n: int, carrier: Sequence[str]) -> FinRel:
    return FinRel(Sort(n, n), tuple(carrier), np.eye(len(carrier) ** n, dtype=bool))


def transposition(m: int, n: int, carrier: Sequence[str]) -> FinRel:
    """{(x ++ y, y ++ x)}"""
    size = len(carrier)
    a = np.arange(size ** m)[:, None]
    b = np.arange(size ** n)[None, :]
    matrix = np.zeros((size ** (m + n), size ** (m + n)), dtype=bool)
    matrix[(a * size ** n + b).ravel(), (b * size ** m + a).ravel()] = True
    return FinRel(Sort(m + n, n + m), tuple(carrier), matrix)


def parallel(f: FinRel, g: FinRel) -> FinRel:
    return FinRel(
        Sort(f.sort.inputs + g.sort.inputs, f.sort.outputs + g.sort.outputs),
        f.carrier,
        np.kron(f.matrix, g.matrix).astype(bool),
    )


def sequential(f: FinRel, g: FinRel) -> FinRel:
    """{(x, y) | exists z: (x, z) in f and (z, y) in g}"""
    product_ = f.matrix.astype(np.int64) @ g.matrix.astype(np.int64)
    return FinRel(Sort(f.sort.inputs, g.sort.outputs), f.carrier, product_ > 0)


def feedback(f: FinRel, p: int) -> FinRel:
    """{(x, y) | exists z in S^p: (x ++ z, y ++ z) in f}"""
    size = len(f.carrier)
    m, n = f.sort.inputs - p, f.sort.outputs - p
    loop = size ** p
    blocks = f.matrix.reshape(size ** m, loop, size ** n, loop).astype(np.int64)
    return FinRel(Sort(m, n), f.carrier, np.einsum("azbz->ab", blocks) > 0)


def eval_rel(t: Term, env: Mapping[str, FinRel], carrier: Sequence[str]) -> FinRel:
    """Evaluate a BNA term over finite relations, literally by the set-theoretic clauses"""
    carrier = tuple(carrier)
    sort_of(t, {name: rel.sort for name, rel in env.items()})
    return _eval(t, env, carrier)


def _eval(t: Term, env: Mapping[str, FinRel], carrier: Tuple[str, ...]) -> FinRel:
    match t:
        case Par(left, right):
            return parallel(_eval(left, env, carrier), _eval(right, env, carrier))
        case Seq(left, right):
            return sequential(_eval(left, env, carrier), _eval(right, env, carrier))
        case Feed(body, width):
            return feedback(_eval(body, env, carrier), width)
        case Id(n):
            return identity(n, carrier)
        case Transp(m, n):
            return transposition(m, n, carrier)
        case Cell(name):
            if name not in env:
                raise UnboundCell(name)
            rel = env[name]
            if rel.carrier != carrier:
                raise SortMismatch(t, rel.sort, rel.sort, f"cell {name} is over a different carrier")
            return rel
    if isinstance(t, BRANCHING):
        raise UnsupportedConstant(t)
    raise TypeError(f"not a network term: {t!r}")


def random_rel(sort: Sort, carrier: Sequence[str], density: float, seed) -> FinRel:
    """Each pair included independently with probability `density`; same seed, same relation"""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    size = len(carrier)
    matrix = rng.random((size ** sort.inputs, size ** sort.outputs)) < density
    return FinRel(sort, tuple(carrier), matrix)


def feedback_by_enumeration(f: FinRel, p: int) -> FinRel:
    """Reference feedback that enumerates z over S^p explicitly"""
    m, n = f.sort.inputs - p, f.sort.outputs - p
    pairs = f.pairs
    result = set()
    for x, y in product(product(f.carrier, repeat=m), product(f.carrier, repeat=n)):
        if any((x + z, y + z) in pairs for z in product(f.carrier, repeat=p)):
            result.add((x, y))
    return from_pairs(Sort(m, n), f.carrier, result)
