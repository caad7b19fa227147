#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Algebra Axiom Harness
Axiom catalog for networks and flowcharts, random instantiation, and checks against every model
"""

from __future__ import annotations

import logging
import re
from itertools import product
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from bna_config import DEFAULT_DOMAIN_SIZE, DEFAULT_TICKS, EXPERIMENT_NAME, MAX_OPS, MAX_PORTS, MLFLOW_TRACKING_URI
from bna_core import (
    Cell,
    CellDef,
    CellEnv,
    Copy,
    DummySource,
    EqTest,
    Feed,
    Id,
    NetworkAlgebraError,
    Par,
    Seq,
    Sink,
    Sort,
    SortMismatch,
    Term,
    Transp,
    sort_of,
    substitute,
)
from bna_parser import parse_term, print_streams, print_term
from normal_form import iso_equal, nf_to_term, to_normal_form
import process_simulator
import relation_model
import stream_semantics

logger = logging.getLogger(__name__)

MODELS = ("rel", "stream", "proc")

# Largest relation matrix side the relation model is asked to build
MAX_REL_ROWS = 4096

_INDEX = re.compile(r"(?<![A-Za-z0-9_])[klmnpq](?:\+[klmnpq0-9]+)*(?![A-Za-z0-9_])")


class Unsatisfiable(NetworkAlgebraError):
    def __init__(self, sort: Sort, budget: int):
        self.sort = sort
        self.budget = budget
        super().__init__(f"no term of sort {sort} fits in {budget} operators")


class Axiom(BaseModel):
    """A schematic equation; index variables k, l, m, n, p, q range over naturals"""
    name: str
    table: Literal[1, 2, 3]
    expected: Literal["holds", "fails-synchronously"]
    sides: Tuple[str, ...]
    metas: Dict[str, Tuple[str, str]] = {}
    minimum: int = 0
    # Instances always checked first: index values plus metavariables bound to fixed terms
    pinned: List[Tuple[Dict[str, int], Dict[str, str]]] = []

    @property
    def lhs(self) -> str:
        return self.sides[0]

    @property
    def rhs(self) -> str:
        return self.sides[-1]

    @property
    def variables(self) -> List[str]:
        found = set()
        for text in list(self.sides) + [e for pair in self.metas.values() for e in pair]:
            for match in _INDEX.finditer(text):
                found.update(v for v in match.group(0).split("+") if not v.isdigit())
        return sorted(found)

    def equation(self) -> str:
        return " = ".join(self.sides)

    def instantiate(self, values: Mapping[str, int]) -> Tuple[List[Term], Dict[str, Sort]]:
        """Parsed sides and metavariable sorts for concrete index values"""
        sides = [parse_term(_fill(text, values)) for text in self.sides]
        metas = {name: Sort(_evaluate(a, values), _evaluate(b, values)) for name, (a, b) in self.metas.items()}
        return sides, metas


def _evaluate(expression: str, values: Mapping[str, int]) -> int:
    return sum(int(part) if part.isdigit() else values[part] for part in expression.split("+"))


def _fill(text: str, values: Mapping[str, int]) -> str:
    return _INDEX.sub(lambda match: str(_evaluate(match.group(0), values)), text)


def _ax(name, table, sides, metas=None, expected="holds", minimum=0, pinned=None) -> Axiom:
    return Axiom(name=name, table=table, expected=expected, sides=tuple(sides),
                 metas=metas or {}, minimum=minimum, pinned=pinned or [])


_FEED_SWAP = "((I(m) ++ cp(m)) ; (X(m,m) ++ I(m)) ; (I(m) ++ eq(m))) ^ m"
_SRC_INTO_EQ = "(src(m) ++ I(m)) ; eq(m)"


def axiom_catalog() -> List[Axiom]:
    """Network axioms, the synchronous flowchart axioms and the two originals that fail synchronously"""
    network = [
        _ax("B1", 1, ["f ++ (g ++ h)", "(f ++ g) ++ h"], {"f": ("k", "l"), "g": ("m", "n"), "h": ("p", "q")}),
        _ax("B2", 1, ["I(0) ++ f", "f", "f ++ I(0)"], {"f": ("k", "l")}),
        _ax("B3", 1, ["f ; (g ; h)", "(f ; g) ; h"], {"f": ("k", "l"), "g": ("l", "m"), "h": ("m", "n")}),
        _ax("B4", 1, ["I(k) ; f", "f", "f ; I(l)"], {"f": ("k", "l")}),
        _ax("B5", 1, ["(f ++ f2) ; (g ++ g2)", "(f ; g) ++ (f2 ; g2)"],
            {"f": ("k", "l"), "g": ("l", "m"), "f2": ("n", "p"), "g2": ("p", "q")}),
        _ax("B6", 1, ["I(k) ++ I(l)", "I(k+l)"]),
        _ax("B7", 1, ["X(k,l) ; X(l,k)", "I(k+l)"]),
        _ax("B8", 1, ["X(k,0)", "I(k)"]),
        _ax("B9", 1, ["X(k,l+m)", "(X(k,l) ++ I(m)) ; (I(l) ++ X(k,m))"]),
        _ax("B10", 1, ["(f ++ g) ; X(m,n)", "X(k,l) ; (g ++ f)"], {"f": ("k", "m"), "g": ("l", "n")}),
        _ax("R1", 1, ["g ; f ^ m", "((g ++ I(m)) ; f) ^ m"], {"g": ("k", "l"), "f": ("l+m", "n+m")}),
        _ax("R2", 1, ["f ^ m ; g", "(f ; (g ++ I(m))) ^ m"], {"f": ("k+m", "l+m"), "g": ("l", "n")}),
        _ax("R3", 1, ["f ++ g ^ m", "(f ++ g) ^ m"], {"f": ("k", "l"), "g": ("n+m", "p+m")}),
        _ax("R4", 1, ["(f ; (I(l) ++ g)) ^ m", "((I(k) ++ g) ; f) ^ n"], {"f": ("k+m", "l+n"), "g": ("n", "m")},
            pinned=[({"k": 1, "l": 1, "m": 1, "n": 1}, {}),
                    ({"k": 1, "l": 1, "m": 2, "n": 2}, {"g": "X(1,1)"})]),
        _ax("R5", 1, ["f ^ 0", "f"], {"f": ("k", "l")}),
        _ax("R6", 1, ["(f ^ l) ^ k", "f ^ k+l"], {"f": ("m+k+l", "n+k+l")}),
        _ax("F1", 1, ["I(k) ^ k", "I(0)"]),
        _ax("F2", 1, ["X(k,k) ^ k", "I(k)"]),
    ]
    flowchart_originals = [
        _ax("A3", 2, [_SRC_INTO_EQ, "I(m)"], expected="fails-synchronously", minimum=1),
        _ax("F5", 2, [_FEED_SWAP, "I(m)"], expected="fails-synchronously", minimum=1),
    ]
    synchronous = [
        _ax("A1", 3, ["(eq(m) ++ I(m)) ; eq(m)", "(I(m) ++ eq(m)) ; eq(m)"]),
        _ax("A2", 3, ["X(m,m) ; eq(m)", "eq(m)"]),
        _ax("A3°", 3, [_SRC_INTO_EQ, "sink(m) ; src(m)"]),
        _ax("A4", 3, ["eq(m) ; sink(m)", "sink(m) ++ sink(m)"]),
        _ax("A5", 3, ["cp(m) ; (cp(m) ++ I(m))", "cp(m) ; (I(m) ++ cp(m))"]),
        _ax("A6", 3, ["cp(m) ; X(m,m)", "cp(m)"]),
        _ax("A7", 3, ["cp(m) ; (sink(m) ++ I(m))", "I(m)"]),
        _ax("A8", 3, ["src(m) ; cp(m)", "src(m) ++ src(m)"]),
        _ax("A9", 3, ["src(m) ; sink(m)", "I(0)"]),
        _ax("A10", 3, ["eq(m) ; cp(m)", "(cp(m) ++ cp(m)) ; (I(m) ++ X(m,m) ++ I(m)) ; (eq(m) ++ eq(m))"]),
        _ax("A11", 3, ["cp(m) ; eq(m)", "I(m)"]),
        _ax("A12", 3, ["src(0)", "I(0)"]),
        _ax("A13", 3, ["src(m+n)", "src(m) ++ src(n)"]),
        _ax("A14", 3, ["eq(0)", "I(0)"]),
        _ax("A15", 3, ["eq(m+n)", "(I(m) ++ X(n,m) ++ I(n)) ; (eq(m) ++ eq(n))"]),
        _ax("A16", 3, ["sink(0)", "I(0)"]),
        _ax("A17", 3, ["sink(m+n)", "sink(m) ++ sink(n)"]),
        _ax("A18", 3, ["cp(0)", "I(0)"]),
        _ax("A19", 3, ["cp(m+n)", "(cp(m) ++ cp(n)) ; (I(m) ++ X(m,n) ++ I(n))"]),
        _ax("F3", 3, ["eq(m) ^ m", "sink(m)"]),
        _ax("F4", 3, ["cp(m) ^ m", "src(m)"]),
        _ax("F5°", 3, [_FEED_SWAP, "sink(m) ; src(m)"]),
    ]
    return network + flowchart_originals + synchronous


def find_axiom(name: str) -> Axiom:
    for ax in axiom_catalog():
        if ax.name == name:
            return ax
    raise KeyError(f"no axiom named {name!r}")


def verify_sorts(ax: Axiom, bound: int = 2) -> None:
    """All sides agree on their sort for every index assignment up to `bound`"""
    names = ax.variables
    for values in product(range(ax.minimum, bound + 1), repeat=len(names)):
        sides, metas = ax.instantiate(dict(zip(names, values)))
        sorts = [sort_of(side, metas) for side in sides]
        if any(s != sorts[0] for s in sorts):
            raise SortMismatch(sides[0], sorts[0], next(s for s in sorts if s != sorts[0]),
                               f"axiom {ax.name} sides disagree at {dict(zip(names, values))}")


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_env(domain_size: int = DEFAULT_DOMAIN_SIZE, seed: int = 0) -> CellEnv:
    """Cells with random tables for each small sort, named p<inputs><outputs>"""
    rng = np.random.default_rng(seed)
    domain = tuple(str(v) for v in range(domain_size))
    cells = {}
    for m, n in [(1, 1), (2, 1), (1, 2), (2, 2), (0, 1), (1, 0)]:
        name = f"p{m}{n}"
        table = {row: tuple(domain[int(v)] for v in rng.integers(0, domain_size, size=n))
                 for row in product(domain, repeat=m)}
        init = tuple(domain[int(v)] for v in rng.integers(0, domain_size, size=n))
        cells[name] = CellDef(name=name, sort=Sort(m, n), table=table, init=init)
    return CellEnv(domain=domain, cells=cells)


def _atoms(sort: Sort, env: CellEnv, branching: bool) -> List[Term]:
    m, n = sort.inputs, sort.outputs
    found: List[Term] = []
    if m == n:
        found.append(Id(m))
        found += [Transp(a, m - a) for a in range(1, m)]
    found += [Cell(name) for name, cell in env.cells.items() if cell.sort == sort]
    if branching and m > 0:
        if n == 2 * m:
            found.append(Copy(m))
        if n == 0:
            found.append(Sink(m))
        if m == 2 * n and n > 0:
            found.append(EqTest(n))
    if branching and m == 0 and n > 0:
        found.append(DummySource(n))
    return found


def _generate(sort: Sort, budget: int, env: CellEnv, rng: np.random.Generator,
              max_ports: int, branching: bool) -> Term:
    if budget < 1:
        raise Unsatisfiable(sort, budget)
    atoms = _atoms(sort, env, branching)
    shapes = ["atom"] if budget == 1 else ["par", "seq", "feed", "atom"]
    for shape in rng.permutation(shapes):
        try:
            if shape == "atom" and atoms:
                return atoms[int(rng.integers(0, len(atoms)))]
            if shape == "par" and budget >= 3:
                m1 = int(rng.integers(0, sort.inputs + 1))
                n1 = int(rng.integers(0, sort.outputs + 1))
                b1 = int(rng.integers(1, budget - 1))
                left = _generate(Sort(m1, n1), b1, env, rng, max_ports, branching)
                right = _generate(Sort(sort.inputs - m1, sort.outputs - n1), budget - 1 - b1, env, rng,
                                  max_ports, branching)
                return Par(left, right)
            if shape == "seq" and budget >= 3:
                k = int(rng.integers(0, max_ports + 1))
                b1 = int(rng.integers(1, budget - 1))
                left = _generate(Sort(sort.inputs, k), b1, env, rng, max_ports, branching)
                right = _generate(Sort(k, sort.outputs), budget - 1 - b1, env, rng, max_ports, branching)
                return Seq(left, right)
            if shape == "feed" and budget >= 2:
                p = int(rng.integers(1, 3))
                body = _generate(Sort(sort.inputs + p, sort.outputs + p), budget - 1, env, rng,
                                 max_ports, branching)
                return Feed(body, p)
        except Unsatisfiable:
            continue
    raise Unsatisfiable(sort, budget)


def random_term(budget: int, sort: Sort, env: CellEnv, seed, max_ports: int = MAX_PORTS,
                branching: bool = True) -> Term:
    """A well-sorted term of the requested sort using at most `budget` operators and constants"""
    rng = np.random.default_rng(seed)
    try:
        return _generate(sort, budget, env, rng, max_ports, branching)
    except Unsatisfiable:
        if not branching or budget < 3:
            raise
    # Every sort is reachable by discarding the inputs and emitting ticks
    if sort.inputs == 0:
        return DummySource(sort.outputs)
    if sort.outputs == 0:
        return Sink(sort.inputs)
    return Seq(Sink(sort.inputs), DummySource(sort.outputs))


def _max_rows(t: Term, metas: Mapping[str, Sort], size: int) -> int:
    s = sort_of(t, metas)
    rows = size ** max(s.inputs, s.outputs)
    match t:
        case Par(left, right) | Seq(left, right):
            return max(rows, _max_rows(left, metas, size), _max_rows(right, metas, size))
        case Feed(body, _):
            return max(rows, _max_rows(body, metas, size))
    return rows


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

class CheckParams(BaseModel):
    horizon: int = DEFAULT_TICKS
    domain_size: int = DEFAULT_DOMAIN_SIZE
    max_ports: int = MAX_PORTS
    max_ops: int = MAX_OPS


class Report(BaseModel):
    """Outcome of one axiom check in one model; the seed and params regenerate every instance"""
    axiom: str
    model: str
    passed: bool
    trials: int
    seed: int
    params: CheckParams = CheckParams()
    counterexample: Optional[str] = None

    def line(self) -> str:
        fields = [self.axiom, self.model, "PASS" if self.passed else "FAIL", str(self.trials), str(self.seed)]
        if self.counterexample:
            fields.append(" | ".join(self.counterexample.splitlines()))
        return "\t".join(fields)


def _observe(model: str, t: Term, env: CellEnv, inputs, horizon: int):
    if model == "stream":
        return stream_semantics.observe(t, env, inputs, horizon)
    return process_simulator.observe(t, env, inputs, horizon)


def _sample_values(ax: Axiom, rng: np.random.Generator, max_ports: int) -> Dict[str, int]:
    top = max(max_ports, ax.minimum)
    return {name: int(rng.integers(ax.minimum, top + 1)) for name in ax.variables}


def _counterexample_rel(ax: Axiom, rng, params: CheckParams, carrier) -> Optional[str]:
    for _ in range(50):
        values = _sample_values(ax, rng, params.max_ports)
        sides, metas = ax.instantiate(values)
        if all(_max_rows(side, metas, len(carrier)) <= MAX_REL_ROWS for side in sides):
            break
    else:
        values = {name: ax.minimum for name in ax.variables}
        sides, metas = ax.instantiate(values)
    rels = {name: relation_model.random_rel(s, carrier, float(rng.uniform(0.2, 0.8)), int(rng.integers(2 ** 31)))
            for name, s in metas.items()}
    results = [relation_model.eval_rel(side, rels, carrier) for side in sides]
    for side, result in zip(sides[1:], results[1:]):
        if result != results[0]:
            return f"{print_term(sides[0])} != {print_term(side)} at {values}"
    return None


def _instances(ax: Axiom, trial: int, rng, params: CheckParams, env: CellEnv):
    if trial < len(ax.pinned):
        values, fixed = ax.pinned[trial]
    else:
        values, fixed = _sample_values(ax, rng, params.max_ports), {}
    sides, metas = ax.instantiate(values)
    mapping = {}
    for name, s in metas.items():
        if name in fixed:
            mapping[name] = parse_term(fixed[name])
        else:
            budget = int(rng.integers(3, max(params.max_ops, 3) + 1))
            mapping[name] = random_term(budget, s, env, int(rng.integers(2 ** 31)), params.max_ports)
    return values, mapping, [substitute(side, mapping) for side in sides]


def _counterexample_pinned_rel(ax: Axiom, trial: int, rng, params: CheckParams, carrier) -> Optional[str]:
    values, fixed = ax.pinned[trial]
    sides, metas = ax.instantiate(values)
    mapping = {name: parse_term(text) for name, text in fixed.items()}
    sides = [substitute(side, mapping) for side in sides]
    rels = {name: relation_model.random_rel(s, carrier, float(rng.uniform(0.2, 0.8)), int(rng.integers(2 ** 31)))
            for name, s in metas.items() if name not in fixed}
    results = [relation_model.eval_rel(side, rels, carrier) for side in sides]
    if any(r != results[0] for r in results[1:]):
        return f"{print_term(sides[0])} != {print_term(sides[-1])} at {values}"
    return None


def check_axiom(ax: Axiom, model: str, trials: int, params: CheckParams = None, seed: int = 0) -> Report:
    """Instantiate an axiom `trials` times and compare its sides in one model"""
    params = params or CheckParams()
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose one of {', '.join(MODELS)}")
    if model == "rel" and ax.table != 1:
        raise ValueError(f"axiom {ax.name} uses branching constants, which the relation model does not interpret")
    verify_sorts(ax)

    carrier = tuple(str(v) for v in range(params.domain_size))
    env = random_env(params.domain_size, seed)
    counterexample = None
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        if model == "rel":
            if trial < len(ax.pinned):
                counterexample = _counterexample_pinned_rel(ax, trial, rng, params, carrier)
            else:
                counterexample = _counterexample_rel(ax, rng, params, carrier)
        else:
            values, mapping, sides = _instances(ax, trial, rng, params, env)
            s = sort_of(sides[0], env)
            inputs = stream_semantics.random_streams(rng, s.inputs, params.horizon, env.domain)
            seen = [_observe(model, side, env, inputs, params.horizon) for side in sides]
            for side, other in zip(sides[1:], seen[1:]):
                if other != seen[0]:
                    binding = ", ".join(f"{k} := {print_term(v)}" for k, v in mapping.items())
                    counterexample = (f"{print_term(sides[0])} != {print_term(side)} at {values}"
                                      + (f" with {binding}" if binding else "")
                                      + f" on {print_streams(inputs)}: {seen[0].describe()} vs {other.describe()}")
                    break
        if counterexample:
            logger.debug(f"Counterexample for {ax.name} in trial {trial}: {counterexample}")
            break

    found = counterexample is not None
    passed = found if ax.expected == "fails-synchronously" else not found
    if not passed:
        logger.error(f"❌ {ax.name} ({model}): {counterexample or 'no counterexample found'}")
    return Report(axiom=ax.name, model=model, passed=passed, trials=trial + 1 if trials else 0,
                  seed=seed, params=params, counterexample=counterexample)


def check_normal_forms(ax: Axiom, trials: int, params: CheckParams = None, seed: int = 0) -> Report:
    """Random instances of a network axiom normalize to isomorphic forms"""
    params = params or CheckParams()
    counterexample = None
    trial = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        values = ax.pinned[trial][0] if trial < len(ax.pinned) else _sample_values(ax, rng, params.max_ports)
        sides, metas = ax.instantiate(values)
        forms = [to_normal_form(side, metas) for side in sides]
        if not all(iso_equal(forms[0], nf) for nf in forms[1:]):
            counterexample = f"{print_term(sides[0])} and {print_term(sides[-1])} normalize apart at {values}"
            break
    passed = counterexample is None
    return Report(axiom=ax.name, model="nf", passed=passed, trials=trial + 1 if trials else 0,
                  seed=seed, params=params, counterexample=counterexample)


def run_catalog(model: str, trials: int, params: CheckParams = None, seed: int = 0,
                table: Optional[int] = None) -> List[Report]:
    """Check every applicable catalog axiom; the relation model only takes the network axioms"""
    reports = []
    for ax in axiom_catalog():
        if table is not None and ax.table != table:
            continue
        if model == "rel" and ax.table != 1:
            continue
        report = check_axiom(ax, model, trials, params, seed)
        logger.info(f"{'✅' if report.passed else '❌'} {ax.name} ({model}) {ax.expected}")
        reports.append(report)
    return reports


def normal_form_catalog(trials: int, params: CheckParams = None, seed: int = 0) -> List[Report]:
    """Normal-form agreement for every network axiom"""
    reports = [check_normal_forms(ax, trials, params, seed) for ax in axiom_catalog() if ax.table == 1]
    for report in reports:
        logger.info(f"{'✅' if report.passed else '❌'} {report.axiom} (nf)")
    return reports


# ---------------------------------------------------------------------------
# Wire identity
# ---------------------------------------------------------------------------

WIRE_CONSTANTS = (Id(1), Transp(1, 1), Copy(1), Sink(1), EqTest(1), DummySource(1))


def wire_identity_suite(cells: int = 20, trials: int = 20, params: CheckParams = None,
                        seed: int = 0) -> List[Report]:
    """Wire identity in the process simulator for each constant and for `cells` random cells"""
    params = params or CheckParams()
    networks = [(f, random_env(params.domain_size, seed)) for f in WIRE_CONSTANTS]
    for index in range(cells):
        env = random_env(params.domain_size, seed + 1 + index)
        names = sorted(env.cells)
        networks.append((Cell(names[index % len(names)]), env))

    reports = []
    for f, env in networks:
        result = process_simulator.check_wire_identity(f, env, params.horizon, trials, seed)
        reports.append(Report(axiom=f"wire {print_term(f)}", model="proc", passed=result.holds,
                              trials=result.trials, seed=seed, params=params, counterexample=result.witness))
    failed = sum(1 for r in reports if not r.passed)
    logger.info(f"{'✅' if not failed else '❌'} Wire identity: {len(reports) - failed}/{len(reports)} networks")
    return reports


# ---------------------------------------------------------------------------
# Differential testing
# ---------------------------------------------------------------------------

class DifferentialReport(BaseModel):
    count: int
    seed: int
    horizon: int
    divergences: List[str] = []

    @property
    def passed(self) -> bool:
        return not self.divergences


def differential_suite(count: int = 100, size: int = MAX_OPS, horizon: int = DEFAULT_TICKS, seed: int = 0,
                       domain_size: int = DEFAULT_DOMAIN_SIZE, max_ports: int = MAX_PORTS) -> DifferentialReport:
    """Stream model against process simulator, and normal forms against their terms"""
    env = random_env(domain_size, seed)
    report = DifferentialReport(count=count, seed=seed, horizon=horizon)
    for index in range(count):
        rng = np.random.default_rng([seed, index])
        sort = Sort(int(rng.integers(0, max_ports + 1)), int(rng.integers(0, max_ports + 1)))
        try:
            t = random_term(size, sort, env, int(rng.integers(2 ** 31)), max_ports)
        except Unsatisfiable:
            continue
        inputs = stream_semantics.random_streams(rng, sort.inputs, horizon, env.domain)
        expected = stream_semantics.observe(t, env, inputs, horizon)
        where = f"term {print_term(t)} (seed {seed}, index {index})"

        for scheduler in process_simulator.SCHEDULERS:
            seen = process_simulator.observe(t, env, inputs, horizon, scheduler, seed=index)
            if seen != expected:
                report.divergences.append(f"{where}: process simulator ({scheduler}) disagrees")
        nf = to_normal_form(t, env)
        if stream_semantics.observe(nf_to_term(nf), env, inputs, horizon) != expected:
            report.divergences.append(f"{where}: normal form denotes different streams")
        if not iso_equal(to_normal_form(nf_to_term(nf), env), nf):
            report.divergences.append(f"{where}: normalization is not idempotent")

    status = "✅" if report.passed else "❌"
    logger.info(f"{status} Differential suite: {len(report.divergences)} divergences over {count} networks")
    return report


# ---------------------------------------------------------------------------
# Run tracking
# ---------------------------------------------------------------------------

def track_reports(reports: Sequence[Report], model: str, trials: int, seed: int, params: CheckParams,
                  table: Optional[int] = None) -> None:
    """Log parameters and per-axiom results to an MLflow experiment"""
    import mlflow

    mlflow.set_tracking_uri(MLFLOW_TRACKING_URI)
    mlflow.set_experiment(EXPERIMENT_NAME)
    with mlflow.start_run(run_name=f"axioms-{model}"):
        mlflow.log_param("model", model)
        mlflow.log_param("trials", trials)
        mlflow.log_param("seed", seed)
        mlflow.log_param("domain_size", params.domain_size)
        mlflow.log_param("ticks", params.horizon)
        mlflow.log_param("table", table if table is not None else "all")
        for report in reports:
            mlflow.log_metric(f"pass_{report.model}_{_metric_name(report.axiom)}", 1.0 if report.passed else 0.0)
        mlflow.log_metric("failures", float(sum(1 for r in reports if not r.passed)))
        mlflow.log_text("\n".join(r.line() for r in reports), "axiom_report.tsv")
    logger.info(f"✅ Logged {len(reports)} axiom results to experiment '{EXPERIMENT_NAME}'")


def _metric_name(axiom: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.\-]", "_", axiom.replace("°", "_circ"))
