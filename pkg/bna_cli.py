#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Algebra Command Line
Parse, type-check, normalize, evaluate and simulate networks, and run the axiom suite
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from bna_config import (
    DEFAULT_DOMAIN_SIZE,
    DEFAULT_SEED,
    DEFAULT_TICKS,
    DEFAULT_TRIALS,
    LOG_LEVEL,
    MAX_OPS,
    MAX_PORTS,
    configure_logging,
)
from bna_core import CellEnv, NetworkAlgebraError, Sort, build_regular, make_cell, sort_of
from bna_parser import format_sort, parse_env, parse_streams, parse_term, print_streams, print_term
from normal_form import nf_to_term, terms_iso_equal, to_normal_form
import axiom_harness
import process_simulator
import stream_semantics

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COUNTER_TERM = "(succ4 ; cp(1)) ^ 1"


def counter_env() -> CellEnv:
    """Domain 0..3 with the mod-4 successor cell succ4, initial output 0"""
    domain = ("0", "1", "2", "3")
    succ4 = make_cell("succ4", Sort(1, 1), lambda x: str((int(x) + 1) % 4), ("0",), domain)
    return CellEnv(domain=domain, cells={"succ4": succ4})


def _load_env(path: Optional[str]) -> Optional[CellEnv]:
    if path is None:
        return None
    return parse_env(Path(path).read_text(encoding="utf-8"))


def _require_env(path: Optional[str]) -> CellEnv:
    env = _load_env(path)
    if env is None:
        raise ValueError("this command needs a cell environment (--env FILE)")
    return env


def _inputs(args, env: CellEnv, m: int):
    text = Path(args.inputs).read_text(encoding="utf-8") if args.inputs else ""
    return parse_streams(text, m, args.ticks, env.domain)


def cmd_parse(args) -> int:
    print(print_term(parse_term(args.term)))
    return EXIT_OK


def cmd_typecheck(args) -> int:
    print(format_sort(sort_of(parse_term(args.term), _load_env(args.env))))
    return EXIT_OK


def cmd_normalize(args) -> int:
    nf = to_normal_form(parse_term(args.term), _load_env(args.env))
    print(print_term(nf_to_term(nf)))
    return EXIT_OK


def cmd_iso(args) -> int:
    same = terms_iso_equal(parse_term(args.left), parse_term(args.right), _load_env(args.env))
    print("ISO" if same else "NOT-ISO")
    return EXIT_OK if same else EXIT_FAIL


def _report_collision(e: stream_semantics.SlotCollision) -> int:
    if e.partial:
        print(print_streams(e.partial))
    print(f"❌ {e}", file=sys.stderr)
    return EXIT_FAIL


def cmd_eval(args) -> int:
    env = _require_env(args.env)
    term = parse_term(args.term)
    inputs = _inputs(args, env, sort_of(term, env).inputs)
    try:
        if args.model == "stream":
            outputs = stream_semantics.eval_prefix(term, env, inputs, args.ticks)
        else:
            outputs, _ = process_simulator.run(process_simulator.instantiate(term, env), inputs, args.ticks)
    except stream_semantics.SlotCollision as e:
        return _report_collision(e)
    print(print_streams(outputs))
    return EXIT_OK


def cmd_simulate(args) -> int:
    env = _require_env(args.env)
    term = parse_term(args.term)
    inputs = _inputs(args, env, sort_of(term, env).inputs)
    net = process_simulator.instantiate(term, env, args.eq_variant)
    try:
        outputs, events = process_simulator.run(net, inputs, args.ticks, args.scheduler, args.seed)
    except stream_semantics.SlotCollision as e:
        if args.log:
            Path(args.log).write_text(process_simulator.format_event_log(getattr(e, "log", [])) + "\n",
                                      encoding="utf-8")
        return _report_collision(e)
    if args.log:
        Path(args.log).write_text(process_simulator.format_event_log(events) + "\n", encoding="utf-8")
        logger.info(f"Wrote {len(events)} events to {args.log}")
    print(print_streams(outputs))
    return EXIT_OK


def cmd_axioms(args) -> int:
    params = axiom_harness.CheckParams(horizon=args.ticks, domain_size=args.domain_size,
                                       max_ports=args.max_ports, max_ops=args.max_ops)
    reports = axiom_harness.run_catalog(args.model, args.trials, params, args.seed, args.table)
    for report in reports:
        print(report.line())
    failures = [r for r in reports if not r.passed]
    logger.info(f"{'✅' if not failures else '❌'} {len(reports) - len(failures)}/{len(reports)} axioms as expected")

    extra = []
    if args.normal_forms:
        extra += axiom_harness.normal_form_catalog(args.normal_forms, params, args.seed)
    if args.wire_identity is not None:
        extra += axiom_harness.wire_identity_suite(args.wire_identity, args.trials, params, args.seed)
    for report in extra:
        print(report.line())
    failures += [r for r in extra if not r.passed]
    reports = reports + extra

    if args.differential:
        suite = axiom_harness.differential_suite(args.differential, args.max_ops, args.ticks, args.seed,
                                                 args.domain_size, args.max_ports)
        print(f"DIFFERENTIAL\t{'PASS' if suite.passed else 'FAIL'}\t{suite.count}\t{suite.seed}")
        for divergence in suite.divergences:
            print(f"DIVERGENCE\t{divergence}")
        if not suite.passed:
            failures.append(suite)

    if args.track:
        axiom_harness.track_reports(reports, args.model, args.trials, args.seed, params, args.table)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_demo(args) -> int:
    if args.network == "regular":
        print(print_term(build_regular(args.k, args.l, args.cell)))
        return EXIT_OK
    env = counter_env()
    term = parse_term(COUNTER_TERM)
    stream = stream_semantics.eval_prefix(term, env, [], args.ticks)
    proc, _ = process_simulator.run(process_simulator.instantiate(term, env), [], args.ticks)
    print(f"# {COUNTER_TERM}")
    print(print_streams(stream))
    if stream != proc:
        print(f"❌ process simulator disagrees:\n{print_streams(proc)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bna",
        description="Network algebra toolkit: terms, normal forms, stream and process semantics, axioms",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="logging level (default: BNA_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("parse", help="print the canonical form of a term", formatter_class=defaults)
    p.add_argument("term")
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("typecheck", help="print the sort `m -> n` of a term", formatter_class=defaults)
    p.add_argument("term")
    p.add_argument("--env", help="cell environment JSON file")
    p.set_defaults(handler=cmd_typecheck)

    p = sub.add_parser("normalize", help="print the normal form of a term", formatter_class=defaults)
    p.add_argument("term")
    p.add_argument("--env", help="cell environment JSON file")
    p.set_defaults(handler=cmd_normalize)

    p = sub.add_parser("iso", help="compare two terms up to cell permutation", formatter_class=defaults)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--env", help="cell environment JSON file")
    p.set_defaults(handler=cmd_iso)

    p = sub.add_parser("eval", help="evaluate a term on input streams", formatter_class=defaults)
    p.add_argument("term")
    p.add_argument("--env", help="cell environment JSON file")
    p.add_argument("--inputs", help="stream file; missing ports carry ticks")
    p.add_argument("--ticks", type=int, default=DEFAULT_TICKS, help="horizon")
    p.add_argument("--model", choices=["stream", "proc"], default="stream")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("simulate", help="run the process simulator", formatter_class=defaults)
    p.add_argument("term")
    p.add_argument("--env", help="cell environment JSON file")
    p.add_argument("--inputs", help="stream file; missing ports carry ticks")
    p.add_argument("--ticks", type=int, default=DEFAULT_TICKS, help="number of time slices")
    p.add_argument("--scheduler", choices=list(process_simulator.SCHEDULERS), default="fifo")
    p.add_argument("--eq-variant", choices=list(process_simulator.EQ_VARIANTS), default="faithful")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed of the random scheduler")
    p.add_argument("--log", help="write the event log to this file")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("axioms", help="check the axiom catalog in one model", formatter_class=defaults)
    p.add_argument("--model", choices=list(axiom_harness.MODELS), default="stream")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--domain-size", type=int, default=DEFAULT_DOMAIN_SIZE)
    p.add_argument("--ticks", type=int, default=DEFAULT_TICKS)
    p.add_argument("--max-ports", type=int, default=MAX_PORTS, help="largest index value and port width")
    p.add_argument("--max-ops", type=int, default=MAX_OPS, help="operator budget of metavariable instances")
    p.add_argument("--table", type=int, choices=[1, 2, 3], default=None, help="restrict to one table")
    p.add_argument("--differential", type=int, default=0, metavar="N",
                   help="also compare the stream model and the process simulator on N random networks")
    p.add_argument("--normal-forms", type=int, default=0, metavar="N",
                   help="also normalize N instances of every network axiom and compare the forms")
    p.add_argument("--wire-identity", type=int, default=None, metavar="N",
                   help="also check wire identity for every constant and N random cells")
    p.add_argument("--track", action="store_true", help="log the run to MLflow")
    p.set_defaults(handler=cmd_axioms)

    p = sub.add_parser("demo", help="print example networks", formatter_class=defaults)
    p.add_argument("network", choices=["regular", "counter"])
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--l", type=int, default=4)
    p.add_argument("--cell", default="f", help="2 -> 2 cell of the regular network")
    p.add_argument("--ticks", type=int, default=8, help="horizon of the counter")
    p.set_defaults(handler=cmd_demo)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        configure_logging(args.log_level or LOG_LEVEL)
        return args.handler(args)
    except (NetworkAlgebraError, ValueError, OSError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
