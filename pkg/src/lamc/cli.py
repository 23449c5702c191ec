"""Command-line front end: run scripts, extract witnesses, translate,
check simulations and compare run statistics."""

from __future__ import annotations

import argparse
import json
import sys

from .arith import EApp, eval_expr, expr_of_nat
from .extract import (
    extract_decidable,
    extract_kamikaze,
    extract_naive,
    extract_sigma01,
    make_decider_sigma01,
    sigma01_refuter,
)
from .formulas import parse_hformula
from .ha2 import print_hterm, read_witness
from .negtrans import ReturnFormula, cps_process, cps_term, formula_bot, formula_nn
from .script import (
    EXIT_FUEL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_UNVERIFIED,
    ScriptRunner,
    parse_script,
    run_script,
)
from .simulate import simulate_run
from .syntax import LamcError, parse_process, parse_stack, parse_term


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamc",
        description="Krivine machine, witness extraction and CPS translation "
        "for the lambda-c calculus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a .lc script")
    p_run.add_argument("script")
    p_run.add_argument("--fuel", type=int, default=None)
    p_run.add_argument("--trace", action="store_true")
    p_run.add_argument("--json-like", action="store_true")

    p_ext = sub.add_parser("extract", help="run a witness extraction driver")
    p_ext.add_argument("--mode", required=True, choices=["naive", "sigma01", "decidable", "kamikaze"])
    p_ext.add_argument("--realizer", required=True, help="file containing a lambda-c term")
    p_ext.add_argument("--f", required=True, help="unary predicate symbol (f(x) = 0)")
    p_ext.add_argument("--script", help="script whose definitions set up the environment")
    p_ext.add_argument("--trace-guesses", action="store_true")
    p_ext.add_argument("--fuel", type=int, default=None)
    p_ext.add_argument("--stack", default="$", help="initial stack literal")
    p_ext.add_argument("--json-like", action="store_true")

    p_tr = sub.add_parser("translate", help="negative/CPS translation")
    group = p_tr.add_mutually_exclusive_group(required=True)
    group.add_argument("--term")
    group.add_argument("--formula")
    group.add_argument("--process")
    p_tr.add_argument("--R", help="return formula (HA2 syntax)")
    p_tr.add_argument("--script", help="script whose definitions set up the environment")
    p_tr.add_argument("--read-witness", action="store_true",
                      help="with --process: weak-reduce the image and read the witness pair")
    p_tr.add_argument("--fuel", type=int, default=2_000_000)
    p_tr.add_argument("--json-like", action="store_true")

    p_sim = sub.add_parser("simulate", help="check machine steps against weak reduction")
    p_sim.add_argument("--process", required=True)
    p_sim.add_argument("--fuel", type=int, default=40)
    p_sim.add_argument("--json-like", action="store_true")

    p_st = sub.add_parser("stats", help="instruction-call statistics of script runs")
    p_st.add_argument("scripts", nargs="+")
    p_st.add_argument("--fuel", type=int, default=None)

    return parser


def _environment(script_path: str | None, fuel: int | None):
    runner = ScriptRunner(fuel=fuel)
    if script_path:
        with open(script_path, "r", encoding="utf-8") as handle:
            text = handle.read()
        runner.execute(parse_script(text))
    return runner.cfg


def _cmd_run(args) -> int:
    result = run_script(args.script, fuel=args.fuel, trace=args.trace)
    if args.json_like:
        print(json.dumps(result.doc, indent=2))
    else:
        sys.stdout.write(result.text)
    return result.exit_code


def _cmd_extract(args) -> int:
    cfg = _environment(args.script, args.fuel)
    with open(args.realizer, "r", encoding="utf-8") as handle:
        realizer = parse_term(handle.read(), instructions=cfg.instructions, strict=True)
    stack = parse_stack(args.stack, instructions=cfg.instructions, strict=True)

    def oracle(n: int) -> bool:
        return eval_expr(EApp(args.f, (expr_of_nat(n),)), {}, cfg.sig) == 0

    if args.mode == "sigma01":
        report = extract_sigma01(realizer, args.f, cfg, stack, args.trace_guesses)
    elif args.mode == "naive":
        report = extract_naive(realizer, cfg, stack, oracle)
    elif args.mode == "decidable":
        d = make_decider_sigma01(args.f, cfg)
        report = extract_decidable(realizer, d, sigma01_refuter(), oracle, cfg, stack)
    else:
        report = extract_kamikaze(realizer, sigma01_refuter(), cfg, stack, oracle)
    if args.json_like:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        verified = {True: "true", False: "false", None: "unknown"}[report.verified]
        witness = "none" if report.witness is None else str(report.witness)
        print(f"extract {report.mode}: witness {witness} verified {verified}")
        if report.guesses:
            print("guesses: " + " ".join(str(n) for n in report.guesses))
        print(f"halt: {report.outcome.halt.kind}")
        print(f"steps: {report.outcome.steps}")
    if report.outcome.halt.kind == "fuel":
        return EXIT_FUEL
    if report.verified is not True:
        return EXIT_UNVERIFIED
    return EXIT_OK


def _cmd_translate(args) -> int:
    cfg = _environment(args.script, None)
    doc: dict = {}
    lines: list[str] = []
    if args.formula is not None:
        from .formulas import HPredVar, parse_formula, print_hformula

        R = ReturnFormula(
            parse_hformula(args.R, cfg.sig) if args.R else HPredVar("R")
        )
        formula = parse_formula(args.formula, cfg.sig)
        bot = print_hformula(formula_bot(formula, R))
        nn = print_hformula(formula_nn(formula, R))
        lines += [f"bot: {bot}", f"nn: {nn}"]
        doc = {"subject": "formula", "bot": bot, "nn": nn}
    elif args.term is not None:
        term = parse_term(args.term, instructions=cfg.instructions, strict=True)
        out = print_hterm(cps_term(term))
        lines.append(out)
        doc = {"subject": "term", "output": out}
    else:
        process = parse_process(args.process, instructions=cfg.instructions, strict=True)
        image = cps_process(process)
        out = print_hterm(image)
        lines.append(out)
        doc = {"subject": "process", "output": out}
        if args.read_witness:
            found = read_witness(image, fuel=args.fuel)
            if found is None:
                lines.append("witness: none")
                doc["witness"] = None
            else:
                lines.append(f"witness: {found[0]}")
                doc["witness"] = found[0]
    if args.json_like:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    process = parse_process(args.process, strict=True)
    report = simulate_run(process, fuel=args.fuel)
    if args.json_like:
        print(
            json.dumps(
                {
                    "machine_steps": report.machine_steps,
                    "verified": report.verified,
                    "failed": report.failed,
                    "inconclusive": report.inconclusive,
                    "halt": report.halt_kind,
                },
                indent=2,
            )
        )
    else:
        print(
            f"simulate: machine-steps {report.machine_steps} verified {report.verified} "
            f"failed {report.failed} inconclusive {report.inconclusive} halt {report.halt_kind}"
        )
    return EXIT_UNVERIFIED if report.failed else EXIT_OK


def _cmd_stats(args) -> int:
    tables = []
    for path in args.scripts:
        result = run_script(path, fuel=args.fuel)
        calls = {}
        printed: list[int] = []
        for stmt in result.doc["statements"]:
            if stmt["kind"] == "eval":
                for name, count in stmt["calls"].items():
                    calls[name] = calls.get(name, 0) + count
                printed.extend(stmt["printed"])
        tables.append((path, calls, printed))
    for path, calls, printed in tables:
        print(f"script: {path}")
        if printed:
            print("printed: " + " ".join(str(n) for n in printed))
        for name, count in sorted(calls.items(), key=lambda rc: (-rc[1], rc[0])):
            print(f"  {name:<12} {count}")
    if len(tables) == 2:
        (_, a, pa), (_, b, pb) = tables
        print("diff:")
        print(f"  printed {'identical' if pa == pb else 'DIFFER'}")
        for name in sorted(set(a) | set(b)):
            if a.get(name, 0) != b.get(name, 0):
                print(f"  {name:<12} {a.get(name, 0)} vs {b.get(name, 0)}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(20_000)
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "extract": _cmd_extract,
        "translate": _cmd_translate,
        "simulate": _cmd_simulate,
        "stats": _cmd_stats,
    }
    try:
        return handlers[args.command](args)
    except LamcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
