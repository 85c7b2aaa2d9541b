"""``lop``: evaluate, step, translate and check probabilistic lambda terms."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import prelude as _prelude
from .asymptotics import (
    DEFAULT_EPSILON,
    DEFAULT_JOIN_FUEL,
    DEFAULT_MAX_STEPS,
    OBSERVATIONS,
    ObservationSet,
    Strategy,
    Trace,
    evaluate_limit,
)
from .calculi import redexes
from .multidist import MultiDist, fraction_str, lift_step, parse_fraction
from .parser import ForeignConstructorError, ParseError, parse
from .propcheck.graph import DEFAULT_BUDGET
from .propcheck.suites import (
    CHECKS,
    run_regressions,
    run_simulation_suite,
    run_standardize,
    run_term_suite,
    write_jsonl,
)
from .terms import CALCULI
from .translations import SIMULATIONS, VARIANTS, ReservedNameError, translate_bang, translate_cbn, translate_cbv

EXIT_OK, EXIT_INPUT, EXIT_UNCONVERGED = 0, 1, 2

DEFAULT_OBS = {"cbv": "values-upto-beta", "cbn": "hnf-upto-beta", "bang": "surface-nf-bang-upto-beta"}


class InputError(Exception):
    pass


def _read_source(args) -> str:
    if args.expr is not None:
        return args.expr
    if args.file in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from None


def _load_input(args, calculus: str) -> MultiDist:
    """A term, or a multidistribution given as JSON."""
    text = _read_source(args)
    try:
        defs = _prelude.load(args.prelude)
    except (OSError, ParseError) as exc:
        raise InputError(f"prelude: {exc}") from None
    stripped = text.strip()
    try:
        if stripped.startswith("{"):
            data = json.loads(stripped)
            return MultiDist(tuple(
                (parse_fraction(e["p"]), parse(e["term"], calculus, prelude=defs)) for e in data["entries"]
            ))
        return MultiDist.point(parse(text, calculus, prelude=defs))
    except (ParseError, ForeignConstructorError, ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


# ---------------------------------------------------------------- commands


def cmd_eval(args) -> int:
    calc = args.calculus
    try:
        strategy = Strategy.parse(args.strategy, calc)
        obs = ObservationSet(args.obs or DEFAULT_OBS[calc], calc, args.join_fuel)
        epsilon = parse_fraction(args.epsilon) if args.epsilon else DEFAULT_EPSILON
    except ValueError as exc:
        raise InputError(str(exc)) from None
    m = _load_input(args, calc)
    result, trace = evaluate_limit(m, strategy, obs, args.max_steps, epsilon,
                                   compact=not args.exact, record=bool(args.trace))
    if args.trace:
        Path(args.trace).write_text(json.dumps(trace.to_json(), indent=1), encoding="utf-8")
    if args.json:
        _print_json(result.to_json())
    else:
        for c in result.classes:
            mark = "" if c.resolved else "  (provisional)"
            print(f"{c.repr}: >= {fraction_str(c.mass)}{mark}")
        if not result.classes:
            print("no observed mass")
        print(f"residual: {fraction_str(result.residual)}")
        print(f"steps: {result.steps}")
        print(f"converged: {'yes' if result.converged else 'no'}")
        for w in result.warnings:
            print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_UNCONVERGED


def cmd_step(args) -> int:
    calc = args.calculus
    trace = None
    if args.trace and Path(args.trace).exists():
        try:
            trace = Trace.from_json(json.loads(Path(args.trace).read_text(encoding="utf-8")))
        except (ValueError, KeyError) as exc:
            raise InputError(f"{args.trace}: {exc}") from None
    if trace is not None and args.expr is None and args.file is None:
        m = trace.states[-1]  # continue from the last recorded state
    else:
        m = _load_input(args, calc)
        trace = None if trace is None or trace.states[-1] != m else trace
    listing = [(i, r) for i, t in enumerate(m.terms) for r in redexes(t, calc)]
    out: dict = {"multidist": m.to_json(), "redexes": []}
    if not args.json:
        print(m)
    for k, (i, r) in enumerate(listing):
        out["redexes"].append({"index": k, "entry": i, **r.to_json()})
        if not args.json and (args.show_redexes or args.pick is None):
            flags = ", ".join(f for f, v in r.flags().items() if v)
            print(f"  [{k}] entry {i}: {r.kind} at {list(r.position) or 'root'} ({flags})")
    if not listing and not args.json:
        print("no redexes")
    if args.pick is not None:
        if not 0 <= args.pick < len(listing):
            print(f"error: redex index {args.pick} out of range (0..{len(listing) - 1})", file=sys.stderr)
            return EXIT_INPUT
        i, r = listing[args.pick]
        choice = [None] * len(m)
        choice[i] = r
        nxt = lift_step(m, choice, calc)
        out["result"] = nxt.to_json()
        if not args.json:
            print(f"=> {nxt}")
        if args.trace:
            states = (trace.states if trace else (m,)) + (nxt,)
            choices = (trace.choices if trace else ()) + (tuple(choice),)
            Trace(calc, "manual", states, choices).replay()
            Path(args.trace).write_text(json.dumps(Trace(calc, "manual", states, choices).to_json(), indent=1),
                                        encoding="utf-8")
    if args.json:
        _print_json(out)
    return EXIT_OK


def cmd_translate(args) -> int:
    src = args.source
    m = _load_input(args, src)
    try:
        if src == "cbv":
            fn = lambda t: translate_cbv(t, args.variant)  # noqa: E731
        elif src == "bang":
            fn = translate_bang
        else:
            fn = translate_cbn
        images = [(p, fn(t)) for p, t in m.entries]
    except (ReservedNameError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if len(images) == 1 and images[0][0] == 1:
        image = images[0][1]
        print(json.dumps({"term": str(image)}) if args.json else image)
    else:
        md = MultiDist(tuple(images))
        print(json.dumps(md.to_json()) if args.json else md)
    return EXIT_OK


def cmd_check(args) -> int:
    kind = args.kind
    calc = args.calculus
    if kind == "regressions":
        results = run_regressions(args.budget)
    elif kind == "simulate":
        which = args.which or {"cbv": "cbv-simple", "cbn": "cbn", "bang": "bang"}[calc]
        results = run_simulation_suite(which, args.size, args.steps, args.jobs)
    elif kind == "standardize":
        results = run_standardize(calc, args.count, args.seed, args.size, args.budget, args.jobs)
    else:
        try:
            results = run_term_suite(kind, calc, args.size, args.budget, args.jobs)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    sink = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        total, failures = write_jsonl(results, sink)
    finally:
        if args.output:
            sink.close()
    print(f"{kind}: {total} checked, {failures} failed", file=sys.stderr)
    return 1 if failures else EXIT_OK


# ------------------------------------------------------------------ parser


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="file holding a term or a JSON multidistribution ('-' for stdin)")
    p.add_argument("-e", "--expr", help="term given on the command line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lop", description=__doc__)
    parser.add_argument("--prelude", help=f"extra NAME = term definitions (also ${_prelude.PRELUDE_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="bound the limit distribution of a term")
    _add_input(p)
    p.add_argument("--calculus", choices=CALCULI, default="cbv")
    p.add_argument("--strategy", default="full-surface",
                   help="full-surface, full-left, full-head, full-any, leftmost-any or random(SEED)")
    p.add_argument("--obs", choices=sorted(OBSERVATIONS), help="observation set (default depends on calculus)")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--epsilon", help="stop once the residual is at most this (p/q); default 1/2^20")
    p.add_argument("--join-fuel", type=int, default=DEFAULT_JOIN_FUEL)
    p.add_argument("--exact", action="store_true", help="keep duplicate entries apart instead of merging them")
    p.add_argument("--trace", help="write the trace as JSON to this file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("step", help="list redexes and fire one")
    _add_input(p)
    p.add_argument("--calculus", choices=CALCULI, default="cbv")
    p.add_argument("--show-redexes", action="store_true")
    p.add_argument("--pick", type=int, help="index of the redex to fire")
    p.add_argument("--trace", help="JSON trace file to extend")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("translate", help="translate a term into the target calculus")
    _add_input(p)
    p.add_argument("--from", dest="source", choices=CALCULI, default="cbv")
    p.add_argument("--variant", choices=VARIANTS, default="simple", help="cbv translation variant")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("check", help="run a property suite, streaming JSON lines")
    p.add_argument("kind", choices=CHECKS)
    p.add_argument("--calculus", choices=CALCULI, default="cbv")
    p.add_argument("--which", choices=SIMULATIONS, help="translation to check (simulate)")
    p.add_argument("--size", type=int, help="largest term size (default 9, or 8 for bang)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1000, help="random traces (standardize)")
    p.add_argument("--steps", type=int, default=1, help="source steps to follow (simulate)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
