"""Command-line interface.

Exit codes: 0 success (or checked property holds), 1 property fails
(violations are printed), 2 usage/parse/config error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from ..analysis import (MutexRegion, check_mutex, find_deadlocks,
                        maximal_traces, bisimilar)
from ..errors import (AcpsiError, BudgetExceeded, ConfigError, ParseError,
                      TruncatedInput)
from ..kernel.config import ActionKind, SystemConfig
from ..kernel.terms import Term, canonical_term
from ..rewrite import eliminate, reduce_spec
from ..sos import build_lts, step, terminates
from ..strategy.base import StrategyInstance
from .config import default_config, load_config
from .parser import SourceText, parse_term, scan_action_names
from .render import export_lts, render_term

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _load_context(args, term_sources: list[str]) -> tuple[SystemConfig, StrategyInstance]:
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        return load_config(SourceText(text, path=args.config))
    names: set[str] = set()
    for src in term_sources:
        names |= scan_action_names(src)
    return default_config(names)


def _parse(args, cfg, strat, source: str) -> Term:
    return parse_term(SourceText(source), cfg, strat)


def _budget_kwargs(args) -> dict:
    out = {}
    if getattr(args, "max_states", None) is not None:
        out["max_states"] = args.max_states
    if getattr(args, "max_depth", None) is not None:
        out["max_depth"] = args.max_depth
    return out


def cmd_parse(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    print(render_term(canonical_term(t)))
    return EXIT_OK


def cmd_lts(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    lts = build_lts(t, cfg, strat, use_digest=(args.digest == "on"),
                    **_budget_kwargs(args))
    payload = export_lts(lts, format=args.format)
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return EXIT_OK


def cmd_eliminate(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    kwargs = {}
    if args.max_states is not None:
        kwargs["max_states"] = args.max_states
    print(render_term(eliminate(t, cfg, strat, **kwargs)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    constant = reduce_spec(t, cfg, strat, **_budget_kwargs(args))
    for var, body in sorted(constant.spec.equations,
                            key=lambda e: (len(e[0]), e[0])):
        print(f"{var} = {render_term(body)}")
    return EXIT_OK


def cmd_bisim(args) -> int:
    cfg, strat = _load_context(args, [args.left, args.right])
    t1 = _parse(args, cfg, strat, args.left)
    t2 = _parse(args, cfg, strat, args.right)
    kwargs = _budget_kwargs(args)
    l1 = build_lts(t1, cfg, strat, require_complete=True, **kwargs)
    l2 = build_lts(t2, cfg, strat, require_complete=True, **kwargs)
    if bisimilar(l1, l2):
        print("bisimilar")
        return EXIT_OK
    print("not bisimilar")
    return EXIT_PROPERTY_FAILS


def cmd_simulate(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    rng = random.Random(args.seed)
    current = t
    for n in range(1, args.steps + 1):
        moves = sorted(step(current, cfg, strat),
                       key=lambda m: (m[0], render_term(m[1])))
        if not moves:
            if terminates(current, cfg, strat):
                print("terminated")
            else:
                print("deadlock")
            return EXIT_OK
        label, current = rng.choice(moves)
        print(f"{n}: {label}")
    print(f"cut after {args.steps} steps")
    return EXIT_OK


def _load_regions(path: str, cfg: SystemConfig) -> list[MutexRegion]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise ConfigError([f"{path}: regions file must be a JSON list"])
    regions = []
    problems = []
    for idx, entry in enumerate(doc):
        try:
            enter = {int(k): v for k, v in entry["enter"].items()}
            exit_ = {int(k): v for k, v in entry["exit"].items()}
            region = MutexRegion.of(entry["semaphore"], enter, exit_)
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: region #{idx}: {exc}")
            continue
        for action in list(enter.values()) + list(exit_.values()):
            decl = cfg.alphabet.get(action)
            if decl is None:
                problems.append(f"{path}: region #{idx}: undeclared action {action}")
            elif decl.kind is not ActionKind.PLAIN:
                problems.append(f"{path}: region #{idx}: {action} is not a "
                                f"plain action")
        regions.append(region)
    if problems:
        raise ConfigError(problems)
    return regions


def cmd_check_mutex(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    regions = _load_regions(args.regions, cfg)
    lts = build_lts(t, cfg, strat, require_complete=True, **_budget_kwargs(args))
    violations = check_mutex(lts, regions, depth=args.depth)
    for v in violations:
        print(v)
    if violations:
        return EXIT_PROPERTY_FAILS
    print("no mutual-exclusion violations")
    return EXIT_OK


def cmd_check_deadlock(args) -> int:
    cfg, strat = _load_context(args, [args.term])
    t = _parse(args, cfg, strat, args.term)
    lts = build_lts(t, cfg, strat, require_complete=True, **_budget_kwargs(args))
    violations = find_deadlocks(lts)
    for v in violations:
        print(v)
    if violations:
        return EXIT_PROPERTY_FAILS
    print("no deadlocks")
    return EXIT_OK


def _add_budget_flags(sub, *, depth: bool = True) -> None:
    sub.add_argument("--max-states", type=int, default=None,
                     help="state budget for exploration")
    if depth:
        sub.add_argument("--max-depth", type=int, default=None,
                         help="depth budget for exploration")


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="acpsi",
        description="process-algebra workbench with strategy-driven interleaving")
    ap.add_argument("-c", "--config", metavar="FILE",
                    help="system configuration (alphabet, communication, "
                         "strategy, creation); defaults to a synthesized "
                         "round-robin config over the term's actions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="echo the canonical form of a term")
    p.add_argument("term")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("lts", help="build and export the transition system")
    p.add_argument("term")
    _add_budget_flags(p)
    p.add_argument("--digest", choices=("on", "off"), default="on",
                   help="identify states up to the strategy's history digest")
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(fn=cmd_lts)

    p = sub.add_parser("eliminate",
                       help="expand a finite behavior into a basic term")
    p.add_argument("term")
    p.add_argument("--max-states", type=int, default=None)
    p.set_defaults(fn=cmd_eliminate)

    p = sub.add_parser("reduce",
                       help="linearize into a guarded recursive specification")
    p.add_argument("term")
    _add_budget_flags(p)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("bisim", help="check two terms for strong bisimilarity")
    p.add_argument("left")
    p.add_argument("right")
    _add_budget_flags(p)
    p.set_defaults(fn=cmd_bisim)

    p = sub.add_parser("simulate",
                       help="run one pseudo-random resolution of the choices")
    p.add_argument("term")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check-mutex",
                       help="scan for overlapping critical regions")
    p.add_argument("term")
    p.add_argument("--regions", required=True, metavar="FILE",
                   help="JSON list of {semaphore, enter: {pos: action}, "
                        "exit: {pos: action}}")
    p.add_argument("--depth", type=int, default=10_000)
    _add_budget_flags(p)
    p.set_defaults(fn=cmd_check_mutex)

    p = sub.add_parser("check-deadlock",
                       help="find reachable stuck states")
    p.add_argument("term")
    _add_budget_flags(p)
    p.set_defaults(fn=cmd_check_deadlock)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (BudgetExceeded, TruncatedInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AcpsiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
