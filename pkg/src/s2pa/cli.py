"""Command line: run scenarios and catalog examples, search equilibria, certify bounds, generate instances.

Exit codes: 0 every check holds, 1 some check is violated, 2 usage or parse
error, 3 an enumeration budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import bounds
from .catalog import NAMES, catalog_scenario
from .equilibria import FILTERS, BidGrid
from .errors import BudgetExceeded, S2PAError
from .generators import FAMILIES, generate_instances
from .reports import FORMATS, Report, emit_report
from .scenarios import (
    Check,
    Scenario,
    ScenarioError,
    load_scenario,
    run_scenario,
    scenario_to_tree,
    with_overrides,
)
from .valuations import as_fraction
from .welfare_opt import DEFAULT_BUDGET

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _rational(text: str):
    try:
        return as_fraction(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational p/q") from exc


def _order(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated bidder order") from exc


def _filters(text: str) -> tuple[str, ...]:
    parts = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in parts if x not in FILTERS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown filters {bad}; choose from {FILTERS}")
    return parts


def _global_options() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--tie-break", type=_order, default=argparse.SUPPRESS,
                   help="bidder order for ties, e.g. 1,0 (default: ascending)")
    g.add_argument("--grid-step", type=_rational, default=argparse.SUPPRESS, help="bid grid step, p/q")
    g.add_argument("--grid-max", type=_rational, default=argparse.SUPPRESS, help="largest grid bid, p/q")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="generator seed")
    g.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, help="report format")
    g.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                   help="maximum enumeration size (default %d)" % DEFAULT_BUDGET)
    g.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                   help="include wall times in reports (makes output run-dependent)")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    p = argparse.ArgumentParser(prog="s2pa", parents=[common],
                                description="Exact checks for simultaneous second-price item auctions.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run the checks of a scenario file")
    r.add_argument("scenario", help="path to a JSON scenario")

    e = sub.add_parser("example", parents=[common], help="run a built-in example")
    e.add_argument("name", nargs="?", help=f"one of: {', '.join(NAMES)}; families take (value)")
    e.add_argument("--list", action="store_true", help="list the catalog")
    e.add_argument("--dump", action="store_true", help="print the scenario instead of running it")

    s = sub.add_parser("pne-search", parents=[common], help="enumerate grid equilibria")
    s.add_argument("scenario", help="scenario file or catalog name")
    s.add_argument("--filters", type=_filters, default=(), help=f"comma list from {','.join(FILTERS)}")
    s.add_argument("--expect-worst", type=_rational, default=None, help="fail unless the worst ratio equals this")

    c = sub.add_parser("certify", parents=[common], help="check smoothness / revenue certificates on the scenario bids")
    c.add_argument("scenario", help="scenario file or catalog name")
    c.add_argument("--lambda", dest="lam", type=_rational, default=None)
    c.add_argument("--mu", type=_rational, default=None)
    c.add_argument("--gamma", type=_rational, default=None)
    c.add_argument("--delta", type=_rational, default=None)
    c.add_argument("--deviation", choices=("xos", "prefix"), default="xos")

    gen = sub.add_parser("gen", parents=[common], help="emit random instances as scenario JSON")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("-n", type=int, default=2, help="bidders")
    gen.add_argument("-m", type=int, default=3, help="items")
    gen.add_argument("--count", type=int, default=1)
    return p


def _opts(args):
    return {
        "tie_break": getattr(args, "tie_break", None),
        "grid_step": getattr(args, "grid_step", None),
        "grid_max": getattr(args, "grid_max", None),
        "seed": getattr(args, "seed", 0),
        "format": getattr(args, "format", "text"),
        "budget": getattr(args, "budget", DEFAULT_BUDGET),
        "timing": getattr(args, "timing", False),
    }


def _resolve(target: str) -> Scenario:
    """A path to a scenario file, or a catalog name."""
    from pathlib import Path

    if Path(target).exists():
        return load_scenario(target)
    return catalog_scenario(target)


def _apply(sc: Scenario, o) -> Scenario:
    grid = None
    if o["grid_step"] is not None or o["grid_max"] is not None:
        base = sc.grid
        if base is None and sc.instance is not None:
            from .equilibria import default_grid

            base = default_grid(sc.instance)
        step = o["grid_step"] if o["grid_step"] is not None else base.step
        top = o["grid_max"] if o["grid_max"] is not None else base.max_bid
        grid = BidGrid(step, top)
    return with_overrides(sc, o["tie_break"], grid)


def _emit(report: Report, o, out) -> int:
    out.write(emit_report(report, o["format"]).decode())
    return EXIT_OK if report.ok else EXIT_VIOLATED


def _cmd_run(args, o, out):
    sc = _apply(load_scenario(args.scenario), o)
    return _emit(run_scenario(sc, o["budget"], o["timing"]), o, out)


def _cmd_example(args, o, out):
    if args.list or not args.name:
        out.write("\n".join(NAMES) + "\n")
        return EXIT_OK
    sc = _apply(catalog_scenario(args.name), o)
    if args.dump:
        out.write(json.dumps(scenario_to_tree(sc), indent=2) + "\n")
        return EXIT_OK
    return _emit(run_scenario(sc, o["budget"], o["timing"]), o, out)


def _with_checks(sc: Scenario, checks) -> Scenario:
    made = tuple(Check(op, json.dumps(params, sort_keys=True), name) for op, name, params in checks)
    return replace(sc, checks=made)


def _cmd_pne_search(args, o, out):
    sc = _apply(_resolve(args.scenario), o)
    params = {"filters": list(args.filters)}
    if args.expect_worst is not None:
        params["expect"] = str(args.expect_worst)
    sc = _with_checks(sc, [("pne_search", "pne_search", params)])
    return _emit(run_scenario(sc, o["budget"], o["timing"]), o, out)


def _cmd_certify(args, o, out):
    sc = _apply(_resolve(args.scenario), o)
    checks = []
    if (args.lam is None) != (args.mu is None) or (args.gamma is None) != (args.delta is None):
        raise ScenarioError("give --lambda with --mu and --gamma with --delta")
    if args.lam is None and args.gamma is None:
        raise ScenarioError("give at least one of (--lambda, --mu) or (--gamma, --delta)")
    if args.gamma is not None:
        g, d = str(args.gamma), str(args.delta)
        checks.append(("revenue_guarantee", "revenue_guarantee", {"gamma": g, "delta": d}))
        checks.append(("welfare_floor", "welfare_floor", {"gamma": g, "delta": d}))
    if args.lam is not None:
        checks.append(("smoothness", "smoothness",
                       {"lambda": str(args.lam), "mu": str(args.mu), "deviation": args.deviation}))
    params = {k: str(v) for k, v in (("lambda", args.lam), ("mu", args.mu),
                                     ("gamma", args.gamma), ("delta", args.delta)) if v is not None}
    bounds.poa_bound(bounds.GuaranteeParams(params.get("lambda"), params.get("mu"),
                                            params.get("gamma"), params.get("delta")))
    checks.append(("poa_bound", "poa_bound", params))
    checks.append(("welfare", "welfare", {}))
    sc = _with_checks(sc, checks)
    return _emit(run_scenario(sc, o["budget"], o["timing"]), o, out)


def _cmd_gen(args, o, out):
    insts = generate_instances(args.family, args.n, args.m, o["seed"], args.count)
    trees = []
    for k, inst in enumerate(insts):
        sc = Scenario(f"{args.family}-seed{o['seed']}-{k}", inst, seed=o["seed"])
        trees.append(scenario_to_tree(sc))
    out.write(json.dumps(trees if args.count != 1 else trees[0], indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "example": _cmd_example,
    "pne-search": _cmd_pne_search,
    "certify": _cmd_certify,
    "gen": _cmd_gen,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, _opts(args), out)
    except BudgetExceeded as exc:
        print(f"s2pa: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (S2PAError, ValueError) as exc:
        print(f"s2pa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())
