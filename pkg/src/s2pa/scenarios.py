"""Scenario files: parsing, validation, canonical re-emission and check execution.

A scenario is a JSON document::

    {
      "name": "ex-1.2",
      "items": ["x", "y"],                      # optional item names
      "instance": {"mechanism": "s2pa", "tie_break": [0, 1],
                   "valuations": [{"kind": "unit_demand", "data": [3, 2]}, ...]},
      "bids": [[1, 2], [2, 1]],
      "grid": {"step": "1", "max": "3"},
      "types": [[<valuation>, ...], ...],       # Bayesian games only
      "distribution": {"kind": "over_type_profiles",
                       "support": [{"weight": "1/2", "payload": [0, 1]}, ...]},
      "strategies": [{"0": [1, 2], "1": {"support": [...]}}, ...],
      "checks": [{"op": "pne"}, {"op": "inub", "expect": false}, ...],
      "seed": 0
    }

Numbers are JSON integers or ``"p/q"`` strings; JSON floats are rejected.
Table valuations give ``data`` either as the ``2**m`` values in bitmask order
or as an object keyed by comma-separated item names (``""`` is the empty set).
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import bounds
from .bid_properties import (
    check_inub,
    check_nob,
    check_snub,
    check_snub_expected,
    construct_flat_optimal_profile,
    dominance_check,
)
from .distributions import BayesianAuction, FiniteDistribution
from .equilibria import (
    BidGrid,
    best_response,
    best_response_dynamics,
    construct_xos_pne,
    default_grid,
    enumerate_pne,
    verify_bne,
    verify_cce,
    verify_pne,
)
from .errors import PreconditionError, S2PAError, ValuationError
from .mechanisms import AuctionInstance, BidProfile, check_revenue_bids_lemma, run_auction
from .reports import CheckRecord, Report, render_rational
from .valuations import ValuationSpec, alpha_star, as_fraction, check_class, from_mask
from .welfare_opt import DEFAULT_BUDGET, optimal_allocations


class ScenarioError(S2PAError, ValueError):
    """A scenario file does not parse or does not validate."""

    def __init__(self, message, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass(frozen=True)
class Check:
    op: str
    params_json: str = "{}"  # canonical JSON keeps the dataclass hashable and comparable
    name: str = ""

    @property
    def params(self) -> dict:
        return json.loads(self.params_json)


@dataclass(frozen=True)
class Scenario:
    name: str
    instance: AuctionInstance | None = None
    items: tuple[str, ...] | None = None
    bids: BidProfile | None = None
    grid: BidGrid | None = None
    game: BayesianAuction | None = None
    distribution: FiniteDistribution | None = None
    strategies: tuple | None = None
    checks: tuple[Check, ...] = ()
    seed: int = 0
    tree: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.instance.n if self.instance is not None else self.game.n

    @property
    def m(self) -> int:
        return self.instance.m if self.instance is not None else self.game.m

    def item_name(self, j: int) -> str:
        return self.items[j] if self.items else str(j)

    def set_name(self, S) -> str:
        return "{" + ",".join(self.item_name(j) for j in sorted(S)) + "}"


# ---------------------------------------------------------------------------
# parsing


def _num(x, where):
    if isinstance(x, float):
        raise ScenarioError(f"decimal {x!r} not allowed; write p/q", where)
    try:
        return as_fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(str(exc), where) from exc


def _row(r, m, where):
    if not isinstance(r, list) or len(r) != m:
        raise ScenarioError(f"expected a list of {m} numbers", where)
    return tuple(_num(x, f"{where}[{j}]") for j, x in enumerate(r))


def _matrix(rows, n, m, where):
    if not isinstance(rows, list) or len(rows) != n:
        raise ScenarioError(f"expected {n} rows", where)
    return BidProfile(tuple(_row(r, m, f"{where}[{i}]") for i, r in enumerate(rows)))


def _item_index(items, m):
    names = {str(j): j for j in range(m)}
    if items:
        names.update({name: j for j, name in enumerate(items)})
    return names


def _parse_valuation(tree, m, items, where) -> ValuationSpec:
    if not isinstance(tree, dict) or "kind" not in tree or "data" not in tree:
        raise ScenarioError("valuation needs 'kind' and 'data'", where)
    kind, data = tree["kind"], tree["data"]
    try:
        if kind == "xos":
            if not isinstance(data, list):
                raise ScenarioError("xos data is a list of clauses", where)
            v = ValuationSpec.xos([_row(c, m, f"{where}.data[{k}]") for k, c in enumerate(data)])
        elif kind == "table" and isinstance(data, dict):
            names = _item_index(items, m)
            vals = {}
            for key, x in data.items():
                parts = [p.strip() for p in key.split(",") if p.strip()]
                if any(p not in names for p in parts):
                    raise ScenarioError(f"unknown item in set {key!r}", f"{where}.data")
                vals[tuple(names[p] for p in parts)] = _num(x, f"{where}.data[{key!r}]")
            vals.setdefault((), Fraction(0))
            v = ValuationSpec.from_sets(m, vals)
        elif kind in ("additive", "unit_demand", "table"):
            size = (1 << m) if kind == "table" else m
            v = ValuationSpec(kind, _row(data, size, f"{where}.data"))
        else:
            raise ScenarioError(f"unknown valuation kind {kind!r}", where)
    except ValuationError as exc:
        witness = f" (witness {exc.witness})" if exc.witness is not None else ""
        raise ScenarioError(f"{exc}{witness}", where) from exc
    if v.m != m:
        raise ScenarioError(f"valuation is over {v.m} items, expected {m}", where)
    return v


def _parse_distribution(tree, n, m, where) -> FiniteDistribution:
    kind = tree.get("kind", "over_type_profiles")
    support = []
    for k, point in enumerate(tree.get("support", [])):
        w = _num(point.get("weight"), f"{where}.support[{k}].weight")
        payload = point.get("payload")
        here = f"{where}.support[{k}].payload"
        if kind == "over_bid_profiles":
            payload = _matrix(payload, n, m, here)
        elif kind == "over_type_profiles":
            if not isinstance(payload, list) or len(payload) != n or not all(isinstance(t, int) for t in payload):
                raise ScenarioError(f"expected {n} type indices", here)
            payload = tuple(payload)
        elif kind == "over_bid_rows":
            payload = _row(payload, m, here)
        else:
            raise ScenarioError(f"unknown distribution kind {kind!r}", where)
        support.append((payload, w))
    try:
        return FiniteDistribution(tuple(support), kind)
    except PreconditionError as exc:
        raise ScenarioError(str(exc), where) from exc


def _parse_strategies(tree, game, m, where):
    if not isinstance(tree, list) or len(tree) != game.n:
        raise ScenarioError(f"expected one strategy per bidder ({game.n})", where)
    out = []
    for i, strat in enumerate(tree):
        here = f"{where}[{i}]"
        if not isinstance(strat, dict):
            raise ScenarioError("strategy maps type index to an action", here)
        s = {}
        for key, action in strat.items():
            try:
                t = int(key)
            except ValueError:
                raise ScenarioError(f"type key {key!r} is not an integer", here) from None
            if not 0 <= t < len(game.types[i]):
                raise ScenarioError(f"type {t} out of range", here)
            if isinstance(action, dict):
                s[t] = _parse_distribution({**action, "kind": "over_bid_rows"}, game.n, m, f"{here}[{key}]")
            else:
                s[t] = _row(action, m, f"{here}[{key}]")
        out.append(s)
    return tuple(out)


def parse_scenario(tree: dict, name: str | None = None) -> Scenario:
    if not isinstance(tree, dict):
        raise ScenarioError("scenario must be a JSON object")
    items = tree.get("items")
    if items is not None:
        items = tuple(str(x) for x in items)
    inst_tree = tree.get("instance", {})
    mechanism = inst_tree.get("mechanism", "s2pa")
    tie_break = inst_tree.get("tie_break")
    instance = game = None
    try:
        if "types" in tree:
            types = tree["types"]
            m = inst_tree.get("m") or (len(items) if items else None)
            if m is None:
                raise ScenarioError("Bayesian scenarios need instance.m or items", "instance")
            parsed = tuple(
                tuple(_parse_valuation(v, m, items, f"types[{i}][{t}]") for t, v in enumerate(ts))
                for i, ts in enumerate(types)
            )
            game = BayesianAuction(parsed, mechanism, None if tie_break is None else tuple(tie_break))
            game.instance(tuple(0 for _ in parsed))  # validates mechanism and tie-break
        else:
            vals = inst_tree.get("valuations")
            if not vals:
                raise ScenarioError("instance needs valuations", "instance")
            m = inst_tree.get("m") or (len(items) if items else None)
            if m is None:
                first = vals[0]
                m = len(first["data"][0]) if first.get("kind") == "xos" else len(first["data"])
                if first.get("kind") == "table" and isinstance(first["data"], list):
                    m = len(first["data"]).bit_length() - 1
            vs = tuple(_parse_valuation(v, m, items, f"instance.valuations[{i}]") for i, v in enumerate(vals))
            if "n" in inst_tree and inst_tree["n"] != len(vs):
                raise ScenarioError(f"n={inst_tree['n']} but {len(vs)} valuations", "instance.n")
            instance = AuctionInstance(vs, mechanism, None if tie_break is None else tuple(tie_break))
    except ScenarioError:
        raise
    except (S2PAError, ValueError, TypeError, KeyError) as exc:
        raise ScenarioError(str(exc), "instance") from exc
    if items is not None and len(items) != m:
        raise ScenarioError(f"{len(items)} item names for m={m}", "items")

    n = instance.n if instance is not None else game.n
    bids = _matrix(tree["bids"], n, m, "bids") if "bids" in tree else None
    grid = None
    if "grid" in tree:
        g = tree["grid"]
        try:
            grid = BidGrid(_num(g.get("step"), "grid.step"), _num(g.get("max"), "grid.max"))
        except S2PAError as exc:
            raise ScenarioError(str(exc), "grid") from exc
    dist = _parse_distribution(tree["distribution"], n, m, "distribution") if "distribution" in tree else None
    strategies = None
    if "strategies" in tree:
        if game is None:
            raise ScenarioError("strategies need a Bayesian 'types' section", "strategies")
        strategies = _parse_strategies(tree["strategies"], game, m, "strategies")

    checks, seen = [], {}
    for k, c in enumerate(tree.get("checks", [])):
        if not isinstance(c, dict) or "op" not in c:
            raise ScenarioError("each check needs an 'op'", f"checks[{k}]")
        if c["op"] not in OPS:
            raise ScenarioError(f"unknown op {c['op']!r}", f"checks[{k}].op")
        params = {key: val for key, val in c.items() if key not in ("op", "name")}
        label = c.get("name", c["op"])
        seen[label] = seen.get(label, 0) + 1
        if seen[label] > 1:
            label = f"{label}#{seen[label]}"
        checks.append(Check(c["op"], json.dumps(params, sort_keys=True), label))
    seed = tree.get("seed", 0)
    if not isinstance(seed, int):
        raise ScenarioError("seed must be an integer", "seed")
    return Scenario(name or tree.get("name", "scenario"), instance, items, bids, grid, game,
                    dist, strategies, tuple(checks), seed, tree)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(str(exc), str(path)) from exc
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{exc.msg} at line {exc.lineno} column {exc.colno}", str(path)) from exc
    return parse_scenario(tree, tree.get("name", path.stem) if isinstance(tree, dict) else None)


# ---------------------------------------------------------------------------
# canonical re-emission


def _r(x: Fraction) -> str:
    return render_rational(x)


def _valuation_tree(v: ValuationSpec) -> dict:
    if v.kind == "xos":
        return {"kind": "xos", "data": [[_r(a) for a in c] for c in v.data]}
    return {"kind": v.kind, "data": [_r(a) for a in v.data]}


def _dist_tree(d: FiniteDistribution) -> dict:
    def payload(p):
        if d.kind == "over_bid_profiles":
            return [[_r(x) for x in row] for row in p.bids]
        if d.kind == "over_bid_rows":
            return [_r(x) for x in p]
        return list(p)

    return {"kind": d.kind, "support": [{"weight": _r(w), "payload": payload(p)} for p, w in d.support]}


def scenario_to_tree(sc: Scenario) -> dict:
    """Canonical JSON tree; loading it yields an equal scenario."""
    tree: dict[str, Any] = {"name": sc.name}
    if sc.items:
        tree["items"] = list(sc.items)
    if sc.instance is not None:
        tree["instance"] = {
            "n": sc.instance.n,
            "m": sc.instance.m,
            "mechanism": sc.instance.mechanism,
            "tie_break": list(sc.instance.tie_break),
            "valuations": [_valuation_tree(v) for v in sc.instance.valuations],
        }
    else:
        g = sc.game
        tree["instance"] = {"n": g.n, "m": g.m, "mechanism": g.mechanism}
        if g.tie_break is not None:
            tree["instance"]["tie_break"] = list(g.tie_break)
        tree["types"] = [[_valuation_tree(v) for v in ts] for ts in g.types]
    if sc.bids is not None:
        tree["bids"] = [[_r(x) for x in row] for row in sc.bids.bids]
    if sc.grid is not None:
        tree["grid"] = {"step": _r(sc.grid.step), "max": _r(sc.grid.max_bid)}
    if sc.distribution is not None:
        tree["distribution"] = _dist_tree(sc.distribution)
    if sc.strategies is not None:
        strat = []
        for s in sc.strategies:
            d = {}
            for t, a in sorted(s.items()):
                if isinstance(a, FiniteDistribution):
                    d[str(t)] = {"support": _dist_tree(a)["support"]}
                else:
                    d[str(t)] = [_r(x) for x in a]
            strat.append(d)
        tree["strategies"] = strat
    tree["checks"] = []
    for c in sc.checks:
        entry = {"op": c.op}
        if c.name != c.op and "#" not in c.name:
            entry["name"] = c.name
        entry.update(c.params)
        tree["checks"].append(entry)
    tree["seed"] = sc.seed
    return tree


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_tree(sc), indent=2) + "\n"


def with_overrides(sc: Scenario, tie_break=None, grid: BidGrid | None = None) -> Scenario:
    """Apply command-line overrides of the tie-break order and bid grid."""
    kw = {}
    if tie_break is not None:
        if sc.instance is not None:
            kw["instance"] = AuctionInstance(sc.instance.valuations, sc.instance.mechanism, tuple(tie_break))
        else:
            kw["game"] = BayesianAuction(sc.game.types, sc.game.mechanism, tuple(tie_break))
    if grid is not None:
        kw["grid"] = grid
    if not kw:
        return sc
    from dataclasses import replace

    return replace(sc, **kw)


# ---------------------------------------------------------------------------
# running checks


@dataclass
class _Context:
    sc: Scenario
    budget: int
    _opt: Any = None

    @property
    def inst(self) -> AuctionInstance:
        if self.sc.instance is None:
            raise PreconditionError("this check needs a full-information instance")
        return self.sc.instance

    @property
    def opt(self):
        if self._opt is None:
            self._opt = optimal_allocations(self.inst, budget=self.budget)
        return self._opt

    @property
    def bids(self) -> BidProfile:
        if self.sc.bids is None:
            raise PreconditionError("this check needs 'bids'")
        return self.sc.bids

    @property
    def grid(self) -> BidGrid:
        return self.sc.grid or default_grid(self.inst)

    def need(self, attr):
        x = getattr(self.sc, attr)
        if x is None:
            raise PreconditionError(f"this check needs '{attr}'")
        return x


def _expect_value(raw):
    if isinstance(raw, bool) or raw in ("holds", "violated", "inapplicable"):
        return raw
    return as_fraction(raw)


def _violation_text(sc, viol) -> str:
    x = viol[0]
    where = sc.set_name(x.items) if isinstance(x.items, frozenset) else f"item {sc.item_name(x.items)}"
    return f"bidder {x.bidder} {where}: {render_rational(x.actual)} vs {render_rational(x.required)}"


def _prop(fn):
    def op(ctx, p):
        rep = fn(ctx, p)
        witness = None if rep.holds else _violation_text(ctx.sc, rep.violations) if rep.violations else None
        return rep.holds, [(rep.property, rep.holds)], witness
    return op


def _op_welfare(ctx, p):
    out = run_auction(ctx.inst, ctx.bids)
    opt = ctx.opt.opt_value
    vals = [("sw", out.welfare), ("revenue", out.revenue), ("opt", opt)]
    if opt:
        vals.append(("ratio", out.welfare / opt))
    return None, vals, None


def _op_pne(ctx, p):
    rep = verify_pne(ctx.inst, ctx.bids, ctx.grid)
    w = None if rep.holds else (
        f"bidder {rep.bidder} gains {render_rational(rep.gain)} with "
        f"({', '.join(render_rational(x) for x in rep.deviation)})")
    return rep.holds, [("pne", rep.holds)], w


def _fmt(sc, x) -> str:
    if isinstance(x, frozenset):
        return sc.set_name(x)
    if isinstance(x, Fraction):
        return render_rational(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{sc.item_name(k)}: {_fmt(sc, v)}" for k, v in sorted(x.items())) + "}"
    if isinstance(x, (tuple, list)):
        return "(" + ", ".join(_fmt(sc, e) for e in x) + ")"
    return str(x)


def _op_class(ctx, p):
    v = _valuation(ctx, p)
    cls = p.get("class", "xos")
    res = check_class(v, cls)
    return res.holds, [(cls, res.holds)], None if res.holds else f"witness {_fmt(ctx.sc, res.witness)}"


def _valuation(ctx, p):
    i = p.get("bidder", 0)
    return ctx.inst.valuations[i]


def _op_alpha(ctx, p):
    cert = alpha_star(_valuation(ctx, p))
    w = None
    if cert.witness is not None:
        S, T, j = cert.witness
        w = f"S={ctx.sc.set_name(S)} T={ctx.sc.set_name(T)} j={ctx.sc.item_name(j)}"
    return cert.alpha_star, [("alpha_star", cert.alpha_star)], w


def _op_best_response(ctx, p):
    i = p.get("bidder", 0)
    br = best_response(ctx.inst, i, ctx.bids, ctx.grid)
    return br.utility, [("utility", br.utility)], f"row ({', '.join(render_rational(x) for x in br.row)})"


def _eq_witness(rep):
    if rep.holds:
        return None
    t = "" if rep.type_index is None else f" type {rep.type_index}"
    return (f"bidder {rep.bidder}{t}: {render_rational(rep.current)} < "
            f"{render_rational(rep.deviation_utility)} with ({', '.join(render_rational(x) for x in rep.deviation)})")


def _op_cce(ctx, p):
    rep = verify_cce(ctx.inst, ctx.need("distribution"), ctx.grid)
    return rep.holds, [("cce", rep.holds)], _eq_witness(rep)


def _bayes_grid(ctx):
    if ctx.sc.grid is not None:
        return ctx.sc.grid
    game = ctx.need("game")
    vals = sorted({x for ts in game.types for v in ts for x in v.values})
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    return BidGrid(min(gaps) / 4, vals[-1]) if gaps else BidGrid(1, 1)


def _op_bne(ctx, p):
    rep = verify_bne(ctx.need("game"), ctx.need("strategies"), ctx.need("distribution"), _bayes_grid(ctx))
    return rep.holds, [("bne", rep.holds)], _eq_witness(rep)


def _op_snub_expected(ctx, p):
    rep = check_snub_expected(ctx.need("game"), ctx.need("distribution"), ctx.need("strategies"))
    w = None
    if not rep.holds:
        x = rep.violations[0]
        w = f"bidder {x.bidder} type {x.items}: {render_rational(x.actual)} vs {render_rational(x.required)}"
    return rep.holds, [("snub_expected", rep.holds)], w


def _cert(rep: bounds.CertificateReport, extra=()):
    vals = [("slack", rep.slack)] if rep.slack is not None else []
    vals.extend(extra)
    w = None if rep.witness is None else f"{rep.status} at profile {rep.witness}"
    if rep.status == "inapplicable":
        w = "hypotheses not met"
    return rep.status, vals, w


def _profiles(ctx):
    if ctx.sc.bids is not None:
        return [ctx.sc.bids]
    d = ctx.need("distribution")
    return [b for b, _ in d.support]


def _op_revenue(ctx, p):
    rep = bounds.check_revenue_guarantee(ctx.inst, _profiles(ctx), p.get("gamma", 1), p.get("delta", 1), ctx.opt)
    return _cert(rep)


def _op_smoothness(ctx, p):
    dev = p.get("deviation", "xos")
    if dev == "xos":
        rows = bounds.xos_deviation(ctx.inst, ctx.opt.first)
    elif dev == "prefix":
        rows = bounds.prefix_deviation(ctx.inst, ctx.opt.first)
    else:
        rows = tuple(tuple(as_fraction(x) for x in r) for r in dev)
    rep = bounds.check_smoothness_at(ctx.inst, ctx.bids, rows, p.get("lambda", 1), p.get("mu", 1), ctx.opt)
    return _cert(rep)


def _op_welfare_floor(ctx, p):
    g, d = p.get("gamma", 1), p.get("delta", 1)
    if ctx.sc.game is not None:
        rep = bounds.check_welfare_floor_expected(ctx.sc.game, ctx.need("distribution"),
                                                  ctx.need("strategies"), g, d)
        e = bounds.expectations(ctx.sc.game, ctx.sc.distribution, ctx.sc.strategies)
        return _cert(rep, [("expected_sw", e.welfare), ("expected_opt", e.opt)])
    return _cert(bounds.check_welfare_floor(ctx.inst, _profiles(ctx), g, d, ctx.opt))


def _op_poa_bound(ctx, p):
    params = bounds.GuaranteeParams(p.get("lambda"), p.get("mu"), p.get("gamma"), p.get("delta"))
    x = bounds.poa_bound(params)
    return x, [("bound", x)], None


def _op_pne_search(ctx, p):
    res = enumerate_pne(ctx.inst, ctx.grid, p.get("filters", ()), budget=ctx.budget)
    vals = [("pne_count", Fraction(res.pne_count)), ("kept", Fraction(len(res.profiles)))]
    if res.worst_ratio is not None:
        vals.append(("worst_ratio", res.worst_ratio))
    witness = res.summary() if not res.found else None
    return res.worst_ratio, vals, witness


def _op_construct(ctx, p):
    b = construct_xos_pne(ctx.inst)
    pne = bool(verify_pne(ctx.inst, b, ctx.grid))
    nob = bool(check_nob(ctx.inst, b))
    snub = bool(check_snub(ctx.inst, b, ctx.opt.maximizers))
    ratio = run_auction(ctx.inst, b).welfare / ctx.opt.opt_value
    ok = pne and nob and snub and ratio == 1
    bids = "; ".join(",".join(render_rational(x) for x in row) for row in b.bids)
    return ok, [("pne", pne), ("nob", nob), ("snub", snub), ("ratio", ratio)], f"bids {bids}"


def _op_flat(ctx, p):
    b = construct_flat_optimal_profile(ctx.inst, ctx.opt.first)
    nob = bool(check_nob(ctx.inst, b))
    snub = bool(check_snub(ctx.inst, b, ctx.opt.maximizers))
    return nob and snub, [("nob", nob), ("snub", snub)], None


def _op_two_thirds(ctx, p):
    rep = bounds.subadditive_composed_check(ctx.inst, ctx.bids, ctx.grid)
    return _cert(rep)


def _op_dominance(ctx, p):
    i, j = p.get("bidder", 0), p.get("item", 0)
    rep = dominance_check(ctx.inst, ctx.bids, i, j, p.get("underbid", 0))
    w = None if rep.counterexample is None else f"column {_fmt(ctx.sc, rep.counterexample)}"
    return rep.holds, [("dominated", rep.holds), ("marginal_bid", rep.marginal_bid),
                       ("strict_gain", rep.strict_gain)], w


def _op_lemma(ctx, p):
    rep = check_revenue_bids_lemma(ctx.inst, ctx.bids, ctx.opt.first)
    return rep.holds, [("revenue", rep.revenue), ("lost_optimal_bids", rep.lost_optimal_bids)], None


def _op_dynamics(ctx, p):
    start = ctx.sc.bids or BidProfile.zeros(ctx.inst.n, ctx.inst.m)
    res = best_response_dynamics(ctx.inst, start, p.get("order"), p.get("max_rounds", 50), ctx.grid)
    pne = res.converged and bool(verify_pne(ctx.inst, res.profile, ctx.grid))
    return res.converged, [("converged", res.converged), ("steps", Fraction(len(res.trajectory))),
                           ("pne", pne)], None


OPS = {
    "welfare": _op_welfare,
    "pne": _op_pne,
    "nob": _prop(lambda c, p: check_nob(c.inst, c.bids)),
    "strong_nob": _prop(lambda c, p: check_nob(c.inst, c.bids, strong=True)),
    "inub": _prop(lambda c, p: check_inub(c.inst, c.bids, c.opt.maximizers, p.get("shared", True))),
    "snub": _prop(lambda c, p: check_snub(c.inst, c.bids, c.opt.maximizers, p.get("shared", True))),
    "class": _op_class,
    "alpha_star": _op_alpha,
    "best_response": _op_best_response,
    "cce": _op_cce,
    "bne": _op_bne,
    "snub_expected": _op_snub_expected,
    "revenue_guarantee": _op_revenue,
    "smoothness": _op_smoothness,
    "welfare_floor": _op_welfare_floor,
    "poa_bound": _op_poa_bound,
    "pne_search": _op_pne_search,
    "construct_xos_pne": _op_construct,
    "flat_optimal": _op_flat,
    "subadditive_two_thirds": _op_two_thirds,
    "dominance": _op_dominance,
    "revenue_lemma": _op_lemma,
    "dynamics": _op_dynamics,
}


def _digest(sc: Scenario, check: Check) -> str:
    base = {k: v for k, v in scenario_to_tree(sc).items() if k not in ("checks", "name")}
    blob = json.dumps([base, check.op, check.params], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _result(primary, expect) -> str:
    if primary == "inapplicable" and expect != "inapplicable":
        return "inapplicable"
    if expect is not None:
        if isinstance(expect, dict):
            return "holds"
        return "holds" if primary == expect else "violated"
    if primary is False or primary == "violated":
        return "violated"
    return "holds"


def _check_expected_values(vals, expect):
    got = dict(vals)
    bad = []
    for k, want in expect.items():
        want = _expect_value(want)
        if got.get(k) != want:
            shown = got.get(k)
            shown = "missing" if shown is None else (render_rational(shown) if isinstance(shown, Fraction) else shown)
            bad.append(f"{k} expected {want if isinstance(want, bool) else render_rational(want)}, got {shown}")
    return bad


def run_check(sc: Scenario, check: Check, budget: int = DEFAULT_BUDGET, timing: bool = False,
              ctx: _Context | None = None) -> CheckRecord:
    """Run one check. Budget overruns propagate as ``BudgetExceeded``."""
    ctx = ctx or _Context(sc, budget)
    params = check.params
    raw_expect = params.pop("expect", None)
    expect = raw_expect if isinstance(raw_expect, dict) else (
        None if raw_expect is None else _expect_value(raw_expect))
    start = time.perf_counter()
    try:
        primary, vals, witness = OPS[check.op](ctx, params)
    except PreconditionError as exc:
        primary, vals, witness = "inapplicable", [], str(exc)
    elapsed = time.perf_counter() - start if timing else None
    result = _result(primary, expect)
    if isinstance(expect, dict) and result == "holds":
        bad = _check_expected_values(vals, expect)
        if bad:
            result, witness = "violated", "; ".join(bad)
    elif expect is not None and result == "violated" and witness is None:
        shown = render_rational(primary) if isinstance(primary, Fraction) else primary
        want = render_rational(expect) if isinstance(expect, Fraction) else expect
        witness = f"expected {want}, got {shown}"
    if expect is not None and not isinstance(expect, dict):
        vals = list(vals) + [("expected", expect)] if not isinstance(expect, str) else list(vals)
    return CheckRecord(check.name, check.op, result, _digest(sc, check), tuple(vals), witness, elapsed)


def run_scenario(sc: Scenario, budget: int = DEFAULT_BUDGET, timing: bool = False) -> Report:
    ctx = _Context(sc, budget)
    return Report(sc.name, tuple(run_check(sc, c, budget, timing, ctx) for c in sc.checks))


__all__ = [
    "Scenario",
    "Check",
    "ScenarioError",
    "OPS",
    "parse_scenario",
    "load_scenario",
    "scenario_to_tree",
    "dump_scenario",
    "with_overrides",
    "run_check",
    "run_scenario",
]
