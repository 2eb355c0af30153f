"""Built-in example scenarios.

Fixed examples live as JSON files in the ``catalog_data`` directory. The
families with a size or value parameter are produced by builders that return
the same JSON trees, so every catalog entry goes through the scenario parser.
Names accept ``family(value)`` or ``family(key=value)``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources

from .reports import Report, render_rational
from .scenarios import Scenario, ScenarioError, parse_scenario, run_scenario
from .valuations import as_fraction
from .welfare_opt import DEFAULT_BUDGET


def _r(x) -> str:
    return render_rational(as_fraction(x))


def xos_inub_tree(m: int = 4) -> dict:
    """Two XOS bidders on ``m`` items with an iNUB equilibrium at 2/m of OPT."""
    if m < 4:
        raise ScenarioError("the family needs m >= 4", "m")
    a1 = [2, 2] + [0] * (m - 2)
    a2 = [0, 0, 1, 1] + [0] * (m - 4)
    a3 = [0, 0] + [2] * (m - 2)
    a4 = [1, 1] + [0] * (m - 2)
    return {
        "name": f"ex-xos-inub(m={m})",
        "instance": {"n": 2, "m": m, "mechanism": "s2pa",
                     "valuations": [{"kind": "xos", "data": [a1, a2]},
                                    {"kind": "xos", "data": [a3, a4]}]},
        "bids": [[0, 0] + [2] * (m - 2), [2, 2] + [0] * (m - 2)],
        "checks": [
            {"op": "welfare", "expect": {"sw": 4, "opt": 2 * m, "ratio": _r(Fraction(2, m))}},
            {"op": "pne"},
            {"op": "inub"},
            {"op": "snub", "expect": False},
            {"op": "revenue_guarantee", "name": "revenue_guarantee_1_m", "gamma": 1, "delta": m},
        ],
    }


def single_minded_tree(R=1000) -> dict:
    """Two single-minded bidders on two items; iNUB alone allows ratio 1/R."""
    R = as_fraction(R)
    if R < 1:
        raise ScenarioError("R must be at least 1", "R")
    return {
        "name": f"ex-single-minded(R={_r(R)})",
        "items": ["x", "y"],
        "instance": {"n": 2, "m": 2, "mechanism": "s2pa",
                     "valuations": [{"kind": "table", "data": [0, 0, 0, 1]},
                                    {"kind": "table", "data": [0, 0, 0, _r(R)]}]},
        "bids": [[_r(R), _r(R)], [0, 0]],
        "checks": [
            {"op": "welfare", "expect": {"sw": 1, "opt": _r(R), "ratio": _r(1 / R)}},
            {"op": "pne"},
            {"op": "inub"},
        ],
    }


def alpha_not_xos_tree(alpha="1/2") -> dict:
    """Symmetric three-item valuation that is alpha-submodular but not XOS."""
    a = as_fraction(alpha)
    if not 0 < a < 1:
        raise ScenarioError("alpha must lie strictly between 0 and 1", "alpha")
    by_size = [Fraction(0), Fraction(2), 2 * (1 + a), 2 * (2 + a)]
    data = [_r(by_size[bin(S).count("1")]) for S in range(8)]
    return {
        "name": f"app-b2(alpha={_r(a)})",
        "items": ["a", "b", "c"],
        "instance": {"n": 1, "m": 3, "mechanism": "s2pa",
                     "valuations": [{"kind": "table", "data": data}]},
        "checks": [
            {"op": "class", "name": "xos", "class": "xos", "expect": False},
            {"op": "alpha_star", "expect": _r(a)},
        ],
    }


BUILDERS = {
    "ex-xos-inub": (xos_inub_tree, "m", int),
    "ex-single-minded": (single_minded_tree, "R", as_fraction),
    "app-b2": (alpha_not_xos_tree, "alpha", as_fraction),
}
FIXED = ("ex-1.1", "ex-1.2", "prop-6.2", "ex-xos-nob-inub", "app-b1", "app-d")
NAMES = FIXED[:3] + ("ex-xos-inub",) + FIXED[3:4] + ("ex-single-minded", "app-b1", "app-b2", "app-d")

_CALL = re.compile(r"^([a-z0-9.\-]+)(?:\((?:(\w+)\s*=\s*)?([^)]*)\))?$")


def catalog_tree(name: str) -> dict:
    match = _CALL.match(name.strip())
    if not match:
        raise ScenarioError(f"unknown catalog entry {name!r}")
    base, key, arg = match.groups()
    if base in FIXED:
        if arg is not None:
            raise ScenarioError(f"{base} takes no parameter")
        text = resources.files("s2pa").joinpath("catalog_data").joinpath(f"{base}.json").read_text()
        return json.loads(text)
    if base in BUILDERS:
        builder, pname, conv = BUILDERS[base]
        if key is not None and key != pname:
            raise ScenarioError(f"{base} takes parameter {pname!r}, not {key!r}")
        if arg is None or not arg.strip():
            return builder()
        try:
            value = conv(arg.strip())
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ScenarioError(f"bad value for {pname}: {exc}") from exc
        return builder(value)
    raise ScenarioError(f"unknown catalog entry {name!r}; choose from {', '.join(NAMES)}")


def catalog_scenario(name: str) -> Scenario:
    tree = catalog_tree(name)
    return parse_scenario(tree, tree["name"])


def run_catalog(name: str, budget: int = DEFAULT_BUDGET) -> Report:
    return run_scenario(catalog_scenario(name), budget)
