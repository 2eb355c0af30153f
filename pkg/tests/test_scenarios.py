import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from strategies import instance_and_bids
from s2pa import BidGrid, BidProfile
from s2pa.catalog import catalog_scenario
from s2pa.reports import emit_report
from s2pa.scenarios import (OPS, Check, Scenario, ScenarioError, dump_scenario, load_scenario,
                            parse_scenario, run_check, run_scenario, scenario_to_tree,
                            with_overrides)

BAYES = {
    "name": "bayes",
    "items": ["x", "y"],
    "instance": {"mechanism": "s2pa"},
    "types": [[{"kind": "unit_demand", "data": [3, 2]}, {"kind": "unit_demand", "data": [6, 4]}],
              [{"kind": "unit_demand", "data": [2, 3]}, {"kind": "unit_demand", "data": [4, 6]}]],
    "distribution": {"kind": "over_type_profiles",
                     "support": [{"weight": "1/2", "payload": [0, 0]},
                                 {"weight": "1/2", "payload": [1, 1]}]},
    "strategies": [{"0": [1, 2], "1": [2, 4]}, {"0": [2, 1], "1": [4, 2]}],
    "grid": {"step": "1/2", "max": 6},
    "checks": [{"op": "snub_expected"}, {"op": "bne"},
               {"op": "welfare_floor", "expect": {"expected_sw": 6, "expected_opt": 9}}],
}


def test_builtin_scenario_has_instance_and_bids():
    sc = catalog_scenario("ex-1.2")
    assert sc.instance.n == 2 and sc.bids == BidProfile.of([[1, 2], [2, 1]])
    assert sc.items == ("x", "y")


def test_empty_checks_give_empty_report():
    sc = parse_scenario({"instance": {"valuations": [{"kind": "additive", "data": [1]}]}, "checks": []})
    rep = run_scenario(sc)
    assert rep.checks == () and rep.ok


def test_non_monotone_table_rejected_with_witness():
    tree = {"items": ["x", "y"],
            "instance": {"valuations": [{"kind": "table", "data": {"": 0, "x": 2, "y": 0, "x,y": 1}}]}}
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(tree)
    assert "witness" in str(exc.value) and exc.value.where == "instance.valuations[0]"


@pytest.mark.parametrize("tree, where", [
    ({"instance": {"valuations": [{"kind": "table", "data": [0, "0.5", 1, 1]}]}}, "data[1]"),
    ({"instance": {"valuations": [{"kind": "additive", "data": [1]}]}, "bids": [[1, 2]]}, "bids"),
    ({"instance": {"valuations": [{"kind": "additive", "data": [1]}]}, "checks": [{"op": "nap"}]}, "checks[0]"),
    ({"instance": {"valuations": []}}, "instance"),
    ({"instance": {"valuations": [{"kind": "additive", "data": [1]}]}, "seed": "x"}, "seed"),
    ({"instance": {"valuations": [{"kind": "additive", "data": [1]}]}, "grid": {"step": 0, "max": 1}}, "grid"),
])
def test_parse_errors_name_the_field(tree, where):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(tree)
    assert where in str(exc.value)


def test_load_reports_json_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"instance": \n  {"valuations": [}\n}')
    with pytest.raises(ScenarioError) as exc:
        load_scenario(p)
    assert "line 2" in str(exc.value)
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")


def test_bayesian_scenario_runs():
    sc = parse_scenario(BAYES)
    rep = run_scenario(sc)
    assert [c.result for c in rep.checks] == ["holds"] * 3
    again = parse_scenario(json.loads(dump_scenario(sc)))
    assert again == sc


def test_overrides():
    sc = catalog_scenario("ex-1.1")
    flipped = with_overrides(sc, (1, 0), BidGrid(F(1, 2), 2))
    assert flipped.instance.tie_break == (1, 0) and flipped.grid.step == F(1, 2)
    assert run_scenario(flipped).record("welfare").value("sw") == 2


def test_every_op_is_exercised():
    extra = {
        "name": "ops", "items": ["x", "y"],
        "instance": {"valuations": [{"kind": "unit_demand", "data": [3, 2]},
                                    {"kind": "unit_demand", "data": [2, 3]}]},
        "bids": [[1, 2], [2, 1]],
        "checks": [{"op": "strong_nob"}, {"op": "flat_optimal"}, {"op": "revenue_lemma"},
                   {"op": "dynamics"}, {"op": "dominance", "bidder": 0, "item": 0, "underbid": 0},
                   {"op": "class", "class": "submodular"}, {"op": "alpha_star", "expect": 1}],
    }
    seen = {c.op for c in parse_scenario(extra).checks} | {c.op for c in parse_scenario(BAYES).checks}
    rep = run_scenario(parse_scenario(extra))
    assert rep.ok
    for name in ("ex-1.1", "ex-1.2", "app-b1", "app-d", "ex-xos-nob-inub", "prop-6.2"):
        seen |= {c.op for c in catalog_scenario(name).checks}
    assert seen >= set(OPS)


def test_precondition_maps_to_inapplicable():
    sc = parse_scenario({"instance": {"valuations": [{"kind": "additive", "data": [1]}]},
                         "checks": [{"op": "pne"}]})
    rec = run_check(sc, sc.checks[0])
    assert rec.result == "inapplicable" and "bids" in rec.witness


def test_expect_mismatch_reports_violation():
    sc = parse_scenario({"instance": {"valuations": [{"kind": "additive", "data": [1]}]},
                         "bids": [[1]], "checks": [{"op": "welfare", "expect": {"sw": 2}}]})
    rec = run_scenario(sc).checks[0]
    assert rec.result == "violated" and "sw expected 2, got 1" in rec.witness


@given(instance_and_bids())
def test_reemit_reload_identity(pair):
    inst, b = pair
    sc = Scenario("fuzz", inst, bids=b, checks=(Check("welfare", "{}", "welfare"),))
    tree = scenario_to_tree(sc)
    again = parse_scenario(json.loads(json.dumps(tree)))
    assert again == sc
    assert scenario_to_tree(again) == tree
    assert emit_report(run_scenario(again), "csv") == emit_report(run_scenario(sc), "csv")
