from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import outcome, spec_table
from strategies import instance_and_bids
from s2pa import AuctionInstance, BidProfile, ValuationSpec, optimal_allocations, run_auction, utility
from s2pa.errors import DimensionError, PreconditionError
from s2pa.mechanisms import as_allocation, check_revenue_bids_lemma, won_items_excluding


def test_crossed_equilibrium_outcome(ex12):
    inst, b = ex12
    out = run_auction(inst, b)
    assert out.allocation == (frozenset({1}), frozenset({0}))
    assert out.item_prices == (1, 1)
    assert out.welfare == 4 and out.revenue == 2
    assert out.utilities == (1, 1)


def test_single_bidder_pays_nothing():
    inst = AuctionInstance((ValuationSpec.additive([1, 2]),))
    out = run_auction(inst, BidProfile.of([[F(1, 3), 5]]))
    assert out.allocation == (frozenset({0, 1}),)
    assert out.revenue == 0 and out.welfare == 3


def test_overbid_profile_outcome():
    inst = AuctionInstance((ValuationSpec.unit_demand([2, 1]), ValuationSpec.unit_demand([1, 2])))
    out = run_auction(inst, BidProfile.of([[1, 100], [100, 1]]))
    assert out.allocation == (frozenset({1}), frozenset({0}))
    assert out.welfare == 2 and out.revenue == 2


def test_first_price_pays_own_bid(ex12):
    inst, b = ex12
    inst1 = AuctionInstance(inst.valuations, "s1pa")
    out = run_auction(inst1, b)
    assert out.item_prices == (2, 2) and out.revenue == 4


def test_tie_break_order():
    vals = (ValuationSpec.additive([1]), ValuationSpec.additive([1]))
    b = BidProfile.of([[1], [1]])
    assert run_auction(AuctionInstance(vals), b).winners == (0,)
    assert run_auction(AuctionInstance(vals, tie_break=(1, 0)), b).winners == (1,)


def test_dimension_and_sign_errors(ex12):
    inst, _ = ex12
    with pytest.raises(DimensionError):
        run_auction(inst, BidProfile.of([[1, 2, 3], [1, 2, 3]]))
    with pytest.raises(PreconditionError):
        BidProfile.of([[1, -1], [0, 0]])
    with pytest.raises(DimensionError):
        AuctionInstance(inst.valuations, tie_break=(0, 0))
    with pytest.raises(ValueError):
        AuctionInstance(inst.valuations, mechanism="vcg")


def test_won_items_excluding(ex11, appd):
    inst, b = ex11
    assert won_items_excluding(inst, b, 0, 0) == {1}
    inst, b = appd
    assert won_items_excluding(inst, b, 0, 0) == {2}
    one = AuctionInstance((ValuationSpec.additive([1]), ValuationSpec.additive([2])))
    assert won_items_excluding(one, BidProfile.of([[1], [0]]), 0, 0) == frozenset()


def test_revenue_bids_lemma_examples(ex11, ex12):
    inst, b = ex12
    rep = check_revenue_bids_lemma(inst, b, optimal_allocations(inst).first)
    assert rep.holds and rep.revenue == 2 and rep.lost_optimal_bids == 2 and rep.slack == 0
    inst, b = ex11
    rep = check_revenue_bids_lemma(inst, b, optimal_allocations(inst).first)
    assert rep.holds and rep.revenue == 0 and rep.lost_optimal_bids == 0
    zero = check_revenue_bids_lemma(inst, BidProfile.zeros(2, 2), optimal_allocations(inst).first)
    assert zero.holds and zero.slack == 0


def test_lemma_rejects_non_partition(ex12):
    inst, b = ex12
    with pytest.raises(PreconditionError):
        check_revenue_bids_lemma(inst, b, ({0}, {0}))
    with pytest.raises(PreconditionError):
        as_allocation(({0}, set()), 2, 2)


# -- properties -------------------------------------------------------------------

@given(instance_and_bids(), st.sampled_from(["s2pa", "s1pa"]))
def test_outcome_matches_oracle(pair, mech):
    inst, b = pair
    inst = AuctionInstance(inst.valuations, mech, inst.tie_break)
    tabs = [spec_table(v) for v in inst.valuations]
    owner, price, utils, sw, rev = outcome(tabs, [list(r) for r in b.bids], inst.tie_break, mech)
    out = run_auction(inst, b)
    assert list(out.winners) == owner
    assert list(out.item_prices) == price
    assert list(out.utilities) == utils
    assert (out.welfare, out.revenue) == (sw, rev)


@given(instance_and_bids())
def test_allocation_partitions_items(pair):
    inst, b = pair
    out = run_auction(inst, b)
    seen = set()
    for S in out.allocation:
        assert not S & seen
        seen |= S
    assert seen == set(range(inst.m))


@given(instance_and_bids(), st.sampled_from(["s2pa", "s1pa"]))
def test_price_bound(pair, mech):
    inst, b = pair
    inst = AuctionInstance(inst.valuations, mech, inst.tie_break)
    out = run_auction(inst, b)
    for j, w in enumerate(out.winners):
        if mech == "s2pa":
            assert out.item_prices[j] <= b[w, j]
        else:
            assert out.item_prices[j] == b[w, j]


@given(instance_and_bids(), st.fractions(min_value=F(1, 10), max_value=10))
def test_scaling_keeps_allocation(pair, c):
    inst, b = pair
    assert run_auction(inst, b).allocation == run_auction(inst, b.scaled(c)).allocation


@given(instance_and_bids())
def test_utilities_sum(pair):
    inst, b = pair
    out = run_auction(inst, b)
    assert sum(out.utilities, F(0)) == out.welfare - out.revenue
    assert all(utility(inst, b, i) == out.utilities[i] for i in range(inst.n))


@given(instance_and_bids())
def test_revenue_bids_lemma_fuzz(pair):
    inst, b = pair
    for Sstar in optimal_allocations(inst).maximizers:
        assert check_revenue_bids_lemma(inst, b, Sstar).holds
