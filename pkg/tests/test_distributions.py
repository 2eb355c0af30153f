from fractions import Fraction as F

import pytest

from s2pa import BayesianAuction, BidProfile, FiniteDistribution, ValuationSpec, check_snub
from s2pa.bid_properties import check_snub_expected
from s2pa.distributions import joint_profiles, type_marginals
from s2pa.errors import PreconditionError

UD1, UD2 = ValuationSpec.unit_demand([3, 2]), ValuationSpec.unit_demand([2, 3])


def test_distribution_validation():
    with pytest.raises(PreconditionError):
        FiniteDistribution(())
    with pytest.raises(PreconditionError):
        FiniteDistribution((((0,), F(1, 2)),))
    with pytest.raises(PreconditionError):
        FiniteDistribution((((0,), F(3, 2)), ((1,), F(-1, 2))))
    with pytest.raises(ValueError):
        FiniteDistribution.point((0,), kind="over_weather")


def test_expectation_and_marginals():
    d = FiniteDistribution((((0, 0), F(1, 3)), ((0, 1), F(1, 6)), ((1, 1), F(1, 2))))
    assert d.expectation(lambda p: sum(p)) == F(1, 6) + 1
    assert type_marginals(d, 0) == {0: F(1, 2), 1: F(1, 2)}
    assert type_marginals(d, 1) == {0: F(1, 3), 1: F(2, 3)}


def test_joint_profiles_mix_strategies():
    game = BayesianAuction(((UD1,), (UD2,)))
    mixed = FiniteDistribution.uniform([(1, 2), (0, 0)], kind="over_bid_rows")
    joint = joint_profiles(game, FiniteDistribution.point((0, 0)), [{0: mixed}, {0: (2, 1)}])
    assert [q for _, _, q in joint] == [F(1, 2), F(1, 2)]
    assert joint[1][1] == BidProfile.of([[0, 0], [2, 1]])


def test_undefined_strategy_and_bad_profile():
    game = BayesianAuction(((UD1,), (UD2,)))
    with pytest.raises(PreconditionError):
        joint_profiles(game, FiniteDistribution.point((0, 0)), [{}, {0: (0, 0)}])
    with pytest.raises(PreconditionError):
        joint_profiles(game, FiniteDistribution.point((0, 3)), [{0: (0, 0)}, {0: (0, 0)}])


def test_expected_snub_point_mass(ex12, ex11):
    for inst, b in (ex12, ex11):
        game = BayesianAuction(tuple((v,) for v in inst.valuations))
        strategies = [{0: b.bids[i]} for i in range(2)]
        rep = check_snub_expected(game, FiniteDistribution.point((0, 0)), strategies)
        assert bool(rep) == bool(check_snub(inst, b))


def test_expected_snub_two_good_profiles():
    game = BayesianAuction(((UD1, ValuationSpec.unit_demand([6, 4])),
                            (UD2, ValuationSpec.unit_demand([4, 6]))))
    dist = FiniteDistribution.uniform([(0, 0), (1, 1)])
    strategies = [{0: (1, 2), 1: (2, 4)}, {0: (2, 1), 1: (4, 2)}]
    assert check_snub_expected(game, dist, strategies)


def test_expected_snub_averages_out():
    # bidder 0 underbids on x in one branch and overbids in the other; only the average clears
    game = BayesianAuction(((UD1,), (UD2,)))
    dist = FiniteDistribution.point((0, 0))
    low = BidProfile.of([[F(1, 2), 2], [2, 1]])
    high = BidProfile.of([[F(3, 2), 2], [2, 1]])
    assert not check_snub(game.instance((0, 0)), low)
    assert check_snub(game.instance((0, 0)), high)
    mix = FiniteDistribution.uniform([low.bids[0], high.bids[0]], kind="over_bid_rows")
    assert check_snub_expected(game, dist, [{0: mix}, {0: (2, 1)}])
