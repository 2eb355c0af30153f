import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from s2pa import AuctionInstance, BidProfile, ValuationSpec

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def ex11():
    """Two unit-demand bidders, values (2,1) and (1,2); each underbids on its preferred item."""
    inst = AuctionInstance((ValuationSpec.unit_demand([2, 1]), ValuationSpec.unit_demand([1, 2])))
    return inst, BidProfile.of([[0, 1], [1, 0]])


@pytest.fixture
def ex12():
    """Two unit-demand bidders, values (3,2) and (2,3), with the crossed equilibrium."""
    inst = AuctionInstance((ValuationSpec.unit_demand([3, 2]), ValuationSpec.unit_demand([2, 3])))
    return inst, BidProfile.of([[1, 2], [2, 1]])


@pytest.fixture
def appd():
    """Two submodular table bidders on items x, y, z with an sNUB but not iNUB equilibrium."""
    v1 = ValuationSpec.from_sets(3, {(0,): 5, (1,): 5, (2,): 10, (0, 1): 10, (0, 2): 15,
                                     (1, 2): 15, (0, 1, 2): 16})
    v2 = ValuationSpec.from_sets(3, {(0,): 8, (1,): 8, (2,): 15, (0, 1): 14, (0, 2): 15,
                                     (1, 2): 15, (0, 1, 2): 15})
    return AuctionInstance((v1, v2)), BidProfile.of([[3, 3, 8], [8, 8, 2]])


@pytest.fixture
def xos4():
    """Two XOS bidders on four items with a bad iNUB equilibrium."""
    v1 = ValuationSpec.xos([[2, 2, 0, 0], [0, 0, 1, 1]])
    v2 = ValuationSpec.xos([[0, 0, 2, 2], [1, 1, 0, 0]])
    return AuctionInstance((v1, v2)), BidProfile.of([[0, 0, 2, 2], [2, 2, 0, 0]])
