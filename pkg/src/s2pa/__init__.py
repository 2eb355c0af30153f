"""Exact analysis of simultaneous second-price item auctions.

Valuations, auction outcomes, optimal welfare, bidding conditions
(overbidding and underbidding), equilibrium verification, smoothness and
revenue-guarantee certificates, and a scenario runner with a command line.
All arithmetic uses ``fractions.Fraction``.
"""

from .errors import (
    BudgetExceeded,
    DimensionError,
    GridError,
    ItemIndexError,
    PreconditionError,
    S2PAError,
    ValuationError,
)
from .valuations import ValuationSpec, alpha_star, check_class, marginal, value
from .mechanisms import AuctionInstance, BidProfile, Outcome, run_auction, utility
from .welfare_opt import optimal_allocations, welfare_ratio
from .distributions import BayesianAuction, FiniteDistribution
from .bid_properties import check_inub, check_nob, check_snub, check_snub_expected
from .equilibria import (
    BidGrid,
    best_response,
    construct_xos_pne,
    enumerate_pne,
    verify_bne,
    verify_cce,
    verify_pne,
)
from .bounds import GuaranteeParams, poa_bound

__version__ = "0.1.0"
