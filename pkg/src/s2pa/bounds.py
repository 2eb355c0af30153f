"""Certificate checks for smoothness and revenue guarantees, and the welfare floors they imply.

All checks are evaluated on explicit profiles or finite distributions, never
symbolically. Reports distinguish a violated inequality from an inapplicable
one whose hypotheses fail on the given input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bid_properties import check_nob, check_snub
from .distributions import BayesianAuction, FiniteDistribution, joint_profiles
from .equilibria import verify_pne
from .errors import DimensionError, PreconditionError, ValuationError
from .mechanisms import AuctionInstance, BidProfile, as_allocation, run_auction
from .valuations import as_fraction, check_class, maximizing_clause, prefix_clause
from .welfare_opt import OptResult, optimal_allocations

HOLDS, VIOLATED, INAPPLICABLE = "holds", "violated", "inapplicable"


@dataclass(frozen=True)
class GuaranteeParams:
    """Smoothness ``(lam, mu)`` and revenue-guarantee ``(gamma, delta)``; either pair may be absent."""

    lam: Fraction | None = None
    mu: Fraction | None = None
    gamma: Fraction | None = None
    delta: Fraction | None = None

    def __post_init__(self):
        for name in ("lam", "mu", "gamma", "delta"):
            x = getattr(self, name)
            if x is not None:
                x = as_fraction(x)
                if x < 0:
                    raise ValueError(f"{name} must be nonnegative")
                object.__setattr__(self, name, x)
        if (self.lam is None) != (self.mu is None):
            raise ValueError("lam and mu must be given together")
        if (self.gamma is None) != (self.delta is None):
            raise ValueError("gamma and delta must be given together")

    @property
    def smooth(self) -> bool:
        return self.lam is not None

    @property
    def revenue(self) -> bool:
        return self.gamma is not None


def poa_bound(params: GuaranteeParams) -> Fraction:
    """Welfare fraction guaranteed by the certificates that are present."""
    if params.smooth and params.revenue:
        return (params.lam + params.gamma) / (1 + params.mu + params.delta)
    if params.smooth:
        return params.lam / (1 + params.mu)
    if params.revenue:
        return params.gamma / (1 + params.delta)
    raise PreconditionError("no certificate parameters given")


@dataclass(frozen=True)
class CertificateReport:
    name: str
    status: str
    slack: Fraction | None = None  # smallest lhs - rhs over the applicable inputs
    witness: int | None = None  # index of the first violating input
    checked: int = 0
    applicable: int = 0

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def __bool__(self):
        return self.holds


def _fold(name, results) -> CertificateReport:
    """Fold per-input ``(applicable, slack)`` pairs into one report."""
    slack, witness, checked, applicable = None, None, 0, 0
    for k, (ok, s) in enumerate(results):
        checked += 1
        if not ok:
            continue
        applicable += 1
        if slack is None or s < slack:
            slack = s
        if s < 0 and witness is None:
            witness = k
    if applicable == 0:
        status = INAPPLICABLE
    else:
        status = VIOLATED if witness is not None else HOLDS
    return CertificateReport(name, status, slack, witness, checked, applicable)


def _opt(inst, opt):
    return optimal_allocations(inst) if opt is None else opt


def check_revenue_guarantee(inst: AuctionInstance, profiles: Iterable[BidProfile], gamma, delta,
                            opt: OptResult | None = None) -> CertificateReport:
    """``revenue(b) >= gamma * OPT - delta * SW(b)`` on every listed profile.

    ``delta`` is deliberately not capped at 1.
    """
    if inst.mechanism != "s2pa":
        raise PreconditionError("revenue guarantees are checked for s2pa")
    gamma, delta = as_fraction(gamma), as_fraction(delta)
    opt = _opt(inst, opt)

    def one(b):
        out = run_auction(inst, b)
        return True, out.revenue - (gamma * opt.opt_value - delta * out.welfare)

    return _fold("revenue_guarantee", (one(b) for b in profiles))


def deviation_utilities(inst: AuctionInstance, b: BidProfile, deviation) -> tuple[Fraction, ...]:
    """``u_i(b*_i, b_-i)`` for each bidder."""
    rows = tuple(tuple(as_fraction(x) for x in r) for r in deviation)
    if len(rows) != inst.n or any(len(r) != inst.m for r in rows):
        raise DimensionError("deviation must have one row of m bids per bidder")
    return tuple(run_auction(inst, b.with_row(i, rows[i])).utilities[i] for i in range(inst.n))


def check_smoothness_at(inst: AuctionInstance, b: BidProfile, deviation, lam, mu,
                        opt: OptResult | None = None) -> CertificateReport:
    """``sum_i u_i(b*_i, b_-i) >= lam * OPT - mu * SW(b)`` at one profile."""
    lam, mu = as_fraction(lam), as_fraction(mu)
    opt = _opt(inst, opt)
    lhs = sum(deviation_utilities(inst, b, deviation), Fraction(0))
    rhs = lam * opt.opt_value - mu * run_auction(inst, b).welfare
    return _fold("smoothness", [(True, lhs - rhs)])


def _clause_rows(inst, Sstar, clause):
    if Sstar is None:
        Sstar = optimal_allocations(inst).first
    parts = as_allocation(Sstar, inst.n, inst.m)
    rows = []
    for v, S in zip(inst.valuations, parts):
        a = clause(v, S)
        rows.append(tuple(a[j] if j in S else Fraction(0) for j in range(inst.m)))
    return tuple(rows)


def xos_deviation(inst: AuctionInstance, Sstar=None) -> tuple[tuple[Fraction, ...], ...]:
    """Bid the maximizing clause on the optimal bundle and zero elsewhere."""
    def clause(v, S):
        try:
            return maximizing_clause(v, S)
        except ValuationError as exc:
            raise PreconditionError(f"no supporting clause: {exc}") from exc

    return _clause_rows(inst, Sstar, clause)


def prefix_deviation(inst: AuctionInstance, Sstar=None) -> tuple[tuple[Fraction, ...], ...]:
    """Like :func:`xos_deviation` but with the permutation-prefix clause tight on the bundle.

    Works for any monotone table; the clause is within a factor ``alpha`` of
    the valuation when the valuation is alpha-submodular.
    """
    return _clause_rows(inst, Sstar, prefix_clause)


def check_welfare_floor(inst: AuctionInstance, profiles: Iterable[BidProfile], gamma, delta,
                        opt: OptResult | None = None) -> CertificateReport:
    """``SW(b) >= gamma / (1 + delta) * OPT`` wherever its hypotheses hold.

    A profile is applicable when its utilities sum to a nonnegative number and
    it meets the revenue guarantee for ``(gamma, delta)``.
    """
    gamma, delta = as_fraction(gamma), as_fraction(delta)
    opt = _opt(inst, opt)
    floor = gamma / (1 + delta) * opt.opt_value

    def one(b):
        out = run_auction(inst, b)
        ok = (sum(out.utilities, Fraction(0)) >= 0
              and out.revenue >= gamma * opt.opt_value - delta * out.welfare)
        return ok, out.welfare - floor

    return _fold("welfare_floor", (one(b) for b in profiles))


@dataclass(frozen=True)
class Expectations:
    welfare: Fraction
    opt: Fraction
    revenue: Fraction
    utilities: Fraction


def expectations(game: BayesianAuction, dist: FiniteDistribution, strategies) -> Expectations:
    """Expected welfare, optimum, revenue and total utility under a strategy profile."""
    opts = {}
    sw = rev = ut = Fraction(0)
    for prof, b, q in joint_profiles(game, dist, strategies):
        inst = game.instance(prof)
        out = run_auction(inst, b)
        sw += q * out.welfare
        rev += q * out.revenue
        ut += q * sum(out.utilities, Fraction(0))
    for prof, p in dist:
        if prof not in opts:
            opts[prof] = optimal_allocations(game.instance(prof)).opt_value
    eopt = sum((p * opts[prof] for prof, p in dist), Fraction(0))
    return Expectations(sw, eopt, rev, ut)


def check_welfare_floor_expected(game: BayesianAuction, dist: FiniteDistribution, strategies,
                                 gamma, delta) -> CertificateReport:
    """``E[SW] >= gamma / (1 + delta) * E[OPT]`` given the expected-form hypotheses.

    The type distribution may be correlated.
    """
    gamma, delta = as_fraction(gamma), as_fraction(delta)
    e = expectations(game, dist, strategies)
    ok = e.utilities >= 0 and e.revenue >= gamma * e.opt - delta * e.welfare
    return _fold("welfare_floor_expected", [(ok, e.welfare - gamma / (1 + delta) * e.opt)])


TWO_THIRDS = Fraction(2, 3)


def subadditive_composed_check(inst: AuctionInstance, b: BidProfile, grid=None) -> CertificateReport:
    """Equilibria with strong no-overbidding and set no-underbidding reach 2/3 of OPT.

    Inapplicable unless every valuation is subadditive and ``b`` is a PNE
    passing both bid conditions.
    """
    opt = optimal_allocations(inst)
    ok = (all(check_class(v, "subadditive") for v in inst.valuations)
          and bool(verify_pne(inst, b, grid))
          and bool(check_nob(inst, b, strong=True))
          and bool(check_snub(inst, b, opt.maximizers)))
    return _fold("subadditive_two_thirds",
                 [(ok, run_auction(inst, b).welfare - TWO_THIRDS * opt.opt_value)])


__all__ = [
    "GuaranteeParams",
    "CertificateReport",
    "poa_bound",
    "check_revenue_guarantee",
    "check_smoothness_at",
    "deviation_utilities",
    "xos_deviation",
    "prefix_deviation",
    "check_welfare_floor",
    "check_welfare_floor_expected",
    "expectations",
    "subadditive_composed_check",
]
