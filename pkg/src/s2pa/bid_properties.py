"""Checkers for bid-profile conditions: over- and underbidding.

``NOB``   -- no bidder's bids on her won set exceed its value (strong: any set).
``iNUB``  -- for some optimal allocation, each bidder bids at least her marginal
             value on every optimal item she does not win.
``sNUB``  -- same, summed over the missing optimal set against its set marginal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .distributions import BayesianAuction, FiniteDistribution, joint_profiles, type_marginals
from .errors import BudgetExceeded, PreconditionError
from .mechanisms import (
    AuctionInstance,
    BidProfile,
    Outcome,
    as_allocation,
    run_auction,
    won_items_excluding,
)
from .valuations import as_fraction, from_mask, marginal
from .welfare_opt import optimal_allocations

PROPERTIES = ("nob", "strong_nob", "inub", "snub", "snub_expected")


@dataclass(frozen=True)
class Violation:
    bidder: int
    items: frozenset[int] | int
    required: Fraction
    actual: Fraction
    allocation: int | None = None  # index into the maximizer list


@dataclass(frozen=True)
class PropertyReport:
    property: str
    holds: bool
    witness_allocation: tuple[frozenset[int], ...] | None = None
    violations: tuple[Violation, ...] = ()

    def __bool__(self):
        return self.holds


def check_nob(inst: AuctionInstance, b: BidProfile, strong: bool = False,
              max_items: int = 16) -> PropertyReport:
    """No overbidding on the won set, or (``strong``) on every set."""
    out = run_auction(inst, b)
    viol = []
    for i, v in enumerate(inst.valuations):
        row = b.bids[i]
        if not strong:
            S = out.allocation[i]
            total = sum((row[j] for j in S), Fraction(0))
            if total > out.values[i]:
                viol.append(Violation(i, S, out.values[i], total))
            continue
        if inst.m > max_items:
            raise BudgetExceeded(f"strong NOB enumerates 2^{inst.m} sets")
        tab = v.values
        sums = [Fraction(0)] * len(tab)
        for S in range(1, len(tab)):
            low = (S & -S).bit_length() - 1
            sums[S] = sums[S & (S - 1)] + row[low]
            if sums[S] > tab[S]:
                viol.append(Violation(i, from_mask(S), tab[S], sums[S]))
                break
    return PropertyReport("strong_nob" if strong else "nob", not viol, None, tuple(viol))


def _maximizers(inst, maximizers):
    if maximizers is None:
        maximizers = optimal_allocations(inst).maximizers
    maximizers = tuple(as_allocation(S, inst.n, inst.m) for S in maximizers)
    if not maximizers:
        raise PreconditionError("the maximizer list is empty")
    return maximizers


def _inub_violations(inst, b, out: Outcome, Sstar, k):
    viol = []
    for i, v in enumerate(inst.valuations):
        won = out.allocation[i]
        for j in sorted(Sstar[i] - won):
            need = marginal(v, {j}, won)
            if b.bids[i][j] < need:
                viol.append(Violation(i, j, need, b.bids[i][j], k))
    return viol


def _snub_violations(inst, b, out: Outcome, Sstar, k):
    viol = []
    for i, v in enumerate(inst.valuations):
        won = out.allocation[i]
        missing = Sstar[i] - won
        if not missing:
            continue
        need = marginal(v, missing, won)
        have = sum((b.bids[i][j] for j in missing), Fraction(0))
        if have < need:
            viol.append(Violation(i, frozenset(missing), need, have, k))
    return viol


def _existential(name, finder, inst, b, maximizers, shared):
    maximizers = _maximizers(inst, maximizers)
    out = run_auction(inst, b)
    per_alloc = [finder(inst, b, out, S, k) for k, S in enumerate(maximizers)]
    for k, viol in enumerate(per_alloc):
        if not viol:
            return PropertyReport(name, True, maximizers[k])
    if not shared:
        # each bidder may pick her own optimal allocation
        ok = all(
            any(all(x.bidder != i for x in viol) for viol in per_alloc)
            for i in range(inst.n)
        )
        if ok:
            return PropertyReport(name, True, None)
    return PropertyReport(name, False, None, tuple(x for viol in per_alloc for x in viol))


def check_inub(inst: AuctionInstance, b: BidProfile, maximizers=None,
               shared: bool = True) -> PropertyReport:
    """Item no-underbidding against some welfare-maximizing allocation.

    With ``shared=False`` each bidder may be certified by a different optimal
    allocation; the default requires one allocation for all bidders.
    """
    return _existential("inub", _inub_violations, inst, b, maximizers, shared)


def check_snub(inst: AuctionInstance, b: BidProfile, maximizers=None,
               shared: bool = True) -> PropertyReport:
    """Set no-underbidding against some welfare-maximizing allocation."""
    return _existential("snub", _snub_violations, inst, b, maximizers, shared)


def is_item_underbid(inst: AuctionInstance, b: BidProfile, i: int, j: int) -> bool:
    others = won_items_excluding(inst, b, i, j)
    return b.bids[i][j] < marginal(inst.valuations[i], {j}, others)


@dataclass(frozen=True)
class DominanceReport:
    holds: bool
    marginal_bid: Fraction
    underbid: Fraction
    strict_witness: tuple[Fraction, ...]
    strict_gain: Fraction
    probes: tuple[tuple[tuple[Fraction, ...], Fraction, Fraction], ...]  # (column, u_marginal, u_under)
    counterexample: tuple[Fraction, ...] | None = None


def dominance_check(inst: AuctionInstance, b: BidProfile, i: int, j: int, b_under,
                    probes=()) -> DominanceReport:
    """Confirm that an underbid on item ``j`` is weakly dominated by the marginal bid.

    ``b`` fixes the bids on all items other than ``j`` (its column ``j`` is
    ignored). Each probe is a full column of bids on ``j``; entry ``i`` is
    replaced by the bid under test. Besides the supplied probes, every
    opponent is tried alone at the breakpoints ``0``, ``b_under``, the
    midpoint, ``w`` and ``w + 1`` where ``w`` is the marginal bid.
    """
    if inst.mechanism != "s2pa":
        raise PreconditionError("dominance of the marginal bid is an s2pa statement")
    if inst.n < 2:
        raise PreconditionError("need at least one opponent on item j")
    b_under = as_fraction(b_under)
    w = marginal(inst.valuations[i], {j}, won_items_excluding(inst, b, i, j))
    if not b_under < w:
        raise PreconditionError(f"bid {b_under} is not an underbid (marginal is {w})")

    def with_column(col, own):
        rows = [list(r) for r in b.bids]
        for k in range(inst.n):
            rows[k][j] = own if k == i else col[k]
        return BidProfile.of(rows)

    def utilities(col):
        return (run_auction(inst, with_column(col, w)).utilities[i],
                run_auction(inst, with_column(col, b_under)).utilities[i])

    mid = b_under + (w - b_under) / 2
    cols = [tuple(Fraction(0) for _ in range(inst.n))]
    for l in range(inst.n):
        if l == i:
            continue
        for x in (b_under, mid, w, w + 1):
            col = [Fraction(0)] * inst.n
            col[l] = x
            cols.append(tuple(col))
    cols.extend(tuple(as_fraction(x) for x in c) for c in probes)

    records = []
    counter = None
    for col in cols:
        uw, uu = utilities(col)
        records.append((col, uw, uu))
        if uu > uw and counter is None:
            counter = col
    # strict witness from the case analysis: one opponent bids strictly between
    opp = next(l for l in range(inst.n) if l != i)
    witness = [Fraction(0)] * inst.n
    witness[opp] = mid
    uw, uu = utilities(witness)
    return DominanceReport(
        holds=counter is None and uw > uu,
        marginal_bid=w,
        underbid=b_under,
        strict_witness=tuple(witness),
        strict_gain=uw - uu,
        probes=tuple(records),
        counterexample=counter,
    )


def construct_flat_optimal_profile(inst: AuctionInstance, Sstar) -> BidProfile:
    """Each bidder spreads the value of her optimal bundle evenly over it.

    The profile wins every optimal bundle of positive value for its owner,
    satisfies NOB with equality, and satisfies sNUB because nobody misses an
    optimal item. Items in zero-value optimal bundles get zero bids everywhere
    and fall to the tie-break; welfare is still optimal by monotonicity.
    """
    parts = as_allocation(Sstar, inst.n, inst.m)
    rows = []
    for i, S in enumerate(parts):
        share = inst.valuations[i](S) / len(S) if S else Fraction(0)
        rows.append(tuple(share if j in S else Fraction(0) for j in range(inst.m)))
    return BidProfile(tuple(rows))


def check_snub_expected(game: BayesianAuction, dist: FiniteDistribution,
                        strategies) -> PropertyReport:
    """sNUB in expectation, conditioned on each bidder's own type.

    For each type profile the optimal allocation is fixed to the first
    maximizer in lexicographic order. For every bidder ``i`` and every type
    with positive probability, the conditional expectation (over the other
    types and all strategy randomization) of the bids on the missing optimal
    set must be at least that of its set marginal.
    """
    joint = joint_profiles(game, dist, strategies)
    cache = {}
    lhs: dict[tuple[int, int], Fraction] = {}
    rhs: dict[tuple[int, int], Fraction] = {}
    for prof, b, q in joint:
        if prof not in cache:
            cache[prof] = optimal_allocations(game.instance(prof)).first
        inst = game.instance(prof)
        Sstar = cache[prof]
        out = run_auction(inst, b)
        for i in range(game.n):
            won = out.allocation[i]
            missing = Sstar[i] - won
            key = (i, prof[i])
            lhs[key] = lhs.get(key, Fraction(0)) + q * sum((b.bids[i][j] for j in missing), Fraction(0))
            rhs[key] = rhs.get(key, Fraction(0)) + q * marginal(inst.valuations[i], missing, won)
    viol = []
    for i in range(game.n):
        for t, pt in sorted(type_marginals(dist, i).items()):
            if pt == 0:
                continue
            key = (i, t)
            need, have = rhs.get(key, Fraction(0)) / pt, lhs.get(key, Fraction(0)) / pt
            if have < need:
                viol.append(Violation(i, t, need, have))
    return PropertyReport("snub_expected", not viol, None, tuple(viol))

