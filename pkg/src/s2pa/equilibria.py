"""Best responses and equilibrium verification for second-price item auctions.

Given the other bidders' bids, bidder ``i``'s payoff depends only on which
items she wins, and each item ``j`` has a fixed price ``p_j`` (the highest
competing bid). A best response is therefore a maximization over winnable
item subsets rather than over bid vectors. Against a distribution of opponent
bids the same argument reduces deviations to per-item breakpoints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .distributions import (
    BayesianAuction,
    FiniteDistribution,
    joint_profiles,
    type_marginals,
)
from .errors import BudgetExceeded, GridError, PreconditionError, ValuationError
from .mechanisms import AuctionInstance, BidProfile, run_auction
from .valuations import ValuationSpec, as_fraction, from_mask, maximizing_clause
from .welfare_opt import optimal_allocations

FILTERS = ("nob", "strong_nob", "inub", "snub")


@dataclass(frozen=True)
class BidGrid:
    """The bids ``{0, step, 2 step, ..., max_bid}``."""

    step: Fraction
    max_bid: Fraction

    def __post_init__(self):
        step, top = as_fraction(self.step), as_fraction(self.max_bid)
        if step <= 0 or top <= 0:
            raise GridError("grid step and max must be positive")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "max_bid", step * (top // step))

    @property
    def size(self) -> int:
        return int(self.max_bid / self.step) + 1

    def points(self) -> list[Fraction]:
        return [self.step * k for k in range(self.size)]

    def __contains__(self, x) -> bool:
        q = as_fraction(x) / self.step
        return q.denominator == 1 and 0 <= x <= self.max_bid

    def above(self, x: Fraction) -> Fraction | None:
        """Smallest grid point strictly greater than ``x``."""
        k = math.floor(x / self.step) + 1
        y = self.step * max(k, 0)
        return y if y <= self.max_bid else None

    def at_least(self, x: Fraction) -> Fraction | None:
        k = math.ceil(x / self.step)
        y = self.step * max(k, 0)
        return y if y <= self.max_bid else None


def default_grid(inst: AuctionInstance, divisor: int = 4) -> BidGrid:
    """Step = smallest gap between distinct bundle values / ``divisor``; max = largest value."""
    vals = sorted({x for v in inst.valuations for x in v.values})
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    top = vals[-1]
    if not gaps:
        return BidGrid(Fraction(1), Fraction(1))
    return BidGrid(min(gaps) / divisor, top)


# ---------------------------------------------------------------------------
# best responses


def _competition(b: BidProfile, i: int, rank, j: int):
    """Highest competing bid on ``j`` and whether ``i`` wins a tie at that bid."""
    opp = [b.bids[k][j] for k in range(b.n) if k != i]
    if not opp:
        return Fraction(0), True
    p = max(opp)
    tie_ok = all(rank[i] < rank[k] for k in range(b.n) if k != i and b.bids[k][j] == p)
    return p, tie_ok


@dataclass(frozen=True)
class BestResponse:
    utility: Fraction
    row: tuple[Fraction, ...]
    items: frozenset[int]


def best_response(inst: AuctionInstance, i: int, b: BidProfile,
                  grid: BidGrid | None = None) -> BestResponse:
    """Exact best-response utility of bidder ``i`` against ``b`` (row ``i`` ignored).

    Enumerates the ``2**m`` target sets ``T``; winning ``T`` costs the sum of
    its competing bids. An item is winnable on the grid if ``i`` wins the tie
    at the competing bid, or the grid has a point strictly above it. Raises
    ``GridError`` when an item that is unwinnable on the grid would make a
    strictly better response.
    """
    if inst.mechanism != "s2pa":
        raise PreconditionError("best_response is implemented for s2pa only")
    if grid is None:
        grid = default_grid(inst)
    v = inst.valuations[i]
    tab = v.values
    m = inst.m
    rank = inst.rank
    prices, bids, winnable = [], [], 0
    for j in range(m):
        p, tie_ok = _competition(b, i, rank, j)
        x = grid.at_least(p) if tie_ok else grid.above(p)
        prices.append(p)
        bids.append(x)
        if x is not None:
            winnable |= 1 << j

    best_grid, best_T, best_any = None, 0, None
    for T in range(1 << m):
        u = tab[T] - sum((prices[j] for j in from_mask(T)), Fraction(0))
        if best_any is None or u > best_any:
            best_any = u
        if T & ~winnable:
            continue
        if best_grid is None or u > best_grid:
            best_grid, best_T = u, T
    if best_any > best_grid:
        raise GridError(f"grid max {grid.max_bid} cannot realize bidder {i}'s best response")
    row = tuple(bids[j] if best_T >> j & 1 else Fraction(0) for j in range(m))
    return BestResponse(best_grid, row, from_mask(best_T))


@dataclass(frozen=True)
class PNEReport:
    holds: bool
    bidder: int | None = None
    deviation: tuple[Fraction, ...] | None = None
    gain: Fraction = Fraction(0)

    def __bool__(self):
        return self.holds


def verify_pne(inst: AuctionInstance, b: BidProfile, grid: BidGrid | None = None) -> PNEReport:
    out = run_auction(inst, b)
    for i in range(inst.n):
        br = best_response(inst, i, b, grid)
        if br.utility > out.utilities[i]:
            return PNEReport(False, i, br.row, br.utility - out.utilities[i])
    return PNEReport(True)


def naive_best_response(inst: AuctionInstance, i: int, b: BidProfile, grid: BidGrid) -> Fraction:
    """Best utility over every row in ``grid**m`` (slow reference)."""
    best = None
    for row in itertools.product(grid.points(), repeat=inst.m):
        u = run_auction(inst, b.with_row(i, row)).utilities[i]
        if best is None or u > best:
            best = u
    return best


# ---------------------------------------------------------------------------
# deviations against a distribution of opponent bids


def _best_fixed_deviation(v: ValuationSpec, i: int, rank, scenarios, grid: BidGrid,
                          budget: int = 10**6):
    """Best single row for bidder ``i`` against weighted opponent profiles.

    ``scenarios`` is a list of ``(BidProfile, weight)``. On each item the
    outcome only changes at a competing bid, so the candidate bids are zero
    plus, for every scenario, the grid point matching the competing bid (if
    ``i`` wins that tie) and the next grid point above it.
    """
    m = v.m
    tab = v.values
    comp = [[_competition(b, i, rank, j) for j in range(m)] for b, _ in scenarios]
    cands = []
    for j in range(m):
        c = {Fraction(0)}
        for k in range(len(scenarios)):
            p, _ = comp[k][j]
            for x in (grid.at_least(p), grid.above(p)):
                if x is not None:
                    c.add(x)
        cands.append(sorted(c))
    total = math.prod(len(c) for c in cands) * len(scenarios)
    if total > budget:
        raise BudgetExceeded(f"{total} deviation evaluations exceed the budget {budget}")
    best, best_row = None, None
    for row in itertools.product(*cands):
        eu = Fraction(0)
        for (b, w), cj in zip(scenarios, comp):
            mask, pay = 0, Fraction(0)
            for j in range(m):
                p, tie_ok = cj[j]
                if row[j] > p or (row[j] == p and tie_ok):
                    mask |= 1 << j
                    pay += p
            eu += w * (tab[mask] - pay)
        if best is None or eu > best:
            best, best_row = eu, row
    return best, tuple(best_row)


@dataclass(frozen=True)
class EquilibriumReport:
    holds: bool
    bidder: int | None = None
    type_index: int | None = None
    deviation: tuple[Fraction, ...] | None = None
    current: Fraction | None = None
    deviation_utility: Fraction | None = None

    def __bool__(self):
        return self.holds


def verify_cce(inst: AuctionInstance, dist: FiniteDistribution,
               grid: BidGrid | None = None) -> EquilibriumReport:
    """Coarse correlated equilibrium check for a distribution over bid profiles."""
    if inst.mechanism != "s2pa":
        raise PreconditionError("deviation breakpoints are exact for s2pa only")
    if dist.kind != "over_bid_profiles":
        raise PreconditionError("expected a distribution over bid profiles")
    if grid is None:
        grid = default_grid(inst)
    scen = [(p if isinstance(p, BidProfile) else BidProfile.of(p), w) for p, w in dist]
    for i in range(inst.n):
        cur = sum((w * run_auction(inst, b).utilities[i] for b, w in scen), Fraction(0))
        dev, row = _best_fixed_deviation(inst.valuations[i], i, inst.rank, scen, grid)
        if dev > cur:
            return EquilibriumReport(False, i, None, row, cur, dev)
    return EquilibriumReport(True)


def verify_bne(game: BayesianAuction, strategies, dist: FiniteDistribution,
               grid: BidGrid) -> EquilibriumReport:
    """Bayes-Nash check over finite types, for correlated priors and mixed strategies.

    For every bidder and every type of positive probability, the interim
    expected utility of the strategy must be at least that of every grid
    deviation, with expectations over the conditional distribution of the
    other types and over all strategy randomization.
    """
    if game.mechanism != "s2pa":
        raise PreconditionError("deviation breakpoints are exact for s2pa only")
    joint = joint_profiles(game, dist, strategies)
    rank = game.instance(dist.support[0][0]).rank
    for i in range(game.n):
        for t, pt in sorted(type_marginals(dist, i).items()):
            if pt == 0:
                continue
            cond = [(prof, b, q / pt) for prof, b, q in joint if prof[i] == t]
            if not cond:
                raise PreconditionError(f"bidder {i} type {t} has no positive-probability profile")
            cur = sum((q * run_auction(game.instance(prof), b).utilities[i]
                       for prof, b, q in cond), Fraction(0))
            scen = [(b, q) for _, b, q in cond]
            dev, row = _best_fixed_deviation(game.types[i][t], i, rank, scen, grid)
            if dev > cur:
                return EquilibriumReport(False, i, t, row, cur, dev)
    return EquilibriumReport(True)


# ---------------------------------------------------------------------------
# constructive equilibrium for XOS bidders


def construct_xos_pne(inst: AuctionInstance) -> BidProfile:
    """Each bidder bids her maximizing clause on her optimal bundle, zero elsewhere.

    Tries the optimal allocations in order and returns the first profile whose
    outcome reproduces its allocation. If none does (possible only when a
    clause puts zero on an optimal item, which then falls to the tie-break),
    the profile for the first optimal allocation is returned; its outcome is
    still optimal.
    """
    for v in inst.valuations:
        if v.kind == "table":
            from .valuations import check_class

            if not check_class(v, "xos"):
                raise PreconditionError("construct_xos_pne needs XOS valuations")
    opt = optimal_allocations(inst)
    first = None
    for Sstar in opt.maximizers:
        rows = []
        for i, S in enumerate(Sstar):
            try:
                a = maximizing_clause(inst.valuations[i], S)
            except ValuationError as exc:
                raise PreconditionError(str(exc)) from exc
            rows.append(tuple(a[j] if j in S else Fraction(0) for j in range(inst.m)))
        b = BidProfile(tuple(rows))
        if first is None:
            first = b
        if run_auction(inst, b).allocation == Sstar:
            return b
    return first


# ---------------------------------------------------------------------------
# exhaustive grid search


@dataclass(frozen=True)
class PNESearch:
    profiles: tuple[tuple[BidProfile, Fraction], ...]
    worst_ratio: Fraction | None
    pne_count: int
    searched: int

    @property
    def found(self) -> bool:
        return bool(self.profiles)

    def summary(self) -> str:
        if not self.profiles:
            return "no PNE found at this grid"
        return f"{len(self.profiles)} PNE, worst ratio {self.worst_ratio}"


def _lcm_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for x in values:
        d = d * x.denominator // math.gcd(d, x.denominator)
    return d


def enumerate_pne(inst: AuctionInstance, grid: BidGrid | None = None,
                  filters: Iterable[str] = (), budget: int = 5 * 10**6,
                  chunk: int = 1 << 15) -> PNESearch:
    """All pure equilibria on the bid grid that pass ``filters``, with welfare ratios.

    The scan is vectorized in exact integer arithmetic: values and bids are
    multiplied by the least common denominator. The grid must reach the
    largest bundle value so that grid equilibria are equilibria against all
    real-valued deviations.
    """
    filters = set(filters)
    if filters - set(FILTERS):
        raise ValueError(f"unknown filters {sorted(filters - set(FILTERS))}")
    if inst.mechanism != "s2pa":
        raise PreconditionError("enumerate_pne supports s2pa")
    if grid is None:
        grid = default_grid(inst)
    n, m = inst.n, inst.m
    tabs = [v.values for v in inst.valuations]
    if grid.max_bid < max(t[-1] for t in tabs):
        raise GridError("grid max must be at least the largest bundle value")
    G = grid.size
    R = G ** m
    total = R ** n
    if total > budget:
        raise BudgetExceeded(f"{G}^{n * m} = {total} profiles exceed the budget {budget}")

    scale = _lcm_denominator([grid.step] + [x for t in tabs for x in t])
    step_i = int(grid.step * scale)
    max_i = step_i * (G - 1)
    tab_i = np.array([[int(x * scale) for x in t] for t in tabs], dtype=np.int64)
    rows = np.array(list(itertools.product(range(G), repeat=m)), dtype=np.int64) * step_i
    rank = np.array(inst.rank, dtype=np.int64)
    subsets = np.array([[(T >> j) & 1 for T in range(1 << m)] for j in range(m)], dtype=np.int64)
    weights = (1 << np.arange(m)).astype(np.int64)
    neg = np.iinfo(np.int64).min // 4

    opt = optimal_allocations(inst)
    if opt.opt_value == 0:
        raise PreconditionError("OPT is zero; welfare ratios are undefined")
    star = np.array([[sum(1 << j for j in S) for S in alloc] for alloc in opt.maximizers],
                    dtype=np.int64)  # (k, n) optimal bundle masks
    bit = (1 << np.arange(m)).astype(np.int64)
    # strong NOB depends on a bidder's own row only
    strong_ok = [((rows @ subsets) <= tab_i[i][None, :]).all(axis=1) for i in range(n)]

    hits, welfares = [], []
    pne_count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        parts = np.unravel_index(idx, (R,) * n)
        B = np.stack([rows[p] for p in parts], axis=1)  # (c, n, m)
        key = B * n + (n - 1 - rank)[None, :, None]
        W = key.argmax(axis=1)  # (c, m)
        if n > 1:
            price = np.sort(B, axis=1)[:, -2, :]
        else:
            price = np.zeros_like(B[:, 0, :])
        ok = np.ones(len(idx), dtype=bool)
        won, val = [], []
        for i in range(n):
            wins = W == i
            mask = (wins * weights).sum(axis=1)
            won.append(mask)
            val.append(tab_i[i][mask])
            u = val[i] - (price * wins).sum(axis=1)
            others = [k for k in range(n) if k != i]
            if others:
                ob = B[:, others, :]
                p = ob.max(axis=1)
                ahead = rank[others] < rank[i]
                tie_bad = ((ob == p[:, None, :]) & ahead[None, :, None]).any(axis=1)
                winnable = ~tie_bad | (p + step_i <= max_i)
            else:
                p = np.zeros_like(B[:, 0, :])
                winnable = np.ones_like(p, dtype=bool)
            cost = p @ subsets
            blocked = (~winnable).astype(np.int64) @ subsets
            br = np.where(blocked == 0, tab_i[i][None, :] - cost, neg).max(axis=1)
            ok &= u >= br
        pne_count += int(ok.sum())
        if "nob" in filters:
            for i in range(n):
                ok &= (B[:, i, :] * ((won[i][:, None] & bit) != 0)).sum(axis=1) <= val[i]
        if "strong_nob" in filters:
            for i in range(n):
                ok &= strong_ok[i][parts[i]]
        for name in ("inub", "snub"):
            if name not in filters:
                continue
            some = np.zeros(len(idx), dtype=bool)
            for k in range(len(star)):
                every = np.ones(len(idx), dtype=bool)
                for i in range(n):
                    missing = star[k, i] & ~won[i]
                    in_missing = (missing[:, None] & bit) != 0  # (c, m)
                    if name == "snub":
                        need = tab_i[i][won[i] | star[k, i]] - val[i]
                        every &= (B[:, i, :] * in_missing).sum(axis=1) >= need
                    else:
                        need = tab_i[i][won[i][:, None] | bit[None, :]] - val[i][:, None]
                        every &= (~in_missing | (B[:, i, :] >= need)).all(axis=1)
                some |= every
            ok &= some
        for k in np.nonzero(ok)[0]:
            hits.append(B[k])
            welfares.append(int(sum(v[k] for v in val)))

    kept = []
    for arr, w in zip(hits, welfares):
        b = BidProfile(tuple(tuple(Fraction(int(x), scale) for x in row) for row in arr))
        kept.append((b, Fraction(w, scale) / opt.opt_value))
    worst = min((r for _, r in kept), default=None)
    return PNESearch(tuple(kept), worst, pne_count, total)


# ---------------------------------------------------------------------------
# dynamics


@dataclass(frozen=True)
class DynamicsResult:
    profile: BidProfile
    converged: bool
    rounds: int
    trajectory: tuple[tuple[int, int, Fraction, Fraction], ...]  # (round, bidder, before, after)


def best_response_dynamics(inst: AuctionInstance, b0: BidProfile,
                           order: Sequence[int] | None = None, max_rounds: int = 50,
                           grid: BidGrid | None = None) -> DynamicsResult:
    """Round-robin best responses until no bidder can strictly improve."""
    if grid is None:
        grid = default_grid(inst)
    order = tuple(range(inst.n)) if order is None else tuple(order)
    b = b0
    steps = []
    for rnd in range(max_rounds):
        moved = False
        for i in order:
            cur = run_auction(inst, b).utilities[i]
            br = best_response(inst, i, b, grid)
            if br.utility > cur:
                b = b.with_row(i, br.row)
                steps.append((rnd, i, cur, br.utility))
                moved = True
        if not moved:
            return DynamicsResult(b, True, rnd, tuple(steps))
    return DynamicsResult(b, False, max_rounds, tuple(steps))
