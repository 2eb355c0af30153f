"""Simultaneous item auctions: allocation, prices, payments and utilities.

Every item is sold in its own sealed-bid auction. The highest bid wins; ties go
to the bidder that comes first in the instance's tie-break order. Under
``s2pa`` the winner pays the highest competing bid, under ``s1pa`` her own bid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, PreconditionError
from .valuations import ValuationSpec, as_fraction, from_mask, to_mask, validate

MECHANISMS = ("s2pa", "s1pa")


@dataclass(frozen=True)
class AuctionInstance:
    valuations: tuple[ValuationSpec, ...]
    mechanism: str = "s2pa"
    tie_break: tuple[int, ...] | None = None

    def __post_init__(self):
        vals = tuple(self.valuations)
        object.__setattr__(self, "valuations", vals)
        if not vals:
            raise DimensionError("an auction needs at least one bidder")
        if len({v.m for v in vals}) != 1:
            raise DimensionError("all valuations must be over the same items")
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        order = tuple(range(len(vals))) if self.tie_break is None else tuple(self.tie_break)
        if sorted(order) != list(range(len(vals))):
            raise DimensionError(f"tie_break {order} is not an order over {len(vals)} bidders")
        object.__setattr__(self, "tie_break", order)
        for v in vals:
            validate(v)

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return self.valuations[0].m

    @property
    def rank(self) -> tuple[int, ...]:
        """``rank[i]`` is bidder ``i``'s position in the tie-break order (0 = favoured)."""
        r = [0] * self.n
        for pos, i in enumerate(self.tie_break):
            r[i] = pos
        return tuple(r)

    def with_valuations(self, valuations) -> "AuctionInstance":
        return AuctionInstance(tuple(valuations), self.mechanism, self.tie_break)


@dataclass(frozen=True)
class BidProfile:
    bids: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.bids)
        if not rows or len({len(r) for r in rows}) != 1:
            raise DimensionError("bid profile must be a non-empty n x m matrix")
        if any(x < 0 for r in rows for x in r):
            raise PreconditionError("bids must be nonnegative")
        object.__setattr__(self, "bids", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "BidProfile":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def zeros(cls, n: int, m: int) -> "BidProfile":
        return cls(((Fraction(0),) * m,) * n)

    @property
    def n(self) -> int:
        return len(self.bids)

    @property
    def m(self) -> int:
        return len(self.bids[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.bids[i][j]

    def with_row(self, i: int, row) -> "BidProfile":
        rows = list(self.bids)
        rows[i] = tuple(row)
        return BidProfile(tuple(rows))

    def scaled(self, c) -> "BidProfile":
        c = as_fraction(c)
        return BidProfile(tuple(tuple(c * x for x in r) for r in self.bids))


@dataclass(frozen=True)
class Outcome:
    allocation: tuple[frozenset[int], ...]
    winners: tuple[int, ...]
    item_prices: tuple[Fraction, ...]
    payments: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    utilities: tuple[Fraction, ...] = field(repr=False)
    welfare: Fraction = Fraction(0)
    revenue: Fraction = Fraction(0)


def _check_dims(inst: AuctionInstance, b: BidProfile) -> None:
    if (b.n, b.m) != (inst.n, inst.m):
        raise DimensionError(f"bid profile is {b.n}x{b.m}, instance is {inst.n}x{inst.m}")


def item_winner(column: Sequence[Fraction], rank: Sequence[int]) -> int:
    top = max(column)
    return min((i for i, x in enumerate(column) if x == top), key=lambda i: rank[i])


def run_auction(inst: AuctionInstance, b: BidProfile) -> Outcome:
    _check_dims(inst, b)
    n, m = inst.n, inst.m
    rank = inst.rank
    winners, prices = [], []
    masks = [0] * n
    for j in range(m):
        col = [b.bids[i][j] for i in range(n)]
        w = item_winner(col, rank)
        winners.append(w)
        masks[w] |= 1 << j
        if inst.mechanism == "s1pa":
            prices.append(col[w])
        else:
            prices.append(max((col[k] for k in range(n) if k != w), default=Fraction(0)))
    payments = [Fraction(0)] * n
    for j, w in enumerate(winners):
        payments[w] += prices[j]
    vals = tuple(inst.valuations[i]._mask_value(masks[i]) for i in range(n))
    utils = tuple(vals[i] - payments[i] for i in range(n))
    return Outcome(
        allocation=tuple(from_mask(s) for s in masks),
        winners=tuple(winners),
        item_prices=tuple(prices),
        payments=tuple(payments),
        values=vals,
        utilities=utils,
        welfare=sum(vals, Fraction(0)),
        revenue=sum(payments, Fraction(0)),
    )


def utility(inst: AuctionInstance, b: BidProfile, i: int) -> Fraction:
    return run_auction(inst, b).utilities[i]


def won_items_excluding(inst: AuctionInstance, b: BidProfile, i: int, j: int) -> frozenset[int]:
    """Items other than ``j`` that bidder ``i`` wins, ties broken as in the auction."""
    _check_dims(inst, b)
    rank = inst.rank
    return frozenset(
        k for k in range(inst.m)
        if k != j and item_winner([row[k] for row in b.bids], rank) == i
    )


def as_allocation(Sstar, n: int, m: int) -> tuple[frozenset[int], ...]:
    """Validate that ``Sstar`` partitions the items among ``n`` bidders."""
    parts = tuple(frozenset(s) for s in Sstar)
    if len(parts) != n:
        raise PreconditionError(f"allocation has {len(parts)} bundles for {n} bidders")
    seen = 0
    for s in parts:
        mask = to_mask(s, m)
        if mask & seen:
            raise PreconditionError("allocation bundles overlap")
        seen |= mask
    if seen != (1 << m) - 1:
        raise PreconditionError("allocation leaves items unassigned")
    return parts


def assignment_of(allocation, m: int) -> tuple[int, ...]:
    owner = [None] * m
    for i, s in enumerate(allocation):
        for j in s:
            owner[j] = i
    return tuple(owner)


def allocation_of(assignment: Sequence[int], n: int) -> tuple[frozenset[int], ...]:
    return tuple(frozenset(j for j, o in enumerate(assignment) if o == i) for i in range(n))


@dataclass(frozen=True)
class LemmaCheck:
    holds: bool
    revenue: Fraction
    lost_optimal_bids: Fraction
    slack: Fraction


def check_revenue_bids_lemma(inst: AuctionInstance, b: BidProfile, Sstar) -> LemmaCheck:
    """Revenue is at least the bids each bidder places on optimal items she lost.

    Holds for every S2PA bid profile and every welfare-maximizing ``Sstar``.
    """
    if inst.mechanism != "s2pa":
        raise PreconditionError("the revenue/bids inequality is stated for s2pa")
    parts = as_allocation(Sstar, inst.n, inst.m)
    out = run_auction(inst, b)
    lost = sum(
        (b.bids[i][j] for i in range(inst.n) for j in parts[i] - out.allocation[i]),
        Fraction(0),
    )
    slack = out.revenue - lost
    return LemmaCheck(slack >= 0, out.revenue, lost, slack)
