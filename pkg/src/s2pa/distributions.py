"""Finite distributions, Bayesian type spaces and strategy profiles."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .errors import PreconditionError
from .mechanisms import AuctionInstance, BidProfile
from .valuations import ValuationSpec, as_fraction

DIST_KINDS = ("over_bid_profiles", "over_type_profiles", "over_bid_rows")


@dataclass(frozen=True)
class FiniteDistribution:
    """Explicit probability table; probabilities are exact and sum to one."""

    support: tuple[tuple[Any, Fraction], ...]
    kind: str = "over_type_profiles"

    def __post_init__(self):
        if self.kind not in DIST_KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        sup = tuple((payload, as_fraction(p)) for payload, p in self.support)
        if not sup:
            raise PreconditionError("distribution support is empty")
        if any(p < 0 for _, p in sup):
            raise PreconditionError("probabilities must be nonnegative")
        if sum(p for _, p in sup) != 1:
            raise PreconditionError("probabilities must sum to exactly 1")
        object.__setattr__(self, "support", sup)

    @classmethod
    def point(cls, payload, kind="over_type_profiles") -> "FiniteDistribution":
        return cls(((payload, Fraction(1)),), kind)

    @classmethod
    def uniform(cls, payloads: Sequence, kind="over_type_profiles") -> "FiniteDistribution":
        k = len(payloads)
        return cls(tuple((p, Fraction(1, k)) for p in payloads), kind)

    def __iter__(self):
        return iter(self.support)

    def expectation(self, f) -> Fraction:
        return sum((p * f(x) for x, p in self.support), Fraction(0))


@dataclass(frozen=True)
class BayesianAuction:
    """Per-bidder finite type spaces sharing one mechanism and tie-break.

    A type profile is a tuple of type indices, one per bidder.
    """

    types: tuple[tuple[ValuationSpec, ...], ...]
    mechanism: str = "s2pa"
    tie_break: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(tuple(t) for t in self.types))

    @property
    def n(self) -> int:
        return len(self.types)

    @property
    def m(self) -> int:
        return self.types[0][0].m

    def instance(self, type_profile: Sequence[int]) -> AuctionInstance:
        return AuctionInstance(
            tuple(self.types[i][t] for i, t in enumerate(type_profile)),
            self.mechanism,
            self.tie_break,
        )


# A strategy maps a bidder's type index to a bid row or to a distribution over rows.
Strategy = Mapping[int, Any]


def row_distribution(action) -> FiniteDistribution:
    if isinstance(action, FiniteDistribution):
        return action
    return FiniteDistribution.point(tuple(as_fraction(x) for x in action), "over_bid_rows")


def check_type_distribution(game: BayesianAuction, dist: FiniteDistribution) -> None:
    if dist.kind != "over_type_profiles":
        raise PreconditionError("expected a distribution over type profiles")
    for prof, _ in dist:
        if len(prof) != game.n or any(not 0 <= t < len(game.types[i]) for i, t in enumerate(prof)):
            raise PreconditionError(f"type profile {prof} is out of range")


def joint_profiles(game: BayesianAuction, dist: FiniteDistribution,
                   strategies: Sequence[Strategy]):
    """Expand types and mixed strategies into ``(type_profile, bids, prob)`` triples.

    Strategy randomization is independent across bidders given the types.
    """
    check_type_distribution(game, dist)
    out = []
    for prof, p in dist:
        if p == 0:
            continue
        per_bidder = []
        for i, t in enumerate(prof):
            if t not in strategies[i]:
                raise PreconditionError(f"strategy of bidder {i} is undefined at type {t}")
            per_bidder.append(row_distribution(strategies[i][t]).support)
        for combo in itertools.product(*per_bidder):
            q = p
            for _, qi in combo:
                q *= qi
            if q:
                out.append((tuple(prof), BidProfile(tuple(r for r, _ in combo)), q))
    return out


def type_marginals(dist: FiniteDistribution, i: int) -> dict[int, Fraction]:
    marg = defaultdict(Fraction)
    for prof, p in dist:
        marg[prof[i]] += p
    return dict(marg)
