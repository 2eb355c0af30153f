"""Seeded random instances for the property suites.

Every family draws small integer values from ``random.Random(seed)`` so the
output is identical across runs and platforms. Table families are built one
cardinality level at a time, each value drawn from the interval that the
class constraints leave open given the smaller sets.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import BudgetExceeded, PreconditionError
from .mechanisms import AuctionInstance, BidProfile
from .valuations import ValuationSpec, check_class, submasks

FAMILIES = ("ud", "sm_table", "xos_clauses", "sa_table", "mon_table")
MAX_TABLE_ITEMS = 6
CLASS_OF = {
    "ud": "submodular",
    "sm_table": "submodular",
    "xos_clauses": "xos",
    "sa_table": "subadditive",
    "mon_table": "monotone",
}


def _levels(m: int):
    """Nonempty masks in order of increasing size."""
    return sorted(range(1, 1 << m), key=lambda S: (bin(S).count("1"), S))


def _bits(S: int):
    return [1 << j for j in range(S.bit_length()) if S >> j & 1]


def monotone_table(rng: random.Random, m: int, top: int = 4) -> ValuationSpec:
    tab = [0] * (1 << m)
    for S in _levels(m):
        lo = max(tab[S ^ b] for b in _bits(S))
        tab[S] = lo + rng.randint(0, top)
    return ValuationSpec.table(tab)


def subadditive_table(rng: random.Random, m: int, top: int = 4) -> ValuationSpec:
    """``v(S)`` between ``max_j v(S - j)`` and the cheapest split ``v(A) + v(S - A)``.

    The interval is never empty when the smaller sets are already
    subadditive, so no rejection is needed.
    """
    tab = [0] * (1 << m)
    for S in _levels(m):
        lo = max(tab[S ^ b] for b in _bits(S))
        splits = [tab[A] + tab[S ^ A] for A in submasks(S) if A and A != S]
        hi = min(splits, default=lo + top)
        tab[S] = rng.randint(lo, min(hi, lo + top))
    return ValuationSpec.table(tab)


def _submodular_attempt(rng, m, top):
    tab = [0] * (1 << m)
    for S in _levels(m):
        bits = _bits(S)
        lo = max(tab[S ^ b] for b in bits)
        hi = lo + top
        for x in range(len(bits)):
            for y in range(x + 1, len(bits)):
                a, b = bits[x], bits[y]
                hi = min(hi, tab[S ^ a] + tab[S ^ b] - tab[S ^ a ^ b])
        if hi < lo:
            return None
        tab[S] = rng.randint(lo, hi)
    return tab


def _budget_additive(rng, m, top):
    """Sum of capped additive functions; always submodular."""
    tab = [0] * (1 << m)
    for _ in range(2):
        w = [rng.randint(0, top) for _ in range(m)]
        cap = rng.randint(1, max(1, sum(w)))
        for S in range(1 << m):
            tab[S] += min(cap, sum(w[j] for j in range(m) if S >> j & 1))
    return tab


def submodular_table(rng: random.Random, m: int, top: int = 4, tries: int = 50) -> ValuationSpec:
    """Level-by-level draw within the local submodularity bounds.

    A draw can paint itself into a corner (upper bound below the monotone
    lower bound); it is then restarted, and after ``tries`` failures a
    budget-additive function is returned instead.
    """
    for _ in range(tries):
        tab = _submodular_attempt(rng, m, top)
        if tab is not None:
            return ValuationSpec.table(tab)
    return ValuationSpec.table(_budget_additive(rng, m, top))


def xos_valuation(rng: random.Random, m: int, top: int = 4, max_clauses: int = 3) -> ValuationSpec:
    k = rng.randint(1, max_clauses)
    return ValuationSpec.xos([[rng.randint(0, top) for _ in range(m)] for _ in range(k)])


def unit_demand(rng: random.Random, m: int, top: int = 6) -> ValuationSpec:
    return ValuationSpec.unit_demand([rng.randint(0, top) for _ in range(m)])


_MAKERS = {
    "ud": unit_demand,
    "sm_table": submodular_table,
    "xos_clauses": xos_valuation,
    "sa_table": subadditive_table,
    "mon_table": monotone_table,
}


def generate_instances(family: str, n: int, m: int, seed: int, count: int,
                       mechanism: str = "s2pa") -> list[AuctionInstance]:
    """``count`` instances of ``n`` bidders over ``m`` items, deterministic in ``seed``.

    Every valuation is checked against its family's class before it is returned.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if n < 1 or m < 1 or count < 0:
        raise PreconditionError("need n >= 1, m >= 1 and count >= 0")
    if family.endswith("_table") and m > MAX_TABLE_ITEMS:
        raise BudgetExceeded(f"table families are limited to m <= {MAX_TABLE_ITEMS}")
    rng = random.Random(seed)
    make = _MAKERS[family]
    out = []
    for _ in range(count):
        vals = tuple(make(rng, m) for _ in range(n))
        for v in vals:
            if not check_class(v, CLASS_OF[family]):
                raise AssertionError(f"generator produced a non-{CLASS_OF[family]} valuation")
        out.append(AuctionInstance(vals, mechanism))
    return out


def random_bids(rng: random.Random, n: int, m: int, top: int = 6, denominator: int = 1) -> BidProfile:
    """Uniform bids from ``{0, 1/d, ..., top}``."""
    return BidProfile(tuple(
        tuple(Fraction(rng.randint(0, top * denominator), denominator) for _ in range(m))
        for _ in range(n)
    ))
