"""Exact welfare maximization with the full list of optimal allocations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExceeded, PreconditionError
from .mechanisms import AuctionInstance, BidProfile, allocation_of, assignment_of, run_auction
from .valuations import ValuationSpec, check_class

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class OptResult:
    opt_value: Fraction
    maximizers: tuple[tuple[frozenset[int], ...], ...]
    explored: int

    @property
    def first(self) -> tuple[frozenset[int], ...]:
        return self.maximizers[0]


@lru_cache(maxsize=4096)
def _structure(v: ValuationSpec) -> str:
    """Coarsest known class of ``v``: 'submodular', 'subadditive' or 'monotone'."""
    if v.kind in ("additive", "unit_demand"):
        return "submodular"
    if v.m > 6:
        return "subadditive" if v.kind == "xos" else "monotone"
    if check_class(v, "submodular"):
        return "submodular"
    if v.kind == "xos" or check_class(v, "subadditive"):
        return "subadditive"
    return "monotone"


def bound_mode(inst: AuctionInstance) -> str:
    kinds = {_structure(v) for v in inst.valuations}
    if kinds == {"submodular"}:
        return "submodular"
    if "monotone" in kinds:
        return "none"
    return "subadditive"


def _check_budget(inst, budget):
    if inst.n ** inst.m > budget:
        raise BudgetExceeded(f"n^m = {inst.n}^{inst.m} exceeds the budget {budget}")


def optimal_allocations(inst: AuctionInstance, budget: int = DEFAULT_BUDGET,
                        method: str = "bnb") -> OptResult:
    """Optimal welfare and every allocation attaining it.

    ``method="bnb"`` runs a depth-first item-by-item assignment. Partial
    assignments are pruned against an upper bound on the welfare the
    remaining items can add: ``sum_j max_i v_i(j | S_i)`` when every
    valuation is submodular, ``sum_j max_i v_i({j})`` when every valuation is
    subadditive, and no pruning otherwise. Pruning is strict so that ties with
    the incumbent survive. ``method="naive"`` scans all ``n**m`` assignments.

    Maximizers are listed in lexicographic order of their item-to-bidder
    assignment vectors.
    """
    _check_budget(inst, budget)
    if method == "naive":
        return _naive(inst)
    if method != "bnb":
        raise ValueError(f"unknown method {method!r}")
    n, m = inst.n, inst.m
    tabs = [v.values for v in inst.valuations]
    mode = bound_mode(inst)
    singles = [max(tabs[i][1 << j] for i in range(n)) for j in range(m)]
    # suffix sums of single-item maxima
    tail = [Fraction(0)] * (m + 1)
    for j in range(m - 1, -1, -1):
        tail[j] = tail[j + 1] + singles[j]

    best = [Fraction(-1)]
    found: list[tuple[int, ...]] = []
    explored = [0]
    masks = [0] * n
    assign = [0] * m

    def upper(j, current):
        if mode == "subadditive":
            return current + tail[j]
        total = current
        for k in range(j, m):
            bit = 1 << k
            total += max(tabs[i][masks[i] | bit] - tabs[i][masks[i]] for i in range(n))
        return total

    def dfs(j, current):
        explored[0] += 1
        if j == m:
            if current > best[0]:
                best[0] = current
                found.clear()
            if current == best[0]:
                found.append(tuple(assign))
            return
        if mode != "none" and upper(j, current) < best[0]:
            return
        bit = 1 << j
        for i in range(n):
            old = masks[i]
            masks[i] = old | bit
            assign[j] = i
            dfs(j + 1, current + tabs[i][old | bit] - tabs[i][old])
            masks[i] = old

    dfs(0, Fraction(0))
    found.sort()
    return OptResult(best[0], tuple(allocation_of(a, n) for a in found), explored[0])


def _naive(inst: AuctionInstance) -> OptResult:
    n, m = inst.n, inst.m
    best = None
    found = []
    count = 0
    for assign in itertools.product(range(n), repeat=m):
        count += 1
        alloc = allocation_of(assign, n)
        sw = sum((inst.valuations[i](alloc[i]) for i in range(n)), Fraction(0))
        if best is None or sw > best:
            best, found = sw, [assign]
        elif sw == best:
            found.append(assign)
    return OptResult(best, tuple(allocation_of(a, n) for a in sorted(found)), count)


def allocation_welfare(inst: AuctionInstance, allocation) -> Fraction:
    return sum((inst.valuations[i](s) for i, s in enumerate(allocation)), Fraction(0))


def welfare_ratio(inst: AuctionInstance, b: BidProfile, opt: OptResult | None = None) -> Fraction:
    """``SW(b, v) / OPT(v)`` as an exact rational."""
    if opt is None:
        opt = optimal_allocations(inst)
    if opt.opt_value == 0:
        raise PreconditionError("OPT is zero; the welfare ratio is undefined")
    return run_auction(inst, b).welfare / opt.opt_value


__all__ = [
    "OptResult",
    "optimal_allocations",
    "welfare_ratio",
    "allocation_welfare",
    "bound_mode",
    "assignment_of",
]
