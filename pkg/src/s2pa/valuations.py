"""Exact set-function valuations over ``m`` items.

Items are the integers ``0..m-1``. Item sets may be passed as any iterable of
item indices; internally they are bitmasks. All values are ``Fraction``.

Four representations are supported:

* ``additive``     -- one nonnegative value per item, ``v(S) = sum_{j in S} a_j``
* ``unit_demand``  -- one value per item, ``v(S) = max_{j in S} v_j``
* ``xos``          -- a list of additive clauses, ``v(S) = max_l a_l(S)``
* ``table``        -- all ``2**m`` values, indexed by bitmask
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from ._lp import maximize_packing
from .errors import BudgetExceeded, ItemIndexError, ValuationError

KINDS = ("additive", "unit_demand", "xos", "table")
CLASSES = ("monotone", "subadditive", "submodular", "xos")

# table materialization limit, and the default limit for pairwise/LP checks
MAX_TABLE_ITEMS = 16
MAX_CLASS_ITEMS = 6
MAX_ALPHA_ITEMS = 10


def as_fraction(x) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to ``Fraction``.

    Floats are refused: every quantity in the package is exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise ValueError(f"decimal literal {x!r} is not allowed; use p/q")
        return Fraction(s)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def to_mask(items: Iterable[int], m: int) -> int:
    mask = 0
    for j in items:
        if not 0 <= j < m:
            raise ItemIndexError(f"item {j} out of range for m={m}")
        mask |= 1 << j
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


def submasks(mask: int):
    """Yield every submask of ``mask`` in increasing numeric order."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class ValuationSpec:
    kind: str
    data: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValuationError(f"unknown valuation kind {self.kind!r}")
        if self.kind == "xos":
            clauses = tuple(tuple(as_fraction(a) for a in c) for c in self.data)
            if not clauses:
                raise ValuationError("xos valuation needs at least one clause")
            if len({len(c) for c in clauses}) != 1:
                raise ValuationError("xos clauses must all have length m")
            object.__setattr__(self, "data", clauses)
            flat = [a for c in clauses for a in c]
        else:
            vals = tuple(as_fraction(a) for a in self.data)
            object.__setattr__(self, "data", vals)
            flat = list(vals)
        if any(a < 0 for a in flat):
            raise ValuationError("valuation entries must be nonnegative")
        if self.kind == "table":
            size = len(self.data)
            if size < 2 or size & (size - 1):
                raise ValuationError("table needs 2**m entries with m >= 1")
            _check_table(self.data)
        elif self.m < 1:
            raise ValuationError("valuation needs m >= 1 items")

    # -- constructors ---------------------------------------------------
    @classmethod
    def additive(cls, values: Sequence) -> "ValuationSpec":
        return cls("additive", tuple(values))

    @classmethod
    def unit_demand(cls, values: Sequence) -> "ValuationSpec":
        return cls("unit_demand", tuple(values))

    @classmethod
    def xos(cls, clauses: Sequence[Sequence]) -> "ValuationSpec":
        return cls("xos", tuple(tuple(c) for c in clauses))

    @classmethod
    def table(cls, values: Sequence) -> "ValuationSpec":
        return cls("table", tuple(values))

    @classmethod
    def from_sets(cls, m: int, values: dict) -> "ValuationSpec":
        """Build a table from ``{item-set: value}``; missing sets must not exist."""
        tab = [None] * (1 << m)
        tab[0] = Fraction(0)
        for S, val in values.items():
            tab[to_mask(S, m)] = val
        if any(t is None for t in tab):
            missing = [sorted(from_mask(k)) for k, t in enumerate(tab) if t is None]
            raise ValuationError(f"table is missing sets {missing}")
        return cls.table(tab)

    @classmethod
    def by_cardinality(cls, m: int, values: Sequence) -> "ValuationSpec":
        """Symmetric table: ``values[k-1]`` is the value of every k-item set."""
        if len(values) != m:
            raise ValuationError("need one value per cardinality 1..m")
        vals = [Fraction(0)] + [as_fraction(v) for v in values]
        return cls.table([vals[_popcount(S)] for S in range(1 << m)])

    # -- evaluation -----------------------------------------------------
    @property
    def m(self) -> int:
        if self.kind == "table":
            return len(self.data).bit_length() - 1
        if self.kind == "xos":
            return len(self.data[0])
        return len(self.data)

    @cached_property
    def values(self) -> tuple[Fraction, ...]:
        """Dense table of all ``2**m`` values indexed by bitmask."""
        m = self.m
        if self.kind == "table":
            return self.data
        if m > MAX_TABLE_ITEMS:
            raise BudgetExceeded(f"m={m} exceeds the table budget {MAX_TABLE_ITEMS}")
        size = 1 << m
        if self.kind == "additive":
            return _additive_table(self.data, size)
        if self.kind == "unit_demand":
            tab = [Fraction(0)] * size
            for S in range(1, size):
                low = (S & -S).bit_length() - 1
                tab[S] = max(tab[S & (S - 1)], self.data[low])
            return tuple(tab)
        best = _additive_table(self.data[0], size)
        for clause in self.data[1:]:
            best = tuple(max(x, y) for x, y in zip(best, _additive_table(clause, size)))
        return best

    def _mask_value(self, mask: int) -> Fraction:
        if self.kind == "table":
            return self.data[mask]
        if self.m <= 12:
            return self.values[mask]
        items = from_mask(mask)
        if self.kind == "additive":
            return sum((self.data[j] for j in items), Fraction(0))
        if self.kind == "unit_demand":
            return max((self.data[j] for j in items), default=Fraction(0))
        return max(sum((c[j] for j in items), Fraction(0)) for c in self.data)

    def __call__(self, S) -> Fraction:
        return self._mask_value(to_mask(S, self.m))


def _additive_table(a, size):
    tab = [Fraction(0)] * size
    for S in range(1, size):
        low = (S & -S).bit_length() - 1
        tab[S] = tab[S & (S - 1)] + a[low]
    return tuple(tab)


def _check_table(tab) -> None:
    if tab[0] != 0:
        raise ValuationError("table is not normalized: v(empty) != 0", witness=(frozenset(), None))
    m = len(tab).bit_length() - 1
    for S in range(len(tab)):
        for j in range(m):
            bit = 1 << j
            if not S & bit and tab[S] > tab[S | bit]:
                raise ValuationError(
                    f"table is not monotone: v({sorted(from_mask(S))}) > "
                    f"v({sorted(from_mask(S | bit))})",
                    witness=(from_mask(S), from_mask(S | bit)),
                )


def validate(v: ValuationSpec) -> None:
    """Raise ``ValuationError`` unless ``v`` is normalized and monotone.

    Table specs are validated on construction; the other kinds are monotone by
    construction, and this pass confirms it on the materialized table.
    """
    _check_table(v.values)


def value(v: ValuationSpec, S) -> Fraction:
    return v(S)


def marginal(v: ValuationSpec, T, S) -> Fraction:
    """``v(T | S) = v(S u T) - v(S)``."""
    m = v.m
    s = to_mask(S, m)
    return v._mask_value(s | to_mask(T, m)) - v._mask_value(s)


# ---------------------------------------------------------------------------
# class membership


@dataclass(frozen=True)
class ClassCheck:
    cls: str
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


def _budget(v, max_items):
    if v.m > max_items:
        raise BudgetExceeded(f"m={v.m} exceeds the enumeration budget {max_items}")


def check_class(v: ValuationSpec, cls: str, max_items: int = MAX_CLASS_ITEMS) -> ClassCheck:
    """Decide membership of ``v`` in a valuation class by exhaustive enumeration.

    Witnesses on failure:

    * monotone: ``(S, T)`` with ``S`` a subset of ``T`` and ``v(S) > v(T)``
    * submodular: ``(S, T, j)`` with ``v(j|S) < v(j|T)``
    * subadditive: ``(S, T)`` disjoint with ``v(S) + v(T) < v(S u T)``
    * xos: ``(S, best)`` where ``best`` is the largest ``a(S)`` over additive
      ``a`` bounded by ``v`` everywhere, strictly below ``v(S)``
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    if cls == "xos" and v.kind != "table":
        return ClassCheck(cls, True)
    if cls in ("submodular", "subadditive") and v.kind in ("additive", "unit_demand"):
        return ClassCheck(cls, True)
    _budget(v, max_items)
    tab = v.values
    m = v.m
    full = (1 << m) - 1

    if cls == "monotone":
        try:
            _check_table(tab)
        except ValuationError as exc:
            return ClassCheck(cls, False, exc.witness)
        return ClassCheck(cls, True)

    if cls == "submodular":
        for S in range(full + 1):
            for j in range(m):
                bj = 1 << j
                if S & bj:
                    continue
                mj = tab[S | bj] - tab[S]
                for k in range(m):
                    bk = 1 << k
                    if S & bk or k == j:
                        continue
                    T = S | bk
                    if tab[T | bj] - tab[T] > mj:
                        return ClassCheck(cls, False, (from_mask(S), from_mask(T), j))
        return ClassCheck(cls, True)

    if cls == "subadditive":
        for U in range(1, full + 1):
            for S in submasks(U):
                T = U ^ S
                if S and T and S < T and tab[S] + tab[T] < tab[U]:
                    return ClassCheck(cls, False, (from_mask(S), from_mask(T)))
        return ClassCheck(cls, True)

    for S in range(1, full + 1):
        best, _ = _support_lp(tab, S)
        if best < tab[S]:
            return ClassCheck(cls, False, (from_mask(S), best))
    return ClassCheck(cls, True)


def _support_lp(tab, S):
    """Max of ``a(S)`` over additive ``a >= 0`` with ``a(T) <= v(T)`` for ``T <= S``.

    Coordinates outside ``S`` are zero, which is without loss by monotonicity.
    """
    items = sorted(from_mask(S))
    rows, rhs = [], []
    for T in submasks(S):
        if T:
            rows.append([Fraction(1) if T >> j & 1 else Fraction(0) for j in items])
            rhs.append(tab[T])
    opt, x = maximize_packing([Fraction(1)] * len(items), rows, rhs)
    return opt, dict(zip(items, x))


def supporting_clause(v: ValuationSpec, S) -> tuple[Fraction, ...]:
    """An additive ``a <= v`` with ``a(S) = v(S)``; raises if none exists."""
    if v.kind != "table":
        return maximizing_clause(v, S)
    return _supporting_clause_mask(v, to_mask(S, v.m))


def _supporting_clause_mask(v, mask):
    m = v.m
    if mask == 0:
        return (Fraction(0),) * m
    _budget(v, MAX_CLASS_ITEMS)
    best, x = _support_lp(v.values, mask)
    if best < v.values[mask]:
        raise ValuationError(f"no supporting additive clause at {sorted(from_mask(mask))}",
                             witness=(from_mask(mask), best))
    return tuple(x.get(j, Fraction(0)) for j in range(m))


def xos_clauses(v: ValuationSpec, max_items: int = MAX_CLASS_ITEMS) -> ValuationSpec:
    """Rewrite an XOS-verifiable valuation as an explicit clause list."""
    if v.kind == "xos":
        return v
    if v.kind == "additive":
        return ValuationSpec.xos([v.data])
    if v.kind == "unit_demand":
        m = v.m
        return ValuationSpec.xos(
            [tuple(v.data[j] if k == j else 0 for k in range(m)) for j in range(m)])
    _budget(v, max_items)
    seen = {}
    for S in range(1, 1 << v.m):
        seen.setdefault(_supporting_clause_mask(v, S), None)
    return ValuationSpec.xos(list(seen))


def maximizing_clause(v: ValuationSpec, S) -> tuple[Fraction, ...]:
    """Return an additive clause ``a`` with ``a(S) = v(S)`` and ``a <= v``.

    For ``xos`` specs this is the first clause attaining the maximum. Additive
    specs are their own clause; a unit-demand spec yields the singleton clause
    of its best item in ``S``. Tables go through the supporting LP.
    """
    m = v.m
    mask = to_mask(S, m)
    items = from_mask(mask)
    if v.kind == "xos":
        return max(v.data, key=lambda c: sum((c[j] for j in items), Fraction(0)))
    if v.kind == "additive":
        return v.data
    if v.kind == "unit_demand":
        zero = [Fraction(0)] * m
        if items:
            best = max(sorted(items), key=lambda j: v.data[j])
            zero[best] = v.data[best]
        return tuple(zero)
    return _supporting_clause_mask(v, mask)


# ---------------------------------------------------------------------------
# alpha-submodularity


@dataclass(frozen=True)
class AlphaCertificate:
    alpha_star: Fraction
    witness: tuple | None  # (S, T, j)


def alpha_star(v: ValuationSpec, max_items: int = MAX_ALPHA_ITEMS) -> AlphaCertificate:
    """Largest alpha with ``v(j|S) >= alpha * v(j|T)`` for all ``S <= T``, ``j`` not in ``T``.

    Pairs with ``v(j|T) = 0`` impose nothing; the result is clamped to [0, 1].
    """
    _budget(v, max_items)
    tab = v.values
    m = v.m
    best = Fraction(1)
    witness = None
    for T in range(1 << m):
        for j in range(m):
            bj = 1 << j
            if T & bj:
                continue
            d = tab[T | bj] - tab[T]
            if d <= 0:
                continue
            for S in submasks(T):
                r = (tab[S | bj] - tab[S]) / d
                if r < best:
                    best = r
                    witness = (from_mask(S), from_mask(T), j)
                    if r == 0:
                        return AlphaCertificate(best, witness)
    return AlphaCertificate(best, witness)


def permutation_supports(v: ValuationSpec, perms: Iterable[Sequence[int]]) -> list[tuple[Fraction, ...]]:
    """Prefix-marginal additive vectors, one per item permutation.

    For permutation ``l``, coordinate ``j`` is ``v(j | items before j in l)``,
    so the vector sums to ``v(S)`` on every prefix ``S`` of ``l``.
    """
    m = v.m
    out = []
    for perm in perms:
        perm = tuple(perm)
        if sorted(perm) != list(range(m)):
            raise ItemIndexError(f"{perm} is not a permutation of range({m})")
        a = [Fraction(0)] * m
        prefix = 0
        for j in perm:
            a[j] = v._mask_value(prefix | 1 << j) - v._mask_value(prefix)
            prefix |= 1 << j
        out.append(tuple(a))
    return out


def prefix_clause(v: ValuationSpec, S) -> tuple[Fraction, ...]:
    """Permutation support for the order that lists ``S`` first (ascending)."""
    mask = to_mask(S, v.m)
    first = sorted(from_mask(mask))
    rest = [j for j in range(v.m) if j not in first]
    return permutation_supports(v, [first + rest])[0]


def all_permutations(m: int):
    return itertools.permutations(range(m))
