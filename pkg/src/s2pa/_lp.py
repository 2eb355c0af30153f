"""Exact rational simplex for packing LPs.

Only the case needed by the XOS membership test is supported:

    maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,

so the origin is always feasible and no phase one is required. Bland's rule
guarantees termination; all arithmetic is on ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class UnboundedLP(ArithmeticError):
    pass


def maximize_packing(
    c: Sequence[Fraction],
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
) -> tuple[Fraction, list[Fraction]]:
    """Return ``(optimum, x)`` for ``max c.x s.t. A x <= b, x >= 0``."""
    n = len(c)
    rows = len(A)
    if any(bi < 0 for bi in b):
        raise ValueError("right-hand side must be nonnegative")
    # tableau rows: [A | I | b]; objective row holds reduced costs -c
    width = n + rows + 1
    T = []
    for r in range(rows):
        row = [Fraction(v) for v in A[r]] + [Fraction(0)] * rows + [Fraction(b[r])]
        row[n + r] = Fraction(1)
        T.append(row)
    obj = [-Fraction(v) for v in c] + [Fraction(0)] * (rows + 1)
    basis = [n + r for r in range(rows)]

    while True:
        # Bland: smallest index with negative reduced cost enters
        enter = next((k for k in range(width - 1) if obj[k] < 0), None)
        if enter is None:
            break
        best = None
        leave = None
        for r in range(rows):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            raise UnboundedLP("objective is unbounded")
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        T[leave] = prow
        for r in range(rows):
            f = T[r][enter]
            if r != leave and f != 0:
                T[r] = [v - f * p for v, p in zip(T[r], prow)]
        f = obj[enter]
        obj = [v - f * p for v, p in zip(obj, prow)]
        basis[leave] = enter

    x = [Fraction(0)] * n
    for r, k in enumerate(basis):
        if k < n:
            x[k] = T[r][-1]
    return obj[-1], x
