"""Hypothesis strategies for valuations, instances and bid profiles."""

from fractions import Fraction

from hypothesis import strategies as st

from s2pa import AuctionInstance, BidProfile, ValuationSpec


@st.composite
def monotone_tables(draw, m=None, top=4):
    """Random normalized monotone table: each set adds a nonnegative step over its largest subset."""
    m = draw(st.integers(1, 3)) if m is None else m
    tab = [0] * (1 << m)
    for S in sorted(range(1, 1 << m), key=lambda s: bin(s).count("1")):
        lo = max(tab[S ^ (1 << j)] for j in range(m) if S >> j & 1)
        tab[S] = lo + draw(st.integers(0, top))
    return ValuationSpec.table(tab)


def xos_specs(m, top=4):
    clause = st.lists(st.integers(0, top), min_size=m, max_size=m)
    return st.lists(clause, min_size=1, max_size=3).map(ValuationSpec.xos)


def unit_demand_specs(m, top=5):
    return st.lists(st.integers(0, top), min_size=m, max_size=m).map(ValuationSpec.unit_demand)


def additive_specs(m, top=4):
    return st.lists(st.integers(0, top), min_size=m, max_size=m).map(ValuationSpec.additive)


def any_spec(m):
    return st.one_of(monotone_tables(m), xos_specs(m), unit_demand_specs(m), additive_specs(m))


@st.composite
def instances(draw, n=None, m=None, spec=any_spec, mechanism="s2pa"):
    n = draw(st.integers(1, 3)) if n is None else n
    m = draw(st.integers(1, 3)) if m is None else m
    vals = tuple(draw(spec(m)) for _ in range(n))
    order = draw(st.permutations(range(n)))
    return AuctionInstance(vals, mechanism, tuple(order))


def bids_for(inst, top=6, denominator=2):
    x = st.integers(0, top * denominator).map(lambda k: Fraction(k, denominator))
    row = st.lists(x, min_size=inst.m, max_size=inst.m)
    return st.lists(row, min_size=inst.n, max_size=inst.n).map(BidProfile.of)


@st.composite
def instance_and_bids(draw, **kw):
    inst = draw(instances(**kw))
    return inst, draw(bids_for(inst))
