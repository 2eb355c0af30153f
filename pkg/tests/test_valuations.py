import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import (brute_alpha, is_monotone, is_subadditive, is_submodular, is_xos,
                     spec_table, table_from_raw)
from strategies import any_spec, monotone_tables, xos_specs
from s2pa import ValuationSpec, alpha_star, check_class, marginal, value
from s2pa.errors import BudgetExceeded, ItemIndexError, ValuationError
from s2pa.valuations import (maximizing_clause, permutation_supports, prefix_clause,
                             supporting_clause, xos_clauses)

B1 = ValuationSpec.by_cardinality(3, [1, 1, F(3, 2)])
B2 = ValuationSpec.by_cardinality(3, [2, 3, 5])
D1 = ValuationSpec.from_sets(3, {(0,): 5, (1,): 5, (2,): 10, (0, 1): 10, (0, 2): 15,
                                 (1, 2): 15, (0, 1, 2): 16})
XOS1 = ValuationSpec.xos([[2, 2, 0, 0], [0, 0, 1, 1]])
XOS2 = ValuationSpec.xos([[0, 0, 2, 2], [1, 1, 0, 0]])


# -- value / marginal ---------------------------------------------------------

def test_unit_demand_takes_best_item():
    assert value(ValuationSpec.unit_demand([2, 1]), {0, 1}) == 2


def test_empty_set_is_zero():
    for v in (B1, D1, XOS1, ValuationSpec.unit_demand([3, 1])):
        assert value(v, set()) == 0


def test_xos_value_on_last_two_items():
    assert value(XOS1, {2, 3}) == 2


def test_marginal_of_pair_given_z():
    assert marginal(D1, {0, 1}, {2}) == 6


def test_empty_marginal_is_zero():
    assert marginal(D1, set(), {0}) == 0


def test_identical_items_zero_marginal():
    assert marginal(B1, {1}, {0}) == 0


def test_out_of_range_item():
    with pytest.raises(ItemIndexError):
        value(D1, {3})
    with pytest.raises(ItemIndexError):
        marginal(D1, {5}, set())


def test_rejects_non_monotone_table_with_witness():
    with pytest.raises(ValuationError) as exc:
        ValuationSpec.table([0, 2, 0, 1])
    assert exc.value.witness == (frozenset({0}), frozenset({0, 1}))


def test_rejects_bad_inputs():
    with pytest.raises(ValuationError):
        ValuationSpec.table([1, 2])
    with pytest.raises(ValuationError):
        ValuationSpec.table([0, 1, 2])
    with pytest.raises(ValuationError):
        ValuationSpec.additive([1, -1])
    with pytest.raises(ValuationError):
        ValuationSpec.xos([])
    with pytest.raises(ValuationError):
        ValuationSpec.from_sets(2, {(0,): 1})
    with pytest.raises(ValueError):
        ValuationSpec.additive(["0.5"])
    with pytest.raises(TypeError):
        ValuationSpec.additive([0.5])


# -- classes --------------------------------------------------------------------

def test_identical_items_table_is_xos_not_submodular():
    assert check_class(B1, "xos")
    assert not check_class(B1, "submodular")


def test_half_alpha_table_not_xos():
    rep = check_class(B2, "xos")
    assert not rep
    assert rep.witness[0] == frozenset({0, 1, 2})


def test_additive_is_submodular():
    assert check_class(ValuationSpec.additive([1, 2, 3]), "submodular")


def test_unknown_class():
    with pytest.raises(ValueError):
        check_class(B1, "concave")


def test_class_budget():
    big = ValuationSpec.table([0] + [1] * ((1 << 7) - 1))
    with pytest.raises(BudgetExceeded):
        check_class(big, "xos")
    with pytest.raises(BudgetExceeded):
        alpha_star(ValuationSpec.additive([1] * 11))


def test_submodular_witness_shape():
    rep = check_class(B1, "submodular")
    S, T, j = rep.witness
    assert S <= T and j not in T
    assert marginal(B1, {j}, S) < marginal(B1, {j}, T)


# -- alpha --------------------------------------------------------------------

def test_alpha_identical_items():
    cert = alpha_star(B1)
    assert cert.alpha_star == 0
    S, T, j = cert.witness
    assert len(S) == 1 and len(T) == 2 and S <= T and j not in T


def test_alpha_additive_is_one():
    cert = alpha_star(ValuationSpec.additive([1, 2, 3]))
    assert cert.alpha_star == 1 and cert.witness is None


def test_alpha_half():
    assert alpha_star(B2).alpha_star == F(1, 2)
    assert brute_alpha(spec_table(B2), 3) == F(1, 2)


# -- clauses ----------------------------------------------------------------------

def test_additive_permutation_support_is_itself():
    v = ValuationSpec.additive([1, 2, 3])
    assert permutation_supports(v, [(2, 0, 1)]) == [(1, 2, 3)]


def test_prefix_marginals():
    assert permutation_supports(D1, [(0, 1, 2), (2, 0, 1)]) == [(5, 5, 6), (5, 1, 10)]


def test_bad_permutation():
    with pytest.raises(ItemIndexError):
        permutation_supports(D1, [(0, 0, 1)])


def test_maximizing_clause_examples():
    assert maximizing_clause(XOS1, {0, 1}) == (2, 2, 0, 0)
    assert maximizing_clause(XOS2, {2, 3}) == (0, 0, 2, 2)
    c = maximizing_clause(XOS1, set())
    assert c in XOS1.data


def test_unit_demand_clause():
    assert maximizing_clause(ValuationSpec.unit_demand([3, 2]), {0, 1}) == (3, 0)


def test_supporting_clause_for_xos_table():
    a = supporting_clause(B1, {0, 1, 2})
    assert sum(a) == F(3, 2)
    with pytest.raises(ValuationError):
        supporting_clause(B2, {0, 1, 2})


def test_xos_clauses_roundtrip():
    v = xos_clauses(B1)
    assert spec_table(v) == spec_table(B1)


# -- properties -------------------------------------------------------------------

@given(st.integers(1, 3).flatmap(any_spec))
def test_generated_specs_normalized_monotone(v):
    t = spec_table(v)
    assert is_monotone(t)


@given(st.integers(1, 3).flatmap(lambda m: st.lists(st.lists(st.integers(0, 4), min_size=m, max_size=m),
                                                    min_size=1, max_size=3)))
def test_xos_table_matches_raw(clauses):
    m = len(clauses[0])
    assert spec_table(ValuationSpec.xos(clauses)) == table_from_raw("xos", clauses, m)


@given(monotone_tables(m=3))
def test_class_checks_match_definitions(v):
    t = spec_table(v)
    assert bool(check_class(v, "monotone")) is True
    assert bool(check_class(v, "submodular")) == is_submodular(t, 3)
    assert bool(check_class(v, "subadditive")) == is_subadditive(t)
    assert bool(check_class(v, "xos")) == is_xos(t, 3)


@given(monotone_tables())
def test_hierarchy(v):
    chain = ["submodular", "xos", "subadditive", "monotone"]
    held = [bool(check_class(v, c)) for c in chain]
    for a, b in zip(held, held[1:]):
        assert not a or b


@given(monotone_tables())
def test_submodular_iff_alpha_one(v):
    assert bool(check_class(v, "submodular")) == (alpha_star(v).alpha_star == 1)


@given(monotone_tables())
def test_alpha_matches_brute(v):
    assert alpha_star(v).alpha_star == brute_alpha(spec_table(v), v.m)


@given(monotone_tables(m=3))
def test_alpha_marginal_sum_inequality(v):
    a = alpha_star(v).alpha_star
    items = range(3)
    for S in itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(4)):
        for S2 in itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(4)):
            lhs = sum((marginal(v, {j}, S) for j in S2), F(0))
            assert lhs >= a * marginal(v, S2, S)


@given(monotone_tables(m=3), st.permutations(range(3)))
def test_permutation_support_bounds(v, perm):
    a = alpha_star(v).alpha_star
    (vec,) = permutation_supports(v, [perm])
    for r in range(4):
        for S in itertools.combinations(range(3), r):
            assert value(v, S) >= a * sum((vec[j] for j in S), F(0))
        prefix = perm[:r]
        assert value(v, prefix) == sum((vec[j] for j in prefix), F(0))


@given(monotone_tables(m=3), st.sets(st.integers(0, 2)))
def test_prefix_clause_sums_to_value(v, S):
    a = prefix_clause(v, S)
    assert sum((a[j] for j in S), F(0)) == value(v, S)


@given(xos_specs(3), st.sets(st.integers(0, 2)))
def test_maximizing_clause_supports(v, S):
    a = maximizing_clause(v, S)
    assert sum((a[j] for j in S), F(0)) == value(v, S)
    for r in range(4):
        for T in itertools.combinations(range(3), r):
            assert sum((a[j] for j in T), F(0)) <= value(v, T)
