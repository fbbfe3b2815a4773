"""Basis-monomial bookkeeping: counting, enumeration, and growth tables."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloverlie import (
    DpContext,
    GrowthTable,
    MonomialDescriptor,
    ParameterTuple,
    count_descriptors,
    enumerate_descriptors,
    family_totals,
    growth_table,
    monomial_weight,
    realize,
)
from cloverlie.monomials import validate_descriptor

TUP2 = ParameterTuple.constant(2, 1, 1)
TUP3 = ParameterTuple.constant(3, 1, 1)

# Cumulative counts by weight for the smallest rule at p = 2, hand-checked by
# listing words per length and per head cell: rows are
# (m, first, second, power-of-x-type, power-of-z-type, total).
ROWS_2_11 = [
    (1, 2, 1, 0, 0, 3),
    (2, 3, 2, 2, 1, 8),
    (3, 5, 4, 2, 1, 12),
    (4, 6, 7, 2, 1, 16),
    (5, 8, 10, 2, 1, 21),
    (6, 9, 13, 4, 2, 28),
    (7, 11, 19, 4, 2, 36),
    (8, 15, 25, 4, 2, 46),
    (9, 17, 30, 4, 2, 53),
]


def test_growth_rows_smallest_rule():
    assert growth_table(TUP2, 9).rows == ROWS_2_11


def test_growth_row_p3():
    # hand-checked cumulative counts at weight 10 for p = 3, S = R = 1
    t = growth_table(TUP3, 10)
    assert t.rows[-1] == (10, 19, 42, 2, 1, 64)
    assert t.gamma(10) == 64


def test_gamma_cumulative_and_monotone():
    t = growth_table(TUP2, 30)
    for (m1, *_, g1), (m2, *_, g2) in zip(t.rows, t.rows[1:]):
        assert m2 == m1 + 1 and g2 >= g1
    with pytest.raises(KeyError):
        t.gamma(31)


def test_counts_match_table_columns():
    t = growth_table(TUP2, 9)
    for m, first, second, pow1, pow2, total in t.rows:
        c = count_descriptors(TUP2, m)
        assert c["first"] == first
        assert c["second"] == second
        assert c["power_v"] + c["power_w"] == pow1
        assert c["power_u"] == pow2
        assert sum(c.values()) == total


def test_family_totals_by_length():
    assert family_totals(TUP2, 0) == {
        "first": 2,
        "second": 1,
        "power_v": 0,
        "power_w": 0,
        "power_u": 0,
    }
    t1 = family_totals(TUP2, 1)
    assert (t1["power_v"], t1["power_w"], t1["power_u"]) == (1, 1, 1)
    # totals over all weights at a fixed length agree with a generous cutoff
    for length in range(4):
        for fam, total in family_totals(TUP2, length).items():
            assert count_descriptors(TUP2, 10**6, family=fam, length=length) == total


# ---------------------------------------------------------------------------
# enumeration agrees with counting and with realized operators


def test_enumerate_matches_count():
    descs = list(enumerate_descriptors(TUP2, 9))
    assert len(descs) == 53
    assert len(set(descs)) == 53
    only_second = list(enumerate_descriptors(TUP2, 9, families=("second",)))
    assert len(only_second) == 30
    assert all(d.family == "second" for d in only_second)


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_enumerate_matches_count_random_rules(rnd):
    rng = random.Random(rnd.randint(0, 2**32))
    p = rng.choice((2, 3))
    pairs = [(rng.randint(1, 2), rng.randint(1, 2)) for _ in range(4)]
    tup = ParameterTuple.explicit(p, pairs)
    m = rng.randint(1, 40)
    descs = list(enumerate_descriptors(tup, m))
    assert len(descs) == len(set(descs))
    counted = count_descriptors(tup, m)
    by_family = {}
    for d in descs:
        by_family[d.family] = by_family.get(d.family, 0) + 1
        wv = monomial_weight(d, tup)
        assert wv.total <= m
    for fam, n in counted.items():
        assert by_family.get(fam, 0) == n


def test_realized_operators_carry_declared_weight():
    ctx = DpContext(TUP2, 4)
    for d in enumerate_descriptors(TUP2, 9):
        D = realize(d, ctx)
        wv = monomial_weight(d, TUP2)
        assert not D.is_zero()
        assert D.multidegree() == (wv.v, wv.w, wv.u)
        assert D.weight() == wv.total


def test_realized_operators_distinct():
    ctx = DpContext(TUP2, 4)
    ops = [realize(d, ctx) for d in enumerate_descriptors(TUP2, 9)]
    renders = {str(op) for op in ops}  # canonical sorted-term rendering
    assert len(renders) == len(ops) == 53


def test_validate_descriptor_errors():
    with pytest.raises(ValueError, match="descriptor out of bounds"):
        validate_descriptor(MonomialDescriptor("second", 2, (5, 0), ((0, 0, 0),)), TUP2)
    with pytest.raises(ValueError, match="unknown family"):
        validate_descriptor(MonomialDescriptor("bogus", 1, (0, 0)), TUP2)
    with pytest.raises(ValueError, match="tail entry"):
        validate_descriptor(MonomialDescriptor("first", 2, (0, 0), ((0, 0, 0),)), TUP2)


def test_descriptor_labels_are_distinct():
    labels = [str(d) for d in enumerate_descriptors(TUP2, 9)]
    assert len(labels) == len(set(labels))


# ---------------------------------------------------------------------------
# large tables, checkpoints, and serialization


def test_large_table_cross_engine():
    # counts around and beyond the weight where dense evaluation kicks in
    t = growth_table(TUP2, 2187)
    assert t.gamma(2187) == sum(count_descriptors(TUP2, 2187).values())
    assert t.gamma(27) == 318


def test_checkpoint_weights():
    t = growth_table(TUP2, 9, weights=[3, 9])
    assert t.rows == [ROWS_2_11[2], ROWS_2_11[8]]


def test_row_cap_guard():
    with pytest.raises(ValueError, match="table too large"):
        growth_table(TUP2, 300000)
    # explicit checkpoints dodge the cap
    t = growth_table(TUP2, 300000, weights=[300000])
    assert t.rows[0][0] == 300000


def test_csv_round_trip():
    t = growth_table(TUP2, 9)
    text = t.to_csv()
    assert text.splitlines()[0] == (
        "m,gamma_total,first,second,power_first,power_second,log_gamma_over_log_m"
    )
    back = GrowthTable.from_csv(text, p=2, tuple_spec=TUP2.spec)
    assert back.rows == t.rows
    with pytest.raises(ValueError, match="unrecognized growth table header"):
        GrowthTable.from_csv("a,b\n1,2\n")


def test_json_payload():
    t = growth_table(TUP2, 3)
    obj = json.loads(t.to_json())
    assert obj["p"] == 2
    assert obj["tuple"] == TUP2.spec
    assert obj["columns"][0] == "m" and obj["columns"][-1] == "gamma_total"
    assert obj["rows"][0] == [1, 2, 1, 0, 0, 3]
