"""Truncated divided-power algebra: products, shifts, and dimensions."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloverlie import (
    AlgebraElement,
    ContextMismatchError,
    DpContext,
    ParameterTuple,
    binom_mod_p,
    dp_basis,
    dp_basis_dim,
)


def ctx_2114():
    return DpContext(ParameterTuple.constant(2, 1, 1), 2)


def var_by_name(ctx):
    return {ctx.var_name(v): v for v in ctx.variables()}


# ---------------------------------------------------------------------------
# binomial coefficients mod p


def test_binom_mod_p_values():
    assert binom_mod_p(5, 2, 3) == 10 % 3 == 1
    assert binom_mod_p(6, 2, 2) == 15 % 2 == 1
    assert binom_mod_p(4, 2, 2) == 6 % 2 == 0
    assert binom_mod_p(7, 3, 5) == 35 % 5 == 0
    assert binom_mod_p(10, 5, 2) == 252 % 2 == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 400), st.integers(0, 400), st.sampled_from([2, 3, 5, 7]))
def test_binom_mod_p_matches_comb(n, k, p):
    expect = math.comb(n, k) % p if k <= n else 0
    assert binom_mod_p(n, k, p) == expect


# ---------------------------------------------------------------------------
# context shape


def test_dimension_counts():
    tup = ParameterTuple.constant(2, 1, 1)
    assert dp_basis_dim(DpContext(tup, 1)) == 8
    assert dp_basis_dim(DpContext(tup, 2)) == 64
    assert dp_basis_dim(DpContext(ParameterTuple.constant(3, 1, 1), 1)) == 27
    ctx = DpContext(tup, 2)
    assert len(dp_basis(ctx)) == 64
    assert len(set(map(str, dp_basis(ctx)))) == 64  # all distinct


def test_exponent_bounds_follow_rule():
    tup = ParameterTuple.explicit(2, [(2, 3)])
    ctx = DpContext(tup, 1)
    names = var_by_name(ctx)
    assert ctx.exponent_bound(names["x0"]) == 4  # p^S
    assert ctx.exponent_bound(names["y0"]) == 8  # p^R
    assert ctx.exponent_bound(names["z0"]) == 8


# ---------------------------------------------------------------------------
# products


def test_product_truncates_at_bound():
    ctx = ctx_2114()
    x0 = var_by_name(ctx)["x0"]
    a = AlgebraElement.monomial(ctx, {x0: 1})
    assert (a * a).is_zero()  # exponent 2 exceeds the bound p^S - 1 = 1


def test_product_carries_binomial_coefficient():
    # at p = 3 with S = 2 the bound is 9, so small powers multiply freely
    ctx = DpContext(ParameterTuple.explicit(3, [(2, 1)]), 1)
    x0 = var_by_name(ctx)["x0"]
    t1 = AlgebraElement.monomial(ctx, {x0: 1})
    t2 = AlgebraElement.monomial(ctx, {x0: 2})
    t3 = AlgebraElement.monomial(ctx, {x0: 3})
    assert t1 * t1 == t2.scale(2)  # C(2,1) = 2
    assert (t1 * t2).is_zero()  # C(3,1) = 3 = 0 mod 3
    assert t1 * t3 == AlgebraElement.monomial(ctx, {x0: 4}, 4 % 3)  # C(4,1) = 4


def random_element(ctx, rng, terms=3):
    basis = dp_basis(ctx)
    el = AlgebraElement.zero(ctx)
    for _ in range(terms):
        el = el + AlgebraElement(ctx, {rng.choice(basis): rng.randint(1, ctx.p - 1)})
    return el


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_ring_axioms(rnd):
    rng = random.Random(rnd.randint(0, 2**32))
    p = rng.choice((2, 3))
    ctx = DpContext(ParameterTuple.constant(p, 1, 1), 2)
    a, b, c = (random_element(ctx, rng) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert AlgebraElement.one(ctx) * a == a


# ---------------------------------------------------------------------------
# divided-power shifts


def test_shift_lowers_exponent():
    ctx = DpContext(ParameterTuple.explicit(2, [(3, 1)]), 1)
    x0 = var_by_name(ctx)["x0"]
    a = AlgebraElement.monomial(ctx, {x0: 5})
    assert a.derive(x0) == AlgebraElement.monomial(ctx, {x0: 4})
    # the p^m-fold shift subtracts p^m from the exponent in one step
    assert a.derive(x0, 1) == AlgebraElement.monomial(ctx, {x0: 3})
    assert a.derive(x0, 2) == AlgebraElement.monomial(ctx, {x0: 1})
    assert a.derive(x0, 2).derive(x0, 2).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_shift_is_a_derivation(rnd):
    rng = random.Random(rnd.randint(0, 2**32))
    p = rng.choice((2, 3))
    ctx = DpContext(ParameterTuple.explicit(p, [(2, 1), (1, 1)]), 2)
    var = rng.choice(ctx.variables())
    m = rng.randint(0, ctx.level_bound(var) - 1)
    a, b = random_element(ctx, rng), random_element(ctx, rng)
    left = (a * b).derive(var, m)
    right = a.derive(var, m) * b + a * b.derive(var, m)
    assert left == right


# ---------------------------------------------------------------------------
# bookkeeping


def test_context_mismatch_detected():
    a = AlgebraElement.one(ctx_2114())
    b = AlgebraElement.one(DpContext(ParameterTuple.constant(2, 1, 1), 3))
    with pytest.raises(ContextMismatchError):
        a + b


def test_render_mentions_exponents():
    ctx = ctx_2114()
    names = var_by_name(ctx)
    a = AlgebraElement.monomial(ctx, {names["x0"]: 1, names["y1"]: 1})
    s = str(a)
    assert "x0" in s and "y1" in s
    assert str(AlgebraElement.zero(ctx)) == "0"
