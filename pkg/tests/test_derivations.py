"""Derivations: generator structure, brackets, p-th powers, and identities."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloverlie import (
    AlgebraElement,
    ContextMismatchError,
    Derivation,
    DpContext,
    ParameterTuple,
    ad_power,
    bracket,
    jacobson_remainder,
    p_power,
    p_power_iter,
    pivot,
)
from conftest import random_zone_element


def make_ctx(p=2, S=1, R=1, depth=3):
    return DpContext(ParameterTuple.constant(p, S, R), depth)


def var_by_name(ctx):
    return {ctx.var_name(v): v for v in ctx.variables()}


# ---------------------------------------------------------------------------
# generator structure


def test_generators_expand_recursively():
    ctx = make_ctx(depth=3)
    names = var_by_name(ctx)
    mono = AlgebraElement.monomial
    x0y0 = mono(ctx, {names["x0"]: 1, names["y0"]: 1})
    x0y0x1y1 = mono(
        ctx, {names["x0"]: 1, names["y0"]: 1, names["x1"]: 1, names["y1"]: 1}
    )
    v0 = (
        Derivation.shift(ctx, names["x0"])
        + Derivation.shift(ctx, names["x1"]).lmul(x0y0)
        + Derivation.shift(ctx, names["x2"]).lmul(x0y0x1y1)
    )
    assert pivot(ctx, "v", 0) == v0
    w0 = (
        Derivation.shift(ctx, names["y0"])
        + Derivation.shift(ctx, names["y1"]).lmul(x0y0)
        + Derivation.shift(ctx, names["y2"]).lmul(x0y0x1y1)
    )
    assert pivot(ctx, "w", 0) == w0
    x0z0 = mono(ctx, {names["x0"]: 1, names["z0"]: 1})
    x0z0x1z1 = mono(
        ctx, {names["x0"]: 1, names["z0"]: 1, names["x1"]: 1, names["z1"]: 1}
    )
    u0 = (
        Derivation.shift(ctx, names["z0"])
        + Derivation.shift(ctx, names["z1"]).lmul(x0z0)
        + Derivation.shift(ctx, names["z2"]).lmul(x0z0x1z1)
    )
    assert pivot(ctx, "u", 0) == u0


def test_generator_multidegrees():
    ctx = make_ctx(depth=3)
    assert pivot(ctx, "v", 0).multidegree() == (1, 0, 0)
    assert pivot(ctx, "w", 0).multidegree() == (0, 1, 0)
    assert pivot(ctx, "u", 0).multidegree() == (0, 0, 1)
    assert pivot(ctx, "v", 1).multidegree() == (2, 1, 0)
    assert pivot(ctx, "u", 1).multidegree() == (1, 0, 2)
    assert pivot(ctx, "v", 1).weight() == 3


def test_generator_depth_limit():
    ctx = make_ctx(depth=2)
    assert pivot(ctx, "v", 2).is_zero()  # the recursion terminates at depth
    with pytest.raises(ValueError, match="beyond truncation"):
        pivot(ctx, "v", 3)
    with pytest.raises(ValueError, match="unknown pivot kind"):
        pivot(ctx, "q", 0)


# ---------------------------------------------------------------------------
# bracket


def random_pair(p, depth, seed):
    rng = random.Random(seed)
    tup = ParameterTuple.constant(p, 1, 1)
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    D = random_zone_element(ctx, tup, cap, rng)
    E = random_zone_element(ctx, tup, cap, rng)
    return ctx, D, E, rng, tup


def test_bracket_is_commutator_of_operators():
    ctx, D, E, rng, tup = random_pair(3, 2, seed=11)
    from cloverlie import dp_basis

    for mono in dp_basis(ctx):
        f = AlgebraElement(ctx, {mono: 1})
        assert bracket(D, E).apply(f) == D.apply(E.apply(f)) - E.apply(D.apply(f))


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([2, 3]))
def test_bracket_axioms(rnd, p):
    rng = random.Random(rnd.randint(0, 2**32))
    tup = ParameterTuple.constant(p, 1, 1)
    depth = 4 if p == 2 else 3
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    D, E, F = (random_zone_element(ctx, tup, cap, rng) for _ in range(3))
    assert bracket(D, D).is_zero()
    assert (bracket(D, E) + bracket(E, D)).is_zero()
    jac = bracket(bracket(D, E), F) + bracket(bracket(E, F), D) + bracket(bracket(F, D), E)
    assert jac.is_zero()
    assert bracket(D + E, F) == bracket(D, F) + bracket(E, F)


def test_ad_power_iterates_bracket():
    ctx, D, E, _, _ = random_pair(2, 4, seed=5)
    assert ad_power(D, E, 0) == E
    assert ad_power(D, E, 1) == bracket(D, E)
    assert ad_power(D, E, 3) == bracket(D, bracket(D, bracket(D, E)))


def test_context_mismatch_detected():
    a = pivot(make_ctx(depth=2), "v", 0)
    b = pivot(make_ctx(depth=3), "v", 0)
    with pytest.raises(ContextMismatchError):
        bracket(a, b)


# ---------------------------------------------------------------------------
# p-th power map


def test_power_of_first_generator():
    ctx = make_ctx(depth=3)
    names = var_by_name(ctx)
    y0 = AlgebraElement.monomial(ctx, {names["y0"]: 1})
    assert p_power(pivot(ctx, "v", 0)) == pivot(ctx, "v", 1).lmul(y0)


def test_power_reconstruction_self_check():
    # verify=True recomputes the operator from its p-fold composition and
    # raises unless the triangular solve reproduces it exactly
    ctx, D, E, _, _ = random_pair(2, 4, seed=23)
    assert p_power(D, verify=True) == p_power(D)
    ctx3, D3, _, _, _ = random_pair(3, 2, seed=23)
    assert p_power(D3, verify=True) == p_power(D3)


def test_iterated_power_matches_composition():
    ctx, D, _, _, _ = random_pair(2, 4, seed=31)
    assert p_power_iter(D, 0) == D
    assert p_power_iter(D, 1) == p_power(D)
    assert p_power_iter(D, 2) == p_power(p_power(D))


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([2, 3]))
def test_power_is_semilinear_in_scalars(rnd, p):
    rng = random.Random(rnd.randint(0, 2**32))
    tup = ParameterTuple.constant(p, 1, 1)
    ctx = DpContext(tup, 3)
    D = random_zone_element(ctx, tup, tup.trusted_weight_bound(3), rng)
    c = rng.randint(1, p - 1)
    assert p_power(D.scale(c)) == p_power(D).scale(pow(c, p, p))


# ---------------------------------------------------------------------------
# restricted-algebra identities


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False), st.sampled_from([2, 3]))
def test_ad_of_power_is_power_of_ad(rnd, p):
    rng = random.Random(rnd.randint(0, 2**32))
    depth = 3 if p == 2 else 2
    tup = ParameterTuple.constant(p, 1, 1)
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    D = random_zone_element(ctx, tup, cap, rng)
    E = random_zone_element(ctx, tup, cap, rng)
    assert bracket(p_power(D), E) == ad_power(D, E, p)


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False))
def test_power_of_sum_closed_forms(rnd):
    rng = random.Random(rnd.randint(0, 2**32))
    # p = 2: (D+E)^[2] - D^[2] - E^[2] - [D,E] vanishes identically
    tup2 = ParameterTuple.constant(2, 1, 1)
    ctx2 = DpContext(tup2, 4)
    D = random_zone_element(ctx2, tup2, 9, rng)
    E = random_zone_element(ctx2, tup2, 9, rng)
    assert jacobson_remainder(D, E).is_zero()
    # p = 3: the remainder beyond [D,[D,E]] is the single bracket [E,[E,D]]
    tup3 = ParameterTuple.constant(3, 1, 1)
    ctx3 = DpContext(tup3, 3)
    D3 = random_zone_element(ctx3, tup3, tup3.trusted_weight_bound(3), rng)
    E3 = random_zone_element(ctx3, tup3, tup3.trusted_weight_bound(3), rng)
    assert jacobson_remainder(D3, E3) == bracket(E3, bracket(E3, D3))
