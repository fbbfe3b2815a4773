"""Shared helpers for the test suite: seeded random tuples and elements."""

import random

from cloverlie import Derivation, ParameterTuple, enumerate_descriptors, realize


def random_explicit_tuple(
    rng: random.Random,
    primes=(2, 3, 5),
    max_S: int = 3,
    max_R: int = 3,
    length: int = 7,
) -> ParameterTuple:
    """A random finite-rule tuple drawn with the given generator."""
    p = rng.choice(primes)
    pairs = [(rng.randint(1, max_S), rng.randint(1, max_R)) for _ in range(length)]
    return ParameterTuple.explicit(p, pairs)


def random_zone_element(ctx, tup, cap: int, rng: random.Random, max_terms: int = 3):
    """A random F_p-combination of realized basis monomials of weight <= cap."""
    pool = list(enumerate_descriptors(tup, cap))
    el = Derivation.zero(ctx)
    for _ in range(rng.randint(1, max_terms)):
        d = rng.choice(pool)
        c = rng.randint(1, tup.p - 1)
        el = el + realize(d, ctx).scale(c)
    return el
