"""Symbolic basis descriptors, their weights, realization, and exact counting.

The graded basis of the 3-generated algebra splits into four families:

* ``first``   — length 0: the two generators that shift x / y; length n >= 1:
  a head cell (ξ, η) over generation n-1 (the bottom-right corner cell is
  excluded) times a tail of x/y divided powers over generations <= n-2.
* ``second``  — length 0: the generator that shifts z; length n >= 1: a head
  cell (ξ, ζ) with 0 <= ξ <= p^S-2, 0 <= ζ <= p^R-1 times a tail of x/y/z
  divided powers over generations <= n-2.
* ``power_v`` / ``power_w`` / ``power_u`` — iterated p-th powers of the
  generation n-1 recursive generator, exponent index 1 <= m <= S (for v)
  or 1 <= m <= R (for w, u).

Weights live in the mixed-radix ladder W_{i+1} = (p^{S_i} + p^{R_i} - 1) W_i:
every variable of generation i contributes weight W_i per unit exponent, a
head cell of generation n-1 weighs (sum + 2) W_{n-1}, and tail exponents are
deficiencies subtracted from the head weight.  Counting descriptors of weight
at most m never materializes operators: it is exact big-integer lattice-point
counting (closed-form box sums plus a memoized digit recursion over the
mixed-radix ladder), with a vectorized dense convolution path for tables that
need every integer row.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .params import ParameterTuple, WeightVector

__all__ = [
    "MonomialDescriptor",
    "GrowthTable",
    "monomial_weight",
    "realize",
    "enumerate_descriptors",
    "count_descriptors",
    "family_totals",
    "growth_table",
]

FAMILIES = ("first", "second", "power_v", "power_w", "power_u")
_FAMILY_RANK = {f: i for i, f in enumerate(FAMILIES)}
_POWER_KIND = {"power_v": "v", "power_w": "w", "power_u": "u"}


@dataclass(frozen=True)
class MonomialDescriptor:
    """A basis element named by family, length, head cell, and tail exponents.

    head: for ``first``/``second`` of length n >= 1 the pair of head
    exponents; for power families the single exponent index (m,); for
    length 0 a single generator index — (0,) is the x-shift generator and
    (1,) the y-shift generator in family ``first``, (0,) the z-shift
    generator in family ``second``.

    tail: one exponent tuple per generation i = 0 .. n-2, low generation
    first; pairs (ξ_i, η_i) for ``first``, triples (ξ_i, η_i, ζ_i) for
    ``second``, empty for power families.
    """

    family: str
    length: int
    head: tuple[int, ...]
    tail: tuple[tuple[int, ...], ...] = ()

    def sort_key(self):
        return (_FAMILY_RANK[self.family], self.length, self.head, self.tail)

    def describe(self) -> str:
        if self.length == 0:
            name = {"first": ("v0", "w0"), "second": ("u0",)}[self.family][self.head[0]]
            return name
        if self.family in _POWER_KIND:
            return f"{_POWER_KIND[self.family]}{self.length - 1}^(p^{self.head[0]})"
        sym = "h" if self.family == "first" else "g"
        tail = "".join(f"[{','.join(map(str, t))}]" for t in self.tail)
        return f"{tail}{sym}{self.length}^{self.head}"

    def __str__(self) -> str:
        return self.describe()


def _bounds_error(msg: str):
    raise ValueError(f"descriptor out of bounds: {msg}")


def validate_descriptor(d: MonomialDescriptor, tup: ParameterTuple) -> None:
    """Raise ValueError("descriptor out of bounds: ...") unless d fits tup."""
    p = tup.p
    if d.family not in FAMILIES:
        _bounds_error(f"unknown family {d.family!r}")
    n = d.length
    if n < 0:
        _bounds_error("negative length")
    if n == 0:
        if d.tail:
            _bounds_error("length-0 descriptor with nonempty tail")
        if d.family == "first":
            if d.head not in ((0,), (1,)):
                _bounds_error("length-0 first-family head must be (0,) or (1,)")
        elif d.family == "second":
            if d.head != (0,):
                _bounds_error("length-0 second-family head must be (0,)")
        else:
            _bounds_error("power families have length >= 1")
        return
    S, R = tup.materialize(n - 1)
    if d.family in _POWER_KIND:
        if d.tail:
            _bounds_error("power descriptor with nonempty tail")
        if len(d.head) != 1:
            _bounds_error("power head must be a single exponent index")
        m = d.head[0]
        bound = S if d.family == "power_v" else R
        if not (1 <= m <= bound):
            _bounds_error(f"power exponent index {m} outside 1..{bound}")
        return
    if len(d.head) != 2:
        _bounds_error("head must be an exponent pair")
    a, b = d.head
    if d.family == "first":
        if not (0 <= a <= p**S - 1 and 0 <= b <= p**R - 1):
            _bounds_error(f"first-family head {d.head} outside its box")
        if a == p**S - 1 and b == p**R - 1:
            _bounds_error("first-family head at the excluded corner cell")
    else:
        if not (0 <= a <= p**S - 2 and 0 <= b <= p**R - 1):
            _bounds_error(f"second-family head {d.head} outside its box")
    if len(d.tail) != n - 1:
        _bounds_error(f"tail must cover generations 0..{n - 2}")
    arity = 2 if d.family == "first" else 3
    for i, t in enumerate(d.tail):
        if len(t) != arity:
            _bounds_error(f"tail entry {i} must have {arity} exponents")
        Si, Ri = tup.materialize(i)
        caps = (p**Si - 1, p**Ri - 1, p**Ri - 1)[:arity]
        for e, cap in zip(t, caps):
            if not (0 <= e <= cap):
                _bounds_error(f"tail exponent {e} of generation {i} outside 0..{cap}")


# -- weights -------------------------------------------------------------------


def monomial_weight(d: MonomialDescriptor, tup: ParameterTuple) -> WeightVector:
    """Exact multidegree of the descriptor; its ``total`` is the weight."""
    validate_descriptor(d, tup)
    p = tup.p
    n = d.length
    if n == 0:
        kind = ("v", "w")[d.head[0]] if d.family == "first" else "u"
        return tup.pivot_multidegree(0, kind)
    if d.family in _POWER_KIND:
        return tup.pivot_multidegree(n - 1, _POWER_KIND[d.family]) * (p ** d.head[0])
    gv = tup.pivot_multidegree(n - 1, "v")
    if d.family == "first":
        xi, eta = d.head
        acc = gv * (xi + 1) + tup.pivot_multidegree(n - 1, "w") * (eta + 1)
        for i, (txi, teta) in enumerate(d.tail):
            acc = acc - tup.pivot_multidegree(i, "v") * txi
            acc = acc - tup.pivot_multidegree(i, "w") * teta
        return acc
    xi, zeta = d.head
    acc = gv * (xi + 1) + tup.pivot_multidegree(n - 1, "u") * (zeta + 1)
    for i, (txi, teta, tzeta) in enumerate(d.tail):
        acc = acc - tup.pivot_multidegree(i, "v") * txi
        acc = acc - tup.pivot_multidegree(i, "w") * teta
        acc = acc - tup.pivot_multidegree(i, "u") * tzeta
    return acc


# -- realization ----------------------------------------------------------------


def realize(d: MonomialDescriptor, ctx) -> "Derivation":
    """Closed-form operator for a descriptor inside a depth-N context.

    Heads follow the explicit closed forms (the first family carries a
    minus sign on its y-shift component; the second family is a single
    positive term); tails multiply in as divided-power monomials.  Terms
    whose closed-form exponent would be negative are dropped.
    """
    from .derivations import Derivation, pivot
    from .dpalgebra import AlgebraElement

    tup = ctx.tup
    validate_descriptor(d, tup)
    p = tup.p
    n = d.length
    if n + 1 > ctx.depth:
        raise ValueError(
            f"generation beyond truncation: length {n} needs depth >= {n + 1}"
        )
    if n == 0:
        kind = ("v", "w")[d.head[0]] if d.family == "first" else "u"
        return pivot(ctx, kind, 0)
    g = n - 1
    S, R = tup.materialize(g)
    if d.family in _POWER_KIND:
        kind = _POWER_KIND[d.family]
        m = d.head[0]
        axis = "vwu".index(kind)
        res = Derivation.zero(ctx)
        level_bound = S if kind == "v" else R
        if m < level_bound:
            res = res + Derivation.shift(ctx, (g, axis), m)
        if kind == "v":
            exps = {(g, 0): p**S - p**m, (g, 1): p**R - 1}
        elif kind == "w":
            exps = {(g, 1): p**R - p**m, (g, 0): p**S - 1}
        else:
            exps = {(g, 2): p**R - p**m, (g, 0): p**S - 1}
        exps = {var: e for var, e in exps.items() if e}
        return res + pivot(ctx, kind, g + 1).lmul(AlgebraElement.monomial(ctx, exps))

    tail_exps: dict[tuple[int, int], int] = {}
    for i, t in enumerate(d.tail):
        for axis, e in enumerate(t):
            if e:
                tail_exps[(i, axis)] = e

    def head_term(kind: str, x_exp: int, other_axis: int, other_exp: int):
        if x_exp < 0 or other_exp < 0:
            return Derivation.zero(ctx)
        exps = dict(tail_exps)
        if x_exp:
            exps[(g, 0)] = x_exp
        if other_exp:
            exps[(g, other_axis)] = other_exp
        return pivot(ctx, kind, g + 1).lmul(AlgebraElement.monomial(ctx, exps))

    if d.family == "first":
        xi, eta = d.head
        term_v = head_term("v", p**S - 1 - xi, 1, p**R - 2 - eta)
        term_w = head_term("w", p**S - 2 - xi, 1, p**R - 1 - eta)
        return term_v - term_w
    xi, zeta = d.head
    return head_term("u", p**S - 2 - xi, 2, p**R - 1 - zeta)


# -- exact counting engine -------------------------------------------------------


def _B2(t: int) -> int:
    return (t + 1) * (t + 2) // 2 if t >= 0 else 0


def _B3(t: int) -> int:
    return (t + 1) * (t + 2) * (t + 3) // 6 if t >= 0 else 0


def _box2_prefix(s: int, P: int, Q: int) -> int:
    """Lattice points (a, b), 0 <= a < P, 0 <= b < Q, a + b <= s."""
    return _B2(s) - _B2(s - P) - _B2(s - Q) + _B2(s - P - Q)


def _box3_prefix(s: int, P: int, Q1: int, Q2: int) -> int:
    """Lattice points in [0,P)×[0,Q1)×[0,Q2) with coordinate sum <= s."""
    return (
        _B3(s)
        - _B3(s - P)
        - _B3(s - Q1)
        - _B3(s - Q2)
        + _B3(s - P - Q1)
        + _B3(s - P - Q2)
        + _B3(s - Q1 - Q2)
        - _B3(s - P - Q1 - Q2)
    )


class _TailEngine:
    """Exact big-integer counting of tail deficiency sums for one family."""

    def __init__(self, tup: ParameterTuple, family: str):
        assert family in ("first", "second")
        self.tup = tup
        self.family = family
        self.p = tup.p
        self._caps: list[int] = []
        self._totals: list[int] = [1]
        self._dmax: list[int] = [0]
        self._memo: dict[tuple[int, int], int] = {}

    def _extend(self, k: int) -> None:
        p = self.p
        while len(self._caps) < k:
            i = len(self._caps)
            S, R = self.tup.materialize(i)
            if self.family == "first":
                cap = (p**S - 1) + (p**R - 1)
                size = p ** (S + R)
            else:
                cap = (p**S - 1) + 2 * (p**R - 1)
                size = p ** (S + 2 * R)
            self._caps.append(cap)
            self._totals.append(self._totals[-1] * size)
            self._dmax.append(self._dmax[-1] + cap * self.tup.pivot_weight(i))

    def total(self, k: int) -> int:
        self._extend(k)
        return self._totals[k]

    def dmax(self, k: int) -> int:
        self._extend(k)
        return self._dmax[k]

    def ker_prefix(self, i: int, s: int) -> int:
        """Tail cells of generation i with exponent sum <= s."""
        p = self.p
        S, R = self.tup.materialize(i)
        if self.family == "first":
            return _box2_prefix(s, p**S, p**R)
        return _box3_prefix(s, p**S, p**R, p**R)

    def ker_point(self, i: int, s: int) -> int:
        return self.ker_prefix(i, s) - self.ker_prefix(i, s - 1)

    def below(self, k: int, t: int) -> int:
        """Number of tails over generations 0..k-1 with deficiency <= t."""
        if t < 0:
            return 0
        if k == 0:
            return 1
        self._extend(k)
        if t >= self._dmax[k]:
            return self._totals[k]
        key = (k, t)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        W = self.tup.pivot_weight(k - 1)
        cap = self._caps[k - 1]
        d = min(t // W, cap)
        inner_dmax = self._dmax[k - 1]
        # digits small enough that the remaining budget saturates completely
        s_sat = min((t - inner_dmax) // W if t >= inner_dmax else -1, d)
        acc = 0
        if s_sat >= 0:
            acc = self.ker_prefix(k - 1, s_sat) * self._totals[k - 1]
        for s in range(s_sat + 1, d + 1):
            c = self.ker_point(k - 1, s)
            if c:
                acc += c * self.below(k - 1, t - s * W)
        self._memo[key] = acc
        return acc

    def at_least(self, k: int, req: int) -> int:
        """Number of tails over generations 0..k-1 with deficiency >= req."""
        if req <= 0:
            return self.total(k)
        if req > self.dmax(k):
            return 0
        return self.total(k) - self.below(k, req - 1)


_ENGINES: dict[tuple[ParameterTuple, str], _TailEngine] = {}


def _engine(tup: ParameterTuple, family: str) -> _TailEngine:
    key = (tup, family)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = _ENGINES[key] = _TailEngine(tup, family)
    return eng


def _head_box(tup: ParameterTuple, family: str, n: int) -> tuple[int, int]:
    """Box sizes (P, Q) of head cells of a length-n descriptor (n >= 1)."""
    p = tup.p
    S, R = tup.materialize(n - 1)
    if family == "first":
        return p**S, p**R
    return p**S - 1, p**R


def min_weight(tup: ParameterTuple, family: str, n: int) -> int | None:
    """Least possible weight of a length-n descriptor; None when empty."""
    if n == 0:
        return 1 if family in ("first", "second") else None
    if family in _POWER_KIND:
        return tup.p * tup.pivot_weight(n - 1)
    if family == "first":
        return tup.pivot_weight(n - 1) + 1
    acc = 2
    for i in range(n - 1):
        S, _ = tup.materialize(i)
        acc += (tup.p**S - 1) * tup.pivot_weight(i)
    return acc


def _count_headed(tup: ParameterTuple, family: str, n: int, m: int) -> int:
    """Length-n descriptors of family first/second with weight <= m (n >= 1)."""
    if m < 1:
        return 0
    eng = _engine(tup, family)
    k = n - 1
    W = tup.pivot_weight(k)
    dmax = eng.dmax(k)
    total = eng.total(k)
    P, Q = _head_box(tup, family, n)
    smax = (P - 1) + (Q - 1)
    # head sums s <= s_full keep every tail; s > s_cut keep none
    s_full = min(m // W - 2, smax)
    s_cut = min((m + dmax) // W - 2, smax)
    acc = 0
    if s_full >= 0:
        acc = _box2_prefix(s_full, P, Q) * total
    for s in range(max(s_full + 1, 0), s_cut + 1):
        c = _box2_prefix(s, P, Q) - _box2_prefix(s - 1, P, Q)
        if c:
            acc += c * eng.at_least(k, (s + 2) * W - m)
    if family == "first":
        # remove the excluded corner cell (the maximal head sum)
        acc -= eng.at_least(k, (smax + 2) * W - m)
    return acc


def _count_power(tup: ParameterTuple, family: str, n: int, m: int) -> int:
    """Length-n power descriptors of one kind with weight <= m (n >= 1)."""
    S, R = tup.materialize(n - 1)
    bound = S if family == "power_v" else R
    W = tup.pivot_weight(n - 1)
    p = tup.p
    count = 0
    val = W
    for _ in range(1, bound + 1):
        val *= p
        if val > m:
            break
        count += 1
    return count


def _count_family_length(tup: ParameterTuple, family: str, n: int, m: int) -> int:
    if n == 0:
        if m < 1:
            return 0
        if family == "first":
            return 2
        return 1 if family == "second" else 0
    if family in _POWER_KIND:
        return _count_power(tup, family, n, m)
    return _count_headed(tup, family, n, m)


def count_descriptors(
    tup: ParameterTuple,
    max_weight: int,
    family: str | None = None,
    length: int | None = None,
):
    """Exact number of descriptors with weight <= max_weight.

    With ``family`` a dict over all five families collapses to one integer;
    with ``length`` the count is restricted to that exact length, otherwise
    it sums over all lengths (only finitely many contribute).
    """
    if max_weight < 0:
        raise ValueError("max_weight must be >= 0")
    fams = FAMILIES if family is None else (family,)
    for f in fams:
        if f not in FAMILIES:
            raise ValueError(f"unknown family {f!r}")
    out = {}
    for f in fams:
        if length is not None:
            out[f] = _count_family_length(tup, f, length, max_weight)
            continue
        acc = 0
        n = 0
        while True:
            mw = min_weight(tup, f, n)
            if mw is not None and mw > max_weight:
                if n >= 1:
                    break
            elif mw is not None:
                acc += _count_family_length(tup, f, n, max_weight)
            n += 1
        out[f] = acc
    return out if family is None else out[family]


def family_totals(tup: ParameterTuple, length: int) -> dict[str, int]:
    """Total descriptor counts at one exact length, with no weight bound."""
    if length < 0:
        raise ValueError("length must be >= 0")
    p = tup.p
    if length == 0:
        return {"first": 2, "second": 1, "power_v": 0, "power_w": 0, "power_u": 0}
    S, R = tup.materialize(length - 1)
    tail_first = 1
    tail_second = 1
    for i in range(length - 1):
        Si, Ri = tup.materialize(i)
        tail_first *= p ** (Si + Ri)
        tail_second *= p ** (Si + 2 * Ri)
    return {
        "first": (p ** (S + R) - 1) * tail_first,
        "second": (p**S - 1) * p**R * tail_second,
        "power_v": S,
        "power_w": R,
        "power_u": R,
    }


# -- enumeration -----------------------------------------------------------------


def _tail_vectors(tup: ParameterTuple, family: str, k: int, req: int):
    """All tails over generations 0..k-1 with deficiency >= req, pruned."""
    eng = _engine(tup, family)
    arity = 2 if family == "first" else 3
    p = tup.p

    def rec(i: int, need: int):
        if i < 0:
            if need <= 0:
                yield ()
            return
        if need > eng.dmax(i + 1):
            return
        S, R = tup.materialize(i)
        caps = (p**S - 1, p**R - 1, p**R - 1)[:arity]
        W = tup.pivot_weight(i)
        ranges = [range(c + 1) for c in caps]

        def cells(idx, acc):
            if idx == arity:
                yield acc
                return
            for e in ranges[idx]:
                yield from cells(idx + 1, acc + (e,))

        for cell in cells(0, ()):
            d = sum(cell) * W
            for rest in rec(i - 1, need - d):
                yield rest + (cell,)

    yield from rec(k - 1, req)


def enumerate_descriptors(
    tup: ParameterTuple,
    max_weight: int,
    families=None,
):
    """Every descriptor of weight <= max_weight, sorted by (weight, key)."""
    if max_weight < 1:
        return iter(())
    fams = tuple(FAMILIES if families is None else families)
    for f in fams:
        if f not in FAMILIES:
            raise ValueError(f"unknown family {f!r}")
    found: list[tuple[int, MonomialDescriptor]] = []
    p = tup.p
    for f in fams:
        if f == "first":
            found.append((1, MonomialDescriptor("first", 0, (0,))))
            found.append((1, MonomialDescriptor("first", 0, (1,))))
        elif f == "second":
            found.append((1, MonomialDescriptor("second", 0, (0,))))
        n = 1
        while True:
            mw = min_weight(tup, f, n)
            if mw is None or mw > max_weight:
                break
            if f in _POWER_KIND:
                S, R = tup.materialize(n - 1)
                bound = S if f == "power_v" else R
                W = tup.pivot_weight(n - 1)
                val = W
                for mm in range(1, bound + 1):
                    val *= p
                    if val > max_weight:
                        break
                    found.append((val, MonomialDescriptor(f, n, (mm,))))
            else:
                W = tup.pivot_weight(n - 1)
                P, Q = _head_box(tup, f, n)
                for xi in range(P):
                    for et in range(Q):
                        if f == "first" and xi == P - 1 and et == Q - 1:
                            continue
                        hw = (xi + et + 2) * W
                        req = hw - max_weight
                        for tail in _tail_vectors(tup, f, n - 1, req):
                            d = MonomialDescriptor(f, n, (xi, et), tail)
                            wt = hw - sum(
                                sum(cell) * tup.pivot_weight(i)
                                for i, cell in enumerate(tail)
                            )
                            found.append((wt, d))
            n += 1
    found.sort(key=lambda t: (t[0], t[1].sort_key()))
    return iter(d for _, d in found)


# -- growth tables ----------------------------------------------------------------


# Row cap keeps every int64 intermediate safe: cumulative counts grow no
# faster than a small multiple of M^3, so 6e5^3 * 8 stays below 2^63.
_DENSE_ROW_CAP = 600_000
_DENSE_COUNT_GUARD = 1 << 40


def _dense_exact_rows(tup: ParameterTuple, M: int):
    """Per-family counts at every exact weight 1..M, or None if unsuited.

    numpy int64 convolution; only used when every per-length family total
    fits comfortably below 2^40 so no intermediate can overflow, and the
    final cumulative row is cross-checked against the big-integer engine.
    """
    if M > _DENSE_ROW_CAP:
        return None
    p = tup.p
    out = {f: np.zeros(M + 1, dtype=np.int64) for f in FAMILIES}
    if M >= 1:
        out["first"][1] = 2
        out["second"][1] = 1
    for fam in ("first", "second"):
        eng = _engine(tup, fam)
        dist = np.ones(1, dtype=np.int64)  # deficiency distribution, k = 0
        n = 1
        while True:
            mw = min_weight(tup, fam, n)
            if mw > M:
                break
            k = n - 1
            if eng.total(k) > _DENSE_COUNT_GUARD:
                return None
            W = tup.pivot_weight(k)
            dist = _dense_dist(tup, fam, k)
            if dist is None:
                return None
            P, Q = _head_box(tup, fam, n)
            smax = (P - 1) + (Q - 1)
            arr = out[fam]
            s_hi = min(smax, (M + eng.dmax(k)) // W - 2)
            for s in range(0, s_hi + 1):
                c = _box2_prefix(s, P, Q) - _box2_prefix(s - 1, P, Q)
                if fam == "first" and s == smax:
                    c -= 1
                if not c:
                    continue
                hw = (s + 2) * W
                # weight = hw - D for deficiency D in [max(0, hw - M), dmax]
                d_lo = max(0, hw - M)
                d_hi = len(dist) - 1
                if d_lo > d_hi:
                    continue
                seg = dist[d_lo : d_hi + 1][::-1]  # weights hw-d_hi .. hw-d_lo
                arr[hw - d_hi : hw - d_lo + 1] += c * seg
            n += 1
    for fam in ("power_v", "power_w", "power_u"):
        arr = out[fam]
        n = 1
        while True:
            mw = min_weight(tup, fam, n)
            if mw is None or mw > M:
                break
            S, R = tup.materialize(n - 1)
            bound = S if fam == "power_v" else R
            val = tup.pivot_weight(n - 1)
            for _ in range(1, bound + 1):
                val *= p
                if val > M:
                    break
                arr[val] += 1
            n += 1
    return out


_DENSE_DIST_CACHE: dict[tuple[ParameterTuple, str, int], np.ndarray] = {}


def _dense_dist(tup: ParameterTuple, fam: str, k: int):
    """Deficiency distribution over generations 0..k-1 as an int64 array."""
    key = (tup, fam, k)
    cached = _DENSE_DIST_CACHE.get(key)
    if cached is not None:
        return cached
    eng = _engine(tup, fam)
    if eng.total(k) > _DENSE_COUNT_GUARD or eng.dmax(k) > 4 * _DENSE_ROW_CAP:
        return None
    if k == 0:
        dist = np.ones(1, dtype=np.int64)
    else:
        prev = _dense_dist(tup, fam, k - 1)
        if prev is None:
            return None
        W = tup.pivot_weight(k - 1)
        cap = eng._caps[k - 1]
        # The kernel is supported on multiples of W only, so a handful of
        # shifted adds beats a dense convolution.
        dist = np.zeros(len(prev) + cap * W, dtype=np.int64)
        for s in range(cap + 1):
            c = eng.ker_point(k - 1, s)
            if c:
                dist[s * W : s * W + len(prev)] += c * prev
    _DENSE_DIST_CACHE[key] = dist
    return dist


@dataclass
class GrowthTable:
    """Cumulative per-family basis counts by weight.

    rows: (m, first, second, power_first, power_second, total) with every
    count cumulative (weight <= m) and total = sum of the four columns.
    """

    p: int
    tuple_spec: str
    rows: list[tuple[int, int, int, int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        last = None
        for row in self.rows:
            m, fi, se, pf, ps, tot = row
            if fi + se + pf + ps != tot:
                raise ValueError("growth table row total mismatch")
            if last is not None:
                if m <= last[0] or tot < last[5]:
                    raise ValueError("growth table rows must increase")
            last = row
        self._index = {row[0]: row for row in self.rows}

    def gamma(self, m: int) -> int:
        """Cumulative total at a computed row m."""
        row = self._index.get(m)
        if row is None:
            raise KeyError(f"no computed row at weight {m}")
        return row[5]

    def weights(self) -> list[int]:
        return [row[0] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf)
        wr.writerow(
            [
                "m",
                "gamma_total",
                "first",
                "second",
                "power_first",
                "power_second",
                "log_gamma_over_log_m",
            ]
        )
        for m, fi, se, pf, ps, tot in self.rows:
            ratio = ""
            if m > 1 and tot > 0:
                ratio = f"{math.log(tot) / math.log(m):.12g}"
            wr.writerow([m, tot, fi, se, pf, ps, ratio])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, p: int = 0, tuple_spec: str = "") -> "GrowthTable":
        rd = csv.reader(io.StringIO(text))
        header = next(rd)
        expected = [
            "m",
            "gamma_total",
            "first",
            "second",
            "power_first",
            "power_second",
            "log_gamma_over_log_m",
        ]
        if [h.strip() for h in header] != expected:
            raise ValueError("unrecognized growth table header")
        rows = []
        for rec in rd:
            if not rec:
                continue
            m, tot, fi, se, pf, ps = (int(x) for x in rec[:6])
            rows.append((m, fi, se, pf, ps, tot))
        return cls(p=p, tuple_spec=tuple_spec, rows=rows)

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "tuple": self.tuple_spec,
                "columns": [
                    "m",
                    "first",
                    "second",
                    "power_first",
                    "power_second",
                    "gamma_total",
                ],
                "rows": [
                    [m, fi, se, pf, ps, tot] for m, fi, se, pf, ps, tot in self.rows
                ],
            }
        )


def _cumulative_at(tup: ParameterTuple, m: int) -> tuple[int, int, int, int]:
    counts = count_descriptors(tup, m)
    return (
        counts["first"],
        counts["second"],
        counts["power_v"] + counts["power_w"],
        counts["power_u"],
    )


def growth_table(
    tup: ParameterTuple,
    max_weight: int,
    weights: list[int] | None = None,
    row_cap: int = 200_000,
) -> GrowthTable:
    """Exact growth table up to max_weight.

    Without ``weights`` the table has one row per integer 1..max_weight
    (refused with "table too large" beyond ``row_cap``); with ``weights`` it
    has exactly those checkpoint rows, which permits astronomically large
    weights since each row is an O(polylog) big-integer computation.
    """
    if max_weight < 1:
        raise ValueError("max_weight must be >= 1")
    if weights is None:
        if max_weight > row_cap:
            raise ValueError(
                f"table too large: {max_weight} rows exceed cap {row_cap}; "
                "pass explicit checkpoint weights"
            )
        ms = list(range(1, max_weight + 1))
        dense = _dense_exact_rows(tup, max_weight)
        if dense is not None:
            cum = {f: np.cumsum(dense[f]) for f in FAMILIES}
            rows = []
            for m in ms:
                fi = int(cum["first"][m])
                se = int(cum["second"][m])
                pf = int(cum["power_v"][m] + cum["power_w"][m])
                ps = int(cum["power_u"][m])
                rows.append((m, fi, se, pf, ps, fi + se + pf + ps))
            check = _cumulative_at(tup, max_weight)
            if rows[-1][1:5] != check:
                raise RuntimeError("counting engines disagree")
            return GrowthTable(p=tup.p, tuple_spec=tup.spec, rows=rows)
    else:
        ms = sorted(set(int(w) for w in weights))
        if any(w < 1 for w in ms):
            raise ValueError("checkpoint weights must be >= 1")
        if ms and ms[-1] > max_weight:
            raise ValueError("checkpoint weight beyond max_weight")
        if len(ms) > row_cap:
            raise ValueError(f"table too large: {len(ms)} rows exceed cap {row_cap}")
    rows = []
    for m in ms:
        fi, se, pf, ps = _cumulative_at(tup, m)
        rows.append((m, fi, se, pf, ps, fi + se + pf + ps))
    return GrowthTable(p=tup.p, tuple_spec=tup.spec, rows=rows)
