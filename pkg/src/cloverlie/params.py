"""Parameter tuples and weight bookkeeping.

A parameter tuple fixes the prime p and, per generation i, a pair of positive
integers (S_i, R_i).  Generation i contributes three divided-power variables
x_i, y_i, z_i whose exponents are bounded by p^{S_i}, p^{R_i}, p^{R_i}.  The
tuple also determines all weight data: the common total weight of the three
generation-n pivot derivations, their multidegrees in the three generators,
and the weight window inside which a depth-N truncation is faithful.

Tuples are given by a rule: constant, periodic, explicit list, or one of two
analytic rules ("kappa", "qkappa") whose entries are floors of real-valued
expressions.  Floors are computed exactly with integer root arithmetic
whenever the expression is a rational power of an integer; otherwise interval
arithmetic with escalating precision is used and an ambiguous floor raises
instead of guessing.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

__all__ = [
    "TupleRuleError",
    "RoundingAmbiguityError",
    "WeightVector",
    "ParameterTuple",
    "integer_root_floor",
    "materialize",
    "pivot_weight",
    "pivot_multidegree",
    "trusted_weight_bound",
]


class TupleRuleError(ValueError):
    """A tuple rule is invalid or produced an invalid entry."""


class RoundingAmbiguityError(TupleRuleError):
    """A floor could not be certified even at maximal working precision."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def integer_root_floor(x: int, k: int) -> int:
    """Largest integer t >= 0 with t**k <= x, for x >= 0, k >= 1."""
    if x < 0 or k < 1:
        raise ValueError("integer_root_floor needs x >= 0 and k >= 1")
    if k == 1 or x == 0:
        return x
    t = 1 << (-(-x.bit_length() // k))
    while True:
        nt = ((k - 1) * t + x // t ** (k - 1)) // k
        if nt >= t:
            break
        t = nt
    while t ** k > x:
        t -= 1
    while (t + 1) ** k <= x:
        t += 1
    return t


def _floor_rational_power(base: int, expo: Fraction) -> int:
    """floor(base**expo) computed exactly, for base >= 1 and expo >= 0."""
    if base < 1 or expo < 0:
        raise ValueError("base must be >= 1 and exponent >= 0")
    num, den = expo.numerator, expo.denominator
    return integer_root_floor(base ** num, den)


@dataclass(frozen=True)
class WeightVector:
    """Multidegree of a homogeneous element: degrees in the three generators.

    Components are named after the generator kinds of :func:`pivot`: ``v`` is
    the x-family generator, ``w`` the y-family, ``u`` the z-family.  ``total``
    is the total weight (component sum).
    """

    v: int
    w: int
    u: int

    @property
    def total(self) -> int:
        return self.v + self.w + self.u

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.v, self.w, self.u)

    def __add__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(self.v + other.v, self.w + other.w, self.u + other.u)

    def __sub__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(self.v - other.v, self.w - other.w, self.u - other.u)

    def __mul__(self, scalar: int) -> "WeightVector":
        return WeightVector(self.v * scalar, self.w * scalar, self.u * scalar)

    __rmul__ = __mul__


_KINDS = ("constant", "periodic", "kappa", "qkappa", "explicit")

# Precision ladder (bits) for interval evaluation of nested exponentials.
_PREC_LADDER = (128, 256, 512, 1024, 4096, 16384, 65536)


class ParameterTuple:
    """The prime p together with a generation rule for the pairs (S_i, R_i).

    Instances are immutable apart from an internal, lock-protected cache of
    materialized pairs, so they are safe to share across threads.
    """

    def __init__(self, p: int, kind: str, **params):
        if not _is_prime(p):
            raise TupleRuleError(f"p must be prime, got {p}")
        if kind not in _KINDS:
            raise TupleRuleError(f"unknown tuple rule {kind!r}")
        self.p = p
        self.kind = kind
        self.params = params
        self._lock = threading.RLock()
        self._pairs: list[tuple[int, int]] = []
        self._grades: list[tuple[WeightVector, WeightVector, WeightVector]] = [
            (WeightVector(1, 0, 0), WeightVector(0, 1, 0), WeightVector(0, 0, 1))
        ]
        self._weights: list[int] = [1]
        self._validate()

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, p: int, S: int, R: int) -> "ParameterTuple":
        return cls(p, "constant", S=S, R=R)

    @classmethod
    def periodic(cls, p: int, pattern) -> "ParameterTuple":
        return cls(p, "periodic", pattern=tuple((int(s), int(r)) for s, r in pattern))

    @classmethod
    def kappa(cls, p: int, kappa) -> "ParameterTuple":
        return cls(p, "kappa", kappa=Fraction(kappa))

    @classmethod
    def qkappa(cls, p: int, q: int, kappa) -> "ParameterTuple":
        return cls(p, "qkappa", q=int(q), kappa=Fraction(kappa))

    @classmethod
    def explicit(cls, p: int, pairs) -> "ParameterTuple":
        return cls(p, "explicit", pairs=tuple((int(s), int(r)) for s, r in pairs))

    def _validate(self) -> None:
        k, prm = self.kind, self.params
        if k == "constant":
            if not (int(prm["S"]) >= 1 and int(prm["R"]) >= 1):
                raise TupleRuleError("constant rule needs S >= 1 and R >= 1")
        elif k in ("periodic", "explicit"):
            seq = prm["pattern"] if k == "periodic" else prm["pairs"]
            if len(seq) == 0:
                raise TupleRuleError(f"{k} rule needs at least one (S, R) pair")
            if any(s < 1 or r < 1 for s, r in seq):
                raise TupleRuleError(f"{k} rule entries must be >= 1")
        elif k == "kappa":
            kap = prm["kappa"]
            if not (0 < kap < 1):
                raise TupleRuleError("kappa rule needs 0 < kappa < 1")
        elif k == "qkappa":
            if prm["q"] < 1:
                raise TupleRuleError("qkappa rule needs q >= 1")
            if prm["kappa"] <= 0:
                raise TupleRuleError("qkappa rule needs kappa > 0")

    # -- rule evaluation ---------------------------------------------------

    def _rule_pair(self, n: int) -> tuple[int, int]:
        k, prm = self.kind, self.params
        if k == "constant":
            return (int(prm["S"]), int(prm["R"]))
        if k == "periodic":
            pattern = prm["pattern"]
            return pattern[n % len(pattern)]
        if k == "explicit":
            pairs = prm["pairs"]
            if n >= len(pairs):
                raise TupleRuleError(
                    f"explicit tuple has only {len(pairs)} entries, index {n} requested"
                )
            return pairs[n]
        if k == "kappa":
            expo = 1 / prm["kappa"] - 1
            return (max(1, _floor_rational_power(n + 1, expo)), 1)
        # qkappa: S_0 = 1 and S_n = floor(exp^(q)(lam*(n+2))) + 1 - sum of
        # earlier entries, where exp(lam*t) = p**(2*t/kappa).
        if n == 0:
            return (1, 1)
        prior = sum(s for s, _ in self._pairs[:n])
        s_n = self._tower_floor(n + 2) + 1 - prior
        if s_n < 1:
            raise TupleRuleError(f"tuple rule degenerate at index {n}")
        return (s_n, 1)

    def _tower_floor(self, t: int) -> int:
        """floor(exp^(q)(lam*t)) with lam = ln(p^2)/kappa, certified exactly."""
        q, kap = self.params["q"], self.params["kappa"]
        if q == 1:
            # exp(lam*t) = p**(2*t/kappa): an exact rational power of p.
            return _floor_rational_power(self.p, Fraction(2 * t, 1) / kap)
        iv = mpmath.iv
        saved = iv.prec
        try:
            for prec in _PREC_LADDER:
                iv.prec = prec
                val = 2 * iv.log(self.p) * (t * kap.denominator) / kap.numerator
                for _ in range(q):
                    val = iv.exp(val)
                lo, hi = mpmath.floor(val.a), mpmath.floor(val.b)
                if lo == hi and mpmath.isfinite(val.b):
                    return int(lo)
        finally:
            iv.prec = saved
        raise RoundingAmbiguityError(
            f"rounding ambiguous: exp tower at argument {t} straddles an integer"
        )

    # -- materialization ---------------------------------------------------

    def materialize(self, n: int) -> tuple[int, int]:
        """The pair (S_n, R_n); deterministic and cached."""
        if n < 0:
            raise ValueError("generation index must be >= 0")
        with self._lock:
            while len(self._pairs) <= n:
                self._pairs.append(self._rule_pair(len(self._pairs)))
            return self._pairs[n]

    def pairs(self, n: int) -> tuple[tuple[int, int], ...]:
        """The first n pairs (S_0, R_0), ..., (S_{n-1}, R_{n-1})."""
        if n > 0:
            self.materialize(n - 1)
        with self._lock:
            return tuple(self._pairs[:n])

    @property
    def materialized_length(self) -> int:
        with self._lock:
            return len(self._pairs)

    # -- weights -----------------------------------------------------------

    def _extend_weights(self, n: int) -> None:
        with self._lock:
            while len(self._weights) <= n:
                i = len(self._weights) - 1
                S, R = self.materialize(i)
                self._weights.append(
                    self._weights[i] * (self.p ** S + self.p ** R - 1)
                )

    def pivot_weight(self, n: int) -> int:
        """Common total weight of the three generation-n pivot derivations."""
        if n < 0:
            raise ValueError("generation index must be >= 0")
        self._extend_weights(n)
        return self._weights[n]

    def _extend_grades(self, n: int) -> None:
        with self._lock:
            while len(self._grades) <= n:
                i = len(self._grades) - 1
                S, R = self.materialize(i)
                ps, pr = self.p ** S, self.p ** R
                gv, gw, gu = self._grades[i]
                self._grades.append((
                    ps * gv + (pr - 1) * gw,
                    (ps - 1) * gv + pr * gw,
                    (ps - 1) * gv + pr * gu,
                ))

    def pivot_multidegree(self, n: int, kind: str) -> WeightVector:
        """Multidegree of the generation-n pivot of the given kind (v, w, u)."""
        if n < 0:
            raise ValueError("generation index must be >= 0")
        if kind not in ("v", "w", "u"):
            raise ValueError(f"kind must be one of v, w, u; got {kind!r}")
        self._extend_grades(n)
        gv, gw, gu = self._grades[n]
        return {"v": gv, "w": gw, "u": gu}[kind]

    def trusted_weight_bound(self, N: int) -> int:
        """Largest weight at which the depth-N truncation is faithful.

        Every monomial of length >= N has strictly larger total weight, so
        graded components up to this bound are represented exactly.
        """
        if N < 2:
            raise ValueError("truncation too shallow: depth must be >= 2")
        S, _ = self.materialize(N - 2)
        return (self.p ** S - 1) * self.pivot_weight(N - 2)

    # -- equality / rendering / serialization -------------------------------

    def _key(self):
        prm = self.params
        frozen = tuple(sorted(prm.items()))
        return (self.p, self.kind, frozen)

    def __eq__(self, other) -> bool:
        return isinstance(other, ParameterTuple) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"ParameterTuple(p={self.p}, spec={self.spec!r})"

    @property
    def spec(self) -> str:
        """The rule in the CLI grammar, e.g. ``constant:1,1`` or ``kappa:1/2``."""
        k, prm = self.kind, self.params
        if k == "constant":
            return f"constant:{prm['S']},{prm['R']}"
        if k == "periodic":
            return "periodic:" + ";".join(f"{s},{r}" for s, r in prm["pattern"])
        if k == "explicit":
            return "explicit:" + ";".join(f"{s},{r}" for s, r in prm["pairs"])
        if k == "kappa":
            return f"kappa:{prm['kappa']}"
        return f"qkappa:{prm['q']},{prm['kappa']}"

    @classmethod
    def from_spec(cls, p: int, text: str) -> "ParameterTuple":
        """Parse the CLI grammar: ``constant:S,R`` | ``periodic:S0,R0;S1,R1;...``
        | ``kappa:K`` | ``qkappa:q,K`` | ``explicit:S0,R0;...``."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        try:
            if kind == "constant":
                s, r = rest.split(",")
                return cls.constant(p, int(s), int(r))
            if kind in ("periodic", "explicit"):
                pairs = []
                for chunk in rest.split(";"):
                    s, r = chunk.split(",")
                    pairs.append((int(s), int(r)))
                maker = cls.periodic if kind == "periodic" else cls.explicit
                return maker(p, pairs)
            if kind == "kappa":
                return cls.kappa(p, Fraction(rest.strip()))
            if kind == "qkappa":
                q, kap = rest.split(",")
                return cls.qkappa(p, int(q), Fraction(kap.strip()))
        except TupleRuleError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise TupleRuleError(f"cannot parse tuple spec {text!r}: {exc}") from None
        raise TupleRuleError(f"unknown tuple rule {kind!r} in spec {text!r}")

    def to_json(self) -> dict:
        prm = self.params
        out: dict = {"p": self.p, "kind": self.kind, "length": self.materialized_length}
        if self.kind == "constant":
            out["params"] = {"S": prm["S"], "R": prm["R"]}
        elif self.kind == "periodic":
            out["params"] = {"pattern": [list(pr) for pr in prm["pattern"]]}
        elif self.kind == "explicit":
            out["params"] = {"pairs": [list(pr) for pr in prm["pairs"]]}
        elif self.kind == "kappa":
            out["params"] = {"kappa": str(prm["kappa"])}
        else:
            out["params"] = {"q": prm["q"], "kappa": str(prm["kappa"])}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ParameterTuple":
        p, kind, prm = int(obj["p"]), obj["kind"], obj.get("params", {})
        if kind == "constant":
            return cls.constant(p, int(prm["S"]), int(prm["R"]))
        if kind == "periodic":
            return cls.periodic(p, prm["pattern"])
        if kind == "explicit":
            return cls.explicit(p, prm["pairs"])
        if kind == "kappa":
            return cls.kappa(p, Fraction(prm["kappa"]))
        if kind == "qkappa":
            return cls.qkappa(p, int(prm["q"]), Fraction(prm["kappa"]))
        raise TupleRuleError(f"unknown tuple rule {kind!r} in JSON form")


# Module-level operation aliases matching the library's functional surface.

def materialize(tup: ParameterTuple, n: int) -> tuple[int, int]:
    return tup.materialize(n)


def pivot_weight(tup: ParameterTuple, n: int) -> int:
    return tup.pivot_weight(n)


def pivot_multidegree(tup: ParameterTuple, n: int, kind: str) -> WeightVector:
    return tup.pivot_multidegree(n, kind)


def trusted_weight_bound(tup: ParameterTuple, N: int) -> int:
    return tup.trusted_weight_bound(N)
