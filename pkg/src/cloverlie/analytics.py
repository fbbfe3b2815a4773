"""Growth analytics over exact counting data.

Closed-form growth exponents for periodic rules, certified density scans
over (S, R) grids, explicit finite-weight growth bound chains, and
diagnostic asymptotic-exponent fits read off growth tables.

Every pass/fail decision here is either an exact big-integer / rational
comparison or an outward-rounded interval comparison, so a reported pass
is certified rather than an artifact of floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

import mpmath

from .closure import VerificationReport
from .monomials import GrowthTable, count_descriptors, family_totals
from .params import ParameterTuple


def _float_down(x) -> float:
    """Largest float <= the exact value x (an mpmath mpf endpoint)."""
    f = float(mpmath.mpf(x))
    return f if mpmath.mpf(f) <= x else math.nextafter(f, -math.inf)


def _float_up(x) -> float:
    """Smallest float >= the exact value x (an mpmath mpf endpoint)."""
    f = float(mpmath.mpf(x))
    return f if mpmath.mpf(f) >= x else math.nextafter(f, math.inf)


# -- closed-form growth exponent for periodic rules ---------------------------


@dataclass(frozen=True)
class GKReport:
    """Growth exponent of a periodic rule in closed form.

    weight_factor is the total-weight multiplier accumulated over one full
    period of the rule; letter_budget is the number of base-p digits one
    period contributes per monomial position.  The growth exponent equals
    letter_budget * ln p / ln weight_factor; it always lies in [1, 3],
    which the constructor certifies by exact integer comparisons.
    """

    p: int
    tuple_spec: str
    mu: int  # weight multiplier over one period
    sigma: int  # sum of S_i + 2 R_i over one period
    lam: str  # sigma * ln p / ln mu, rendered as a decimal string
    period: int

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    def lam_interval(self) -> tuple[float, float]:
        """Certified enclosure of the exponent as a float pair."""
        iv = mpmath.iv
        saved = iv.prec
        try:
            iv.prec = max(120, self.mu.bit_length() + 32)
            val = self.sigma * iv.log(self.p) / iv.log(self.mu)
            return (_float_down(val.a), _float_up(val.b))
        finally:
            iv.prec = saved

    def describe(self) -> str:
        return (
            f"rule {self.tuple_spec} (p={self.p}): mu={self.mu} "
            f"sigma={self.sigma} exponent={self.lam}"
        )


def _period_pattern(tup: ParameterTuple) -> list[tuple[int, int]]:
    if tup.kind == "constant":
        return [tup.materialize(0)]
    if tup.kind == "periodic":
        return list(tup.params["pattern"])
    raise ValueError(
        "closed-form growth exponent requires a constant or periodic rule; "
        f"got kind {tup.kind!r}"
    )


def _mu_sigma(p: int, pattern: list[tuple[int, int]]) -> tuple[int, int]:
    mu, sigma = 1, 0
    for S, R in pattern:
        mu *= p**S + p**R - 1
        sigma += S + 2 * R
    return mu, sigma


def _render_ratio_of_logs(num: int, base_num: int, base_den: int) -> str:
    """num * ln(base_num) / ln(base_den) as a 12-significant-digit string."""
    saved = mpmath.mp.dps
    try:
        mpmath.mp.dps = 40
        val = num * mpmath.log(base_num) / mpmath.log(base_den)
        return mpmath.nstr(val, 12)
    finally:
        mpmath.mp.dps = saved


def gk_periodic(tup: ParameterTuple) -> GKReport:
    """Closed-form growth exponent report for a constant or periodic rule."""
    pattern = _period_pattern(tup)
    p = tup.p
    mu, sigma = _mu_sigma(p, pattern)
    psig = p**sigma
    if not (mu <= psig <= mu**3):
        raise ArithmeticError(
            f"certified range check failed: exponent for {tup.spec} "
            "falls outside [1, 3]"
        )
    return GKReport(
        p=p,
        tuple_spec=tup.spec,
        mu=mu,
        sigma=sigma,
        lam=_render_ratio_of_logs(sigma, p, mu),
        period=len(pattern),
    )


# -- density scan over constant (S, R) grids ----------------------------------


@dataclass
class DensityScan:
    """Sorted growth exponents of every constant rule on an (S, R) grid."""

    p: int
    S_max: int
    R_max: int
    interval: tuple[float, float]
    entries: list[tuple[float, int, int]]  # (approx exponent, S, R), ascending
    all_in_range: bool  # every exponent certified inside [1, 3]
    max_gap: float  # certified upper bound on the widest uncovered stretch

    @property
    def lambda_min(self) -> float:
        return self.entries[0][0]

    @property
    def lambda_max(self) -> float:
        return self.entries[-1][0]


def _exponent_le(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """sigma_a ln p / ln mu_a <= sigma_b ln p / ln mu_b, exactly."""
    mu_a, sig_a = a
    mu_b, sig_b = b
    return mu_b**sig_a <= mu_a**sig_b


def gk_density_scan(
    p: int,
    S_max: int,
    R_max: int,
    interval: tuple[float, float] = (1.1, 2.9),
) -> DensityScan:
    """Exponents of all constant rules with 1 <= S <= S_max, 1 <= R <= R_max.

    The list is sorted with exact integer comparisons; the gap statistic is
    an outward-rounded upper bound on the widest stretch of the target
    interval containing no exponent, so max_gap <= g certifies density at
    resolution g.
    """
    if S_max < 1 or R_max < 1:
        raise ValueError("grid bounds must be >= 1")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError("interval must satisfy a < b")

    items: list[tuple[float, int, int, int, int]] = []  # (approx, S, R, mu, sigma)
    all_in_range = True
    for S in range(1, S_max + 1):
        for R in range(1, R_max + 1):
            mu = p**S + p**R - 1
            sigma = S + 2 * R
            psig = p**sigma
            if not (mu <= psig <= mu**3):
                all_in_range = False
            approx = float(sigma * mpmath.log(p) / mpmath.log(mu))
            items.append((approx, S, R, mu, sigma))

    items.sort(key=lambda it: it[0])
    ordered = all(
        _exponent_le((items[i][3], items[i][4]), (items[i + 1][3], items[i + 1][4]))
        for i in range(len(items) - 1)
    )
    if not ordered:  # float sort missed a near-tie; redo with exact comparisons
        def cmp(x, y):
            if (x[3], x[4]) == (y[3], y[4]):
                return 0
            if _exponent_le((x[3], x[4]), (y[3], y[4])):
                return -1
            return 1

        items.sort(key=cmp_to_key(cmp))

    iv = mpmath.iv
    saved = iv.prec
    try:
        iv.prec = max(120, max(it[3].bit_length() for it in items) + 32)
        vals = [it[4] * iv.log(p) / iv.log(it[3]) for it in items]
        gaps = [0.0]
        for u, v in zip(vals, vals[1:]):
            # count the stretch only when it can intersect the target interval
            if _float_up(v.b) > a and _float_down(u.a) < b:
                gaps.append(_float_up((v - u).b))
        gaps.append(max(0.0, _float_up(vals[0].b) - a))
        gaps.append(max(0.0, b - _float_down(vals[-1].a)))
    finally:
        iv.prec = saved

    return DensityScan(
        p=p,
        S_max=S_max,
        R_max=R_max,
        interval=(a, b),
        entries=[(it[0], it[1], it[2]) for it in items],
        all_in_range=all_in_range,
        max_gap=max(gaps),
    )


# -- certified enclosure of the tail product theta ----------------------------


def _kappa_tail(tup: ParameterTuple, I: int) -> Fraction | None:
    """Upper bound for sum_{i>I} p^(1-S_i) under the power-law rule.

    The rule S_i = floor((i+1)^d) repeats each value s for at most
    (s+1)^(1/d) - s^(1/d) + 1 <= (s+1)^ceil(1/d) indices (as s^(1/d) >= 1),
    so the tail is at most sum_{s >= s_min} (s+1)^D p^(1-s) with
    D = ceil(1/d), which a ratio test bounds by a geometric series.
    """
    p = tup.p
    kap = tup.params["kappa"]
    d = Fraction(1) / kap - 1  # > 0 since 0 < kappa < 1
    inv_d = Fraction(1) / d
    D = -((-inv_d.numerator) // inv_d.denominator)  # ceil(1/d)
    s_min = tup.materialize(I + 1)[0]
    rho = Fraction((s_min + 2) ** D, (s_min + 1) ** D * p)
    if rho >= 1:
        return None
    first = Fraction((s_min + 1) ** D * p, p**s_min)
    return first / (1 - rho)


def _qkappa_tail(tup: ParameterTuple, I: int) -> Fraction | None:
    """Upper bound for sum_{i>I} p^(1-S_i) under the tower rule.

    Writes the rule's partial sums as floors of G(n) = exp^(q)(lam*(n+2)).
    Once the certified conditions (true increments of G at least 3 and
    growing by a factor >= 2 from index I on) hold, consecutive S values
    rise by at least 1, giving a geometric tail p^(1-S_{I+1}) * p/(p-1).
    """
    if I < 2:
        return None
    p = tup.p
    q = tup.params["q"]
    kap = tup.params["kappa"]
    iv = mpmath.iv
    saved = iv.prec
    try:
        for prec in (80, 160, 320, 640):
            iv.prec = prec
            lam = 2 * iv.log(p) * kap.denominator / kap.numerator

            def tower(t: int, levels: int):
                val = lam * t
                for _ in range(levels):
                    val = iv.exp(val)
                return val

            # increments of the inner tower are nondecreasing (convexity),
            # so certifying them at index I certifies them beyond it
            inner_gap = tower(I + 2, q - 1) - tower(I + 1, q - 1)
            ratio_ok = inner_gap.a > iv.log(2).b
            delta_prev = tower(I + 1, q) - tower(I, q)  # G(I) - G(I-1)
            size_ok = delta_prev.a > 3
            if ratio_ok and size_ok:
                s_next = tup.materialize(I + 1)[0]
                return Fraction(p**2, (p - 1) * p**s_next)
    finally:
        iv.prec = saved
    return None


def theta_bounds(
    tup: ParameterTuple, target_index: int = 0
) -> tuple[Fraction, Fraction]:
    """Certified rational enclosure of prod_{i>=0} (1 + p^(1-S_i)).

    Returns (lo, hi) with lo <= product <= hi.  lo is the partial product
    through an index I >= target_index; the remaining factors are bounded
    via sum_{i>I} p^(1-S_i) =: T <= 1, using 1 + x <= e^x and e^T <= 1+2T.
    Only rules whose S_i provably diverge (power-law and tower rules) admit
    such a certificate.
    """
    p = tup.p
    if tup.kind == "kappa":
        tail_fn, base = _kappa_tail, 8
    elif tup.kind == "qkappa":
        tail_fn, base = _qkappa_tail, 3
    else:
        raise ValueError(
            "certified tail bounds require a power-law or tower rule; "
            f"got kind {tup.kind!r}"
        )

    I = max(base, target_index)
    tail: Fraction | None = None
    for _ in range(40):
        tail = tail_fn(tup, I)
        if tail is not None and tail <= Fraction(1, 2):
            break
        I *= 2
    else:
        raise ArithmeticError("tail certification failed for rule " + tup.spec)

    lo = Fraction(1)
    for S, _ in tup.pairs(I + 1):
        lo *= 1 + Fraction(p, p**S)
    hi = lo * (1 + 2 * tail)
    return lo, hi


# -- finite-weight growth bound chains -----------------------------------------


def _require_same_rule(tup: ParameterTuple, table: GrowthTable) -> None:
    if table.p != tup.p or table.tuple_spec != tup.spec:
        raise ValueError(
            f"table was computed for p={table.p} rule {table.tuple_spec!r}, "
            f"not p={tup.p} rule {tup.spec!r}"
        )


def check_growth_sandwich(tup: ParameterTuple, table: GrowthTable) -> VerificationReport:
    """Two-sided growth bounds for a periodic rule, exactly at every row.

    With mu and sigma the per-period weight multiplier and digit budget and
    n = n(m) the least n with mu^n >= m, every row must satisfy

        total(m) * p^(3*sigma) >= p^(sigma*n)                (lower)
        total(m) <= p^(sigma*(n+1)) + p^(sigma*n) + sigma*n  (upper)

    as plain integer comparisons.
    """
    pattern = _period_pattern(tup)
    _require_same_rule(tup, table)
    p = tup.p
    mu, sigma = _mu_sigma(p, pattern)
    rep = VerificationReport(suite="growth-sandwich")
    p3s = p ** (3 * sigma)
    bound_cache: dict[int, tuple[int, int]] = {}
    mu_pow, n = 1, 0
    for row in table.rows:
        m, total = row[0], row[5]
        while mu_pow < m:
            mu_pow *= mu
            n += 1
        cached = bound_cache.get(n)
        if cached is None:
            cached = bound_cache[n] = (
                p ** (sigma * (n + 1)) + p ** (sigma * n) + sigma * n,
                p ** (sigma * n),
            )
        upper, lower_rhs = cached
        rep.check(
            "sandwich-upper",
            total <= upper,
            witness=f"total={total} exceeds {upper}",
            m=m,
            n=n,
        )
        rep.check(
            "sandwich-lower",
            total * p3s >= lower_rhs,
            witness=f"total={total} * p^(3 sigma) below p^(sigma n)={lower_rhs}",
            m=m,
            n=n,
        )
    return rep


def _require_unit_second_bound(tup: ParameterTuple) -> None:
    if tup.kind in ("kappa", "qkappa"):
        return  # these rules fix R_i = 1 by construction
    if tup.kind == "constant":
        seq = [(tup.params["S"], tup.params["R"])]
    elif tup.kind == "periodic":
        seq = list(tup.params["pattern"])
    else:
        seq = list(tup.params["pairs"])
    if any(r != 1 for _, r in seq):
        raise ValueError("bounds require R≡1")
    raise ValueError(
        "quasilinear bounds require a power-law or tower rule; "
        f"got kind {tup.kind!r}"
    )


def _ladder_positions(tup: ParameterTuple, weights: list[int]) -> list[int]:
    """For each weight m >= 2 (ascending) the n with wt(v_{n-1}) < m <= wt(v_n)."""
    out = []
    n = 1
    for m in weights:
        while tup.pivot_weight(n) < m:
            n += 1
        out.append(n)
    return out


def check_quasilinear_bounds(
    tup: ParameterTuple, table: GrowthTable
) -> VerificationReport:
    """Explicit finite-weight bound chain for power-law / tower rules.

    For each row m >= 2, with n = n(m) the pivot-ladder position
    (wt(v_{n-1}) < m <= wt(v_n)), m0 = wt(v_{n-1}) and m1 = floor(m/m0):

      * upper: cumulative second-family counts (standard + power) stay
        below (p^2 + 2p + 2) * m * p^(2n) + n;
      * f1: second-family standard monomials of length n+1 and weight <= m
        number at most p^2 * m1 * m0 * p^(2n);
      * lower: cumulative standard second-family count times a certified
        rational lower bound for theta = prod (1 + p^(1-S_i)) is at least
        (m1 - p + 1) * m0 * p^(2(n-1)) (trivially true when m1 < p).

    All three are exact integer / rational comparisons; rows with m < 2
    have no ladder position and are skipped.
    """
    _require_unit_second_bound(tup)
    _require_same_rule(tup, table)
    p = tup.p
    rep = VerificationReport(suite="quasilinear-bounds")
    rows = [row for row in table.rows if row[0] >= 2]
    if not rows:
        return rep
    ns = _ladder_positions(tup, [row[0] for row in rows])
    theta_lo, _ = theta_bounds(tup, target_index=ns[-1] + 2)
    for row, n in zip(rows, ns):
        m, second, power_second = row[0], row[2], row[4]
        m0 = tup.pivot_weight(n - 1)
        m1 = m // m0
        p2n = p ** (2 * n)
        upper = (p * p + 2 * p + 2) * m * p2n + n
        rep.check(
            "quasilinear-upper",
            second + power_second <= upper,
            witness=f"count={second + power_second} exceeds {upper}",
            m=m,
            n=n,
        )
        f1 = count_descriptors(tup, m, family="second", length=n + 1)
        f1_bound = p * p * m1 * m0 * p2n
        rep.check(
            "quasilinear-f1",
            f1 <= f1_bound,
            witness=f"length-{n + 1} count {f1} exceeds {f1_bound}",
            m=m,
            n=n,
        )
        target = (m1 - p + 1) * m0 * p ** (2 * (n - 1))
        ok = target <= 0 or Fraction(second) * theta_lo >= target
        rep.check(
            "quasilinear-lower",
            ok,
            witness=f"count={second} * theta_lo below {target}",
            m=m,
            n=n,
        )
    return rep


def check_cubic_bounds(tup: ParameterTuple, weights) -> VerificationReport:
    """Cubic bounds on second-family counts at the given weights.

    For each weight m >= 2, with n = n(m) the pivot-ladder position: the
    number of length-(n+1) standard second-family monomials of weight <= m
    must stay below m^3; the length-n count at most 3 m^3; and the total
    number of all shorter second-family standard monomials (lengths
    <= n-1, no weight restriction) at most 2 m^3.  Exact integers.
    """
    rep = VerificationReport(suite="cubic-bounds")
    ms = sorted({int(m) for m in weights if m >= 2})
    ns = _ladder_positions(tup, ms)
    for m, n in zip(ms, ns):
        cube = m**3
        f1 = count_descriptors(tup, m, family="second", length=n + 1)
        rep.check(
            "cubic-f1",
            f1 < cube,
            witness=f"length-{n + 1} count {f1} not below {cube}",
            m=m,
            n=n,
        )
        f2 = count_descriptors(tup, m, family="second", length=n)
        rep.check(
            "cubic-f2",
            f2 <= 3 * cube,
            witness=f"length-{n} count {f2} exceeds {3 * cube}",
            m=m,
            n=n,
        )
        shorter = sum(family_totals(tup, L)["second"] for L in range(n))
        rep.check(
            "cubic-f3",
            shorter <= 2 * cube,
            witness=f"shorter-length total {shorter} exceeds {2 * cube}",
            m=m,
            n=n,
        )
    return rep


# -- asymptotic exponent fits --------------------------------------------------


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares exponent fit over the top decade of a growth table.

    level "gk" fits ln(total) against ln m; level 0 fits
    ln(ln(total/m)) against ln(ln m); level q >= 1 fits ln(total/m)
    against ln(ln^(q) m).  Purely diagnostic: the fit reports beta, the
    companion constant, the window and residuals, and never passes or
    fails anything.
    """

    level: object  # "gk" or an int >= 0
    beta: float
    constant: float
    window: tuple[int, int]
    rows_used: int
    residual_rms: float
    residual_max: float

    def describe(self) -> str:
        return (
            f"level {self.level}: beta={self.beta:.6f} constant={self.constant:.6g} "
            f"window=[{self.window[0]}, {self.window[1]}] rows={self.rows_used} "
            f"residual rms={self.residual_rms:.3g} max={self.residual_max:.3g}"
        )


def _parse_level(level) -> object:
    if isinstance(level, str):
        text = level.strip().lower()
        if text == "gk":
            return "gk"
        try:
            level = int(text)
        except ValueError:
            raise ValueError(
                f"level must be 'gk' or a nonnegative integer, got {level!r}"
            ) from None
    if isinstance(level, int) and level >= 0:
        return level
    raise ValueError(f"level must be 'gk' or a nonnegative integer, got {level!r}")


def _iterated_log(m: int, q: int) -> float | None:
    """ln applied q times to m, or None when it leaves the positive axis."""
    val = math.log(m)  # exact-int aware, no float overflow
    for _ in range(q - 1):
        if val <= 0:
            return None
        val = math.log(val)
    return val if val > 0 else None


def estimate_exponent(table: GrowthTable, level) -> AsymptoticFit:
    """Fit the level's exponent model over the top decade of the table.

    Requires at least 8 rows spanning at least two decades of weight;
    raises ValueError("window too small") otherwise.  Multiplying every
    count by a constant moves only the companion constant for the linear
    models (level "gk" and q >= 1); the level-0 model is fitted through
    its double-log linearization.
    """
    lv = _parse_level(level)
    if len(table.rows) < 8:
        raise ValueError("window too small")
    weights = [row[0] for row in table.rows]
    m_hi = max(weights)
    if m_hi < 100 * min(weights):
        raise ValueError("window too small")

    pts: list[tuple[float, float]] = []
    window_ms: list[int] = []
    for row in table.rows:
        m, total = row[0], row[5]
        if 10 * m < m_hi:
            continue
        if lv == "gk":
            x, y = math.log(m), math.log(total)
        elif lv == 0:
            ratio_log = math.log(total) - math.log(m)
            inner = math.log(m)
            if ratio_log <= 0 or inner <= 0:
                continue
            x, y = math.log(inner), math.log(ratio_log)
        else:
            xin = _iterated_log(m, lv)
            if xin is None:
                continue
            x, y = math.log(xin), math.log(total) - math.log(m)
        pts.append((x, y))
        window_ms.append(m)

    if len(pts) < 8:
        raise ValueError("window too small")

    n = len(pts)
    mean_x = sum(x for x, _ in pts) / n
    mean_y = sum(y for _, y in pts) / n
    sxx = sum((x - mean_x) ** 2 for x, _ in pts)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in pts)
    if sxx == 0:
        raise ValueError("window too small")
    beta = sxy / sxx
    intercept = mean_y - beta * mean_x
    residuals = [y - (beta * x + intercept) for x, y in pts]
    rms = math.sqrt(sum(r * r for r in residuals) / n)

    return AsymptoticFit(
        level=lv,
        beta=beta,
        constant=math.exp(intercept),
        window=(min(window_ms), max(window_ms)),
        rows_used=n,
        residual_rms=rms,
        residual_max=max(abs(r) for r in residuals),
    )
