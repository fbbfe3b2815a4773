"""End-to-end acceptance suite.

Each test prints exactly one line, "PASS — <what was verified>" or
"FAIL — <what was verified> (<detail>)", and enforces its stated runtime
budget.  Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import random
import time

from cloverlie import (
    DpContext,
    ParameterTuple,
    ad_power,
    bracket,
    check_cubic_bounds,
    check_growth_sandwich,
    check_quasilinear_bounds,
    estimate_exponent,
    gk_density_scan,
    gk_periodic,
    growth_table,
    jacobson_remainder,
    p_power,
    pivot_multidegree,
    pivot_weight,
    relation_suite,
    sample_nil_chains,
    self_similarity_decompose,
    verify_basis_theorem,
    verify_grading,
)
from cloverlie.params import WeightVector
from conftest import random_explicit_tuple, random_zone_element

TUP2 = ParameterTuple.constant(2, 1, 1)
TUP3 = ParameterTuple.constant(3, 1, 1)


def conclude(label: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail and not ok else ""
    print(f"{tag} — {label}{suffix}")
    assert ok, f"{label}: {detail}"


def test_relation_identities():
    t0 = time.monotonic()
    reports = [relation_suite(TUP2, 4), relation_suite(TUP3, 4)]
    elapsed = time.monotonic() - t0
    ok = all(r.passed for r in reports) and elapsed < 60
    detail = "; ".join(r.summary().splitlines()[0] for r in reports)
    conclude(
        "defining relations hold exactly at depth 4 for p = 2 and p = 3",
        ok,
        f"{detail}; {elapsed:.1f}s",
    )


def test_basis_dimensions_and_spans():
    t0 = time.monotonic()
    reports = [verify_basis_theorem(TUP2, 4), verify_basis_theorem(TUP3, 3)]
    elapsed = time.monotonic() - t0
    ok = all(r.passed for r in reports) and elapsed < 300
    conclude(
        "closure dimensions match monomial counts at every in-zone weight; "
        "x/y-type span closes under bracket and z-type span absorbs it",
        ok,
        f"failures={[r.failures() for r in reports]}; {elapsed:.1f}s",
    )


def test_grading_exact():
    reports = [verify_grading(TUP2, 4), verify_grading(TUP3, 3)]
    ok = all(r.passed for r in reports)
    conclude(
        "brackets and p-powers of graded basis vectors land in the exact "
        "predicted multidegree, zero tolerance",
        ok,
        "; ".join(r.summary().splitlines()[0] for r in reports),
    )


def test_weight_formulas_random_tuples():
    rng = random.Random(20260815)
    bad = 0
    for _ in range(100):
        tup = random_explicit_tuple(rng, primes=(2, 3, 5), max_S=3, max_R=3, length=7)
        p = tup.p
        pairs = tup.pairs(7)
        gv, gw, gu = (
            WeightVector(1, 0, 0),
            WeightVector(0, 1, 0),
            WeightVector(0, 0, 1),
        )
        weight = 1
        for n in range(7):
            if pivot_weight(tup, n) != weight:
                bad += 1
            for kind, g in (("v", gv), ("w", gw), ("u", gu)):
                got = pivot_multidegree(tup, n, kind)
                if got != g or got.total != weight:
                    bad += 1
            if gv.u != 0:  # x/y-type degrees never leak into the z-slot
                bad += 1
            expect_u3 = p ** sum(r for _, r in pairs[:n])
            if gu.u != expect_u3:
                bad += 1
            S, R = pairs[n]
            a, b = p**S, p**R
            gv, gw, gu = (
                gv * a + gw * (b - 1),
                gv * (a - 1) + gw * b,
                gv * (a - 1) + gu * b,
            )
            weight *= a + b - 1
    conclude(
        "pivot weights and multidegrees match the closed product/recurrence "
        "forms exactly on 100 seeded tuples, generations 0..6",
        bad == 0,
        f"{bad} mismatches",
    )


def test_growth_sandwich_and_slope():
    t0 = time.monotonic()
    table = growth_table(TUP2, 59049)
    rep = check_growth_sandwich(TUP2, table)
    fit = estimate_exponent(table, level="gk")
    lam_lo, lam_hi = gk_periodic(TUP2).lam_interval()
    slope_ok = fit.beta - 0.10 <= lam_lo and lam_hi <= fit.beta + 0.10
    elapsed = time.monotonic() - t0
    ok = rep.passed and slope_ok and elapsed < 120
    conclude(
        "counted growth to weight 59049 sits inside the geometric sandwich at "
        "every row and the fitted slope is within 0.10 of the certified "
        "exponent",
        ok,
        f"sandwich={rep.counts()}, beta={fit.beta:.6f}, "
        f"lambda=[{lam_lo:.6f},{lam_hi:.6f}], {elapsed:.1f}s",
    )


def test_cubic_ceiling_random_tuples():
    rng = random.Random(606)
    all_ok = True
    worst = ""
    for _ in range(20):
        tup = random_explicit_tuple(rng, primes=(2, 3, 5), max_S=3, max_R=3, length=6)
        tops = [pivot_weight(tup, n) for n in range(1, 6)]
        weights = {2, tops[-1]}
        for lo, hi in zip(tops, tops[1:]):
            weights.update((lo, lo + 1, (lo + hi) // 2))
        weights = sorted(w for w in weights if 2 <= w <= tops[-1])
        rep = check_cubic_bounds(tup, weights)
        if not rep.passed:
            all_ok = False
            worst = f"{tup.spec}: {rep.failures()[:2]}"
    conclude(
        "per-length word counts stay under the cubic ceiling (f1 < m^3, "
        "f2 <= 3m^3, short-word total <= 2m^3) for 20 seeded tuples up to "
        "the generation-5 pivot weight",
        all_ok,
        worst,
    )


def test_density_scan_grid():
    t0 = time.monotonic()
    scan = gk_density_scan(2, 64, 64)
    elapsed = time.monotonic() - t0
    ok = (
        len(scan.entries) == 64 * 64
        and scan.all_in_range
        and scan.max_gap <= 0.1
        and elapsed < 120
    )
    conclude(
        "all 4096 growth exponents on the 64x64 grid are certified inside "
        "[1,3] and cover [1.1,2.9] with gaps at most 0.1",
        ok,
        f"in_range={scan.all_in_range}, gap={scan.max_gap:.6f}, {elapsed:.1f}s",
    )


def test_nil_sampling_depth5():
    t0 = time.monotonic()
    results = sample_nil_chains(TUP2, 5, 200, seed=20260815, max_terms=5)
    elapsed = time.monotonic() - t0
    statuses = {r.status for r in results}
    conclusive = sum(r.status == "nil" for r in results)
    ok = (
        statuses <= {"nil", "inconclusive"}
        and conclusive >= 0.60 * len(results)
        and len(results) == 200
        and elapsed < 600
    )
    conclude(
        "200 seeded in-zone elements: every conclusive p-power chain reaches "
        "zero and at least 60% are conclusive inside the trusted zone",
        ok,
        f"statuses={statuses}, conclusive={conclusive}/200, {elapsed:.1f}s",
    )


def test_quasilinear_chains():
    t0 = time.monotonic()
    kap = ParameterTuple.kappa(2, "1/2")
    kap_table = growth_table(kap, pivot_weight(kap, 4))
    kap_rep = check_quasilinear_bounds(kap, kap_table)

    tow = ParameterTuple.qkappa(2, 1, "1")
    w1, w2, w3 = (pivot_weight(tow, n) for n in (1, 2, 3))
    checkpoints = sorted(
        {2, 3, w1 - 1, w1, w1 + 1, (w1 + w2) // 2, w2 - 1, w2, w2 + 1, (w2 + w3) // 2, w3}
    )
    tow_table = growth_table(tow, w3, weights=checkpoints)
    tow_rep = check_quasilinear_bounds(tow, tow_table)
    elapsed = time.monotonic() - t0
    ok = kap_rep.passed and tow_rep.passed and elapsed < 600
    conclude(
        "upper/lower linear-in-m bound chains hold with certified "
        "infinite-product enclosures: power-law rule at every weight to 2295, "
        "tower rule at ladder checkpoints",
        ok,
        f"kappa={kap_rep.counts()}, tower={tow_rep.counts()}, {elapsed:.1f}s",
    )


def test_restricted_axioms_and_self_similarity():
    rng = random.Random(4242)
    bad = 0
    for p in (2, 3):
        tup = ParameterTuple.constant(p, 1, 1)
        depth = 3 if p == 2 else 2
        ctx = DpContext(tup, depth)
        cap = tup.trusted_weight_bound(depth)
        for _ in range(25):
            D = random_zone_element(ctx, tup, cap, rng, max_terms=3)
            E = random_zone_element(ctx, tup, cap, rng, max_terms=3)
            if bracket(p_power(D), E) != ad_power(D, E, p):
                bad += 1
            rem = jacobson_remainder(D, E)
            expected = (
                rem.zero(ctx) if p == 2 else bracket(E, bracket(E, D))
            )
            if rem != expected:
                bad += 1
    sim_ok = all(
        [
            self_similarity_decompose(TUP2, 3).passed,
            self_similarity_decompose(TUP3, 3).passed,
            self_similarity_decompose(ParameterTuple.periodic(2, [(1, 1), (2, 1)]), 4).passed,
            self_similarity_decompose(ParameterTuple.periodic(3, [(1, 1), (2, 1)]), 4).passed,
        ]
    )
    conclude(
        "p-power map is restricted (ad of a power is the power of ad; sum "
        "formula closed forms) on 50 seeded pairs, and the algebra "
        "decomposes along its first block for constant and period-2 rules",
        bad == 0 and sim_ok,
        f"{bad} identity failures, self-similarity={sim_ok}",
    )
