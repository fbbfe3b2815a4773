"""Brute-force restricted closure over F_p and the verification suites.

The closure engine seeds an echelonized, multidegree-graded basis with the
three generators and closes it under brackets (while weight sums stay within
the cap) and p-th powers (while p times the weight stays within the cap).
The cap may never exceed the trusted weight bound of the truncation: below
that bound the truncated model is a faithful image of the full algebra, so
equalities proved here are equalities of the real object.

Suites return VerificationReport values: every check is pass / fail /
outside-trusted-zone, failures carry a rendered witness, and reports are
deterministic (byte-identical across runs).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .params import ParameterTuple
from .dpalgebra import AlgebraElement, ContextMismatchError, DpContext
from .derivations import (
    Derivation,
    ad_power,
    bracket,
    p_power,
    p_power_iter,
    pivot,
)
from .monomials import (
    MonomialDescriptor,
    enumerate_descriptors,
    monomial_weight,
    realize,
)

__all__ = [
    "GradedBasis",
    "VerificationReport",
    "CheckRecord",
    "NilResult",
    "restricted_closure",
    "verify_basis_theorem",
    "verify_grading",
    "relation_suite",
    "nil_index",
    "sample_nil_chains",
    "self_similarity_decompose",
]


# -- reports ---------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    check_id: str
    params: tuple[tuple[str, object], ...]
    status: str  # pass | fail | outside-trusted-zone
    witness: str | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "suite": self.suite,
                "check": self.check_id,
                "params": dict(self.params),
                "status": self.status,
                "witness": self.witness,
            },
            sort_keys=True,
        )


@dataclass
class VerificationReport:
    suite: str
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, check_id: str, status: str, witness: str | None = None, **params):
        self.records.append(
            CheckRecord(
                suite=self.suite,
                check_id=check_id,
                params=tuple(sorted(params.items())),
                status=status,
                witness=witness,
            )
        )

    def check(self, check_id: str, ok: bool, witness: str = "", **params):
        self.add(check_id, "pass" if ok else "fail", witness if not ok else None, **params)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "outside-trusted-zone": 0}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.status == "fail"]

    def to_json_lines(self) -> str:
        return "\n".join(r.to_json() for r in self.records)

    def summary(self) -> str:
        c = self.counts()
        lines = [
            f"suite {self.suite}: {c['pass']} pass, {c['fail']} fail, "
            f"{c['outside-trusted-zone']} outside trusted zone"
        ]
        for r in self.records:
            if r.status != "pass":
                ps = " ".join(f"{k}={v}" for k, v in r.params)
                lines.append(f"  {r.status.upper()}: {r.check_id} {ps}")
                if r.witness:
                    lines.append(f"    witness: {r.witness}")
        return "\n".join(lines)

    def merge(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)


# -- echelonized graded basis ------------------------------------------------------


def _coord_key(ctx: DpContext, var, level, mono):
    vec = tuple(mono.exponent(v) for v in ctx.variables())
    return (var, level, mono.degree(), vec)


def _derivation_to_vec(D: Derivation) -> dict:
    out = {}
    for (var, level), f in D.coeffs.items():
        for mono, c in f.terms.items():
            out[_coord_key(D.ctx, var, level, mono)] = c
    return out


def _vec_to_derivation(ctx: DpContext, vec: dict) -> Derivation:
    from .dpalgebra import DpMonomial

    coeffs: dict = {}
    for (var, level, _deg, expvec), c in vec.items():
        mono = DpMonomial(
            tuple((v, e) for v, e in zip(ctx.variables(), expvec) if e)
        )
        coeffs.setdefault((var, level), {})[mono] = c
    res = Derivation(ctx)
    for key, monos in coeffs.items():
        el = AlgebraElement(ctx)
        el.terms = monos
        res.coeffs[key] = el
    return res


class _Echelon:
    """Reduced echelon rows over F_p keyed by their leading coordinate."""

    __slots__ = ("p", "rows")

    def __init__(self, p: int):
        self.p = p
        self.rows: dict[tuple, dict] = {}

    def reduce(self, vec: dict) -> dict:
        p = self.p
        vec = dict(vec)
        while True:
            hits = [k for k in vec if k in self.rows]
            if not hits:
                return vec
            k = min(hits)
            c = vec[k]
            for rk, rc in self.rows[k].items():
                nc = (vec.get(rk, 0) - c * rc) % p
                if nc:
                    vec[rk] = nc
                else:
                    vec.pop(rk, None)

    def insert(self, vec: dict):
        """Reduce and insert; returns the new reduced row or None if dependent."""
        p = self.p
        vec = self.reduce(vec)
        if not vec:
            return None
        lead = min(vec)
        inv = pow(vec[lead], p - 2, p)
        vec = {k: (c * inv) % p for k, c in vec.items()}
        for rlead, row in self.rows.items():
            c = row.get(lead)
            if c:
                for k, vc in vec.items():
                    nc = (row.get(k, 0) - c * vc) % p
                    if nc:
                        row[k] = nc
                    else:
                        row.pop(k, None)
        self.rows[lead] = vec
        return vec

    def member(self, vec: dict) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)


class GradedBasis:
    """Echelonized basis of a restricted closure, graded by multidegree."""

    def __init__(self, ctx: DpContext, cap: int):
        self.ctx = ctx
        self.cap = cap
        self.components: dict[tuple[int, int, int], _Echelon] = {}
        # insertion-ordered: (multidegree, canonical reduced vector, word)
        self.vectors: list[tuple[tuple[int, int, int], Derivation, str]] = []

    def _echelon(self, md) -> _Echelon:
        ech = self.components.get(md)
        if ech is None:
            ech = self.components[md] = _Echelon(self.ctx.p)
        return ech

    def insert(self, md, D: Derivation, word: str) -> bool:
        row = self._echelon(md).insert(_derivation_to_vec(D))
        if row is None:
            return False
        self.vectors.append((md, _vec_to_derivation(self.ctx, row), word))
        return True

    def dims_by_multidegree(self) -> dict[tuple[int, int, int], int]:
        return {md: e.rank for md, e in sorted(self.components.items()) if e.rank}

    def dims_by_weight(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for md, e in self.components.items():
            if e.rank:
                out[sum(md)] = out.get(sum(md), 0) + e.rank
        return dict(sorted(out.items()))

    def dimension(self) -> int:
        return sum(e.rank for e in self.components.values())

    def member(self, D: Derivation) -> bool:
        """Exact membership; inhomogeneous elements split into graded parts."""
        for md, part in D.graded_components().items():
            ech = self.components.get(md)
            if ech is None or not ech.member(_derivation_to_vec(part)):
                return False
        return True

    def provenance(self) -> list[tuple[tuple[int, int, int], str]]:
        return [(md, word) for md, _row, word in self.vectors]


def restricted_closure(generators: list[Derivation], weight_cap: int) -> GradedBasis:
    """Close the span of the generators under bracket and p-th power.

    Brackets are scheduled while the operands' weights sum to at most the
    cap; p-th powers while p times the weight stays within the cap.  The
    cap must not exceed the trusted weight bound of the generators' context.
    """
    if not generators:
        raise ValueError("need at least one generator")
    ctx = generators[0].ctx
    for g in generators[1:]:
        if g.ctx != ctx:
            raise ContextMismatchError("context mismatch")
    bound = ctx.tup.trusted_weight_bound(ctx.depth)
    if weight_cap > bound:
        raise ValueError(
            f"outside trusted zone: cap {weight_cap} exceeds trusted bound {bound} "
            f"at depth {ctx.depth}"
        )
    p = ctx.p
    basis = GradedBasis(ctx, weight_cap)
    pending: list[tuple] = []  # ("vec", md, D, word) | ("bracket", i, j) | ("power", i)

    def admit(D: Derivation, word: str):
        for md, part in D.graded_components().items():
            wt = sum(md)
            if wt > weight_cap:
                continue
            if basis.insert(md, part, word):
                j = len(basis.vectors) - 1
                for i in range(j + 1):
                    wi = sum(basis.vectors[i][0])
                    if wi + wt <= weight_cap:
                        pending.append(("bracket", i, j))
                if p * wt <= weight_cap:
                    pending.append(("power", j))

    for idx, g in enumerate(generators):
        admit(g, f"g{idx}")

    cursor = 0
    while cursor < len(pending):
        task = pending[cursor]
        cursor += 1
        if task[0] == "bracket":
            _, i, j = task
            mdi, bi, wi = basis.vectors[i]
            mdj, bj, wj = basis.vectors[j]
            res = bracket(bi, bj)
            if not res.is_zero():
                admit(res, f"[{wi},{wj}]")
        else:
            _, i = task
            _md, b, w = basis.vectors[i]
            res = p_power(b)
            if not res.is_zero():
                admit(res, f"({w})^[p]")
    return basis


def _standard_generators(ctx: DpContext) -> list[Derivation]:
    return [pivot(ctx, "v", 0), pivot(ctx, "w", 0), pivot(ctx, "u", 0)]


# -- relation suite -----------------------------------------------------------------


def _axis_of(kind: str) -> int:
    return "vwu".index(kind)


def _power_rhs(ctx: DpContext, kind: str, i: int, m: int) -> Derivation:
    """Closed form of the generation-i pivot raised to the p^m-th power."""
    p = ctx.p
    S, R = ctx.tup.materialize(i)
    level_bound = S if kind == "v" else R
    res = Derivation.zero(ctx)
    if m < level_bound:
        res = res + Derivation.shift(ctx, (i, _axis_of(kind)), m)
    if kind == "v":
        exps = {(i, 0): p**S - p**m, (i, 1): p**R - 1}
    elif kind == "w":
        exps = {(i, 1): p**R - p**m, (i, 0): p**S - 1}
    else:
        exps = {(i, 2): p**R - p**m, (i, 0): p**S - 1}
    exps = {v: e for v, e in exps.items() if e}
    return res + pivot(ctx, kind, i + 1).lmul(AlgebraElement.monomial(ctx, exps))


def _mono(ctx: DpContext, exps: dict) -> AlgebraElement:
    return AlgebraElement.monomial(ctx, {v: e for v, e in exps.items() if e})


def relation_suite(
    tup: ParameterTuple, depth: int, base_index: int = 0
) -> VerificationReport:
    """Exact structural identities of the recursive generators.

    Verifies, for every generation i from base_index up to the truncation
    boundary: the p^m-power ladder closed forms for all valid m, the
    top-power collapse onto the next generation, the regeneration brackets
    producing the next generation's pivots, the pairwise brackets of the
    generation's pivots, and the full head grids (iterated ad-actions
    against their closed forms) for both families.
    """
    ctx = DpContext(tup, depth)
    rep = VerificationReport(suite="relations")
    p = tup.p
    N = depth
    for i in range(base_index, N):
        S, R = tup.materialize(i)
        for kind, top in (("v", S), ("w", R), ("u", R)):
            P0 = pivot(ctx, kind, i)
            cur = P0
            for m in range(0, top + 1):
                rhs = _power_rhs(ctx, kind, i, m)
                rep.check(
                    "power-ladder",
                    cur == rhs,
                    witness=f"lhs={cur} rhs={rhs}",
                    kind=kind,
                    i=i,
                    m=m,
                )
                if m == top:
                    break
                cur = p_power(cur)
    for i in range(base_index, N - 1):
        S, R = tup.materialize(i)
        v_i, w_i, u_i = (pivot(ctx, k, i) for k in "vwu")
        v_n, w_n, u_n = (pivot(ctx, k, i + 1) for k in "vwu")
        vS = p_power_iter(v_i, S)
        wR = p_power_iter(w_i, R)
        uR = p_power_iter(u_i, R)
        rep.check(
            "power-top",
            vS == v_n.lmul(_mono(ctx, {(i, 1): p**R - 1})),
            witness=f"lhs={vS}",
            kind="v",
            i=i,
        )
        rep.check(
            "power-top",
            wR == w_n.lmul(_mono(ctx, {(i, 0): p**S - 1})),
            witness=f"lhs={wR}",
            kind="w",
            i=i,
        )
        rep.check(
            "power-top",
            uR == u_n.lmul(_mono(ctx, {(i, 0): p**S - 1})),
            witness=f"lhs={uR}",
            kind="u",
            i=i,
        )
        rep.check(
            "regenerate-next",
            ad_power(w_i, vS, p**R - 1) == v_n,
            witness="",
            kind="v",
            i=i,
        )
        rep.check(
            "regenerate-next",
            ad_power(v_i, wR, p**S - 1) == w_n,
            witness="",
            kind="w",
            i=i,
        )
        rep.check(
            "regenerate-next",
            ad_power(v_i, uR, p**S - 1) == u_n,
            witness="",
            kind="u",
            i=i,
        )
        h_next = bracket(w_i, v_i)
        h_rhs = v_n.lmul(_mono(ctx, {(i, 0): p**S - 1, (i, 1): p**R - 2})) - w_n.lmul(
            _mono(ctx, {(i, 0): p**S - 2, (i, 1): p**R - 1})
        )
        rep.check(
            "bracket-pair", h_next == h_rhs, witness=f"lhs={h_next} rhs={h_rhs}",
            pair="wv", i=i,
        )
        g_next = bracket(v_i, u_i)
        g_rhs = u_n.lmul(_mono(ctx, {(i, 0): p**S - 2, (i, 2): p**R - 1}))
        rep.check(
            "bracket-pair", g_next == g_rhs, witness=f"lhs={g_next} rhs={g_rhs}",
            pair="vu", i=i,
        )
        rep.check(
            "bracket-pair",
            bracket(w_i, u_i).is_zero(),
            witness=f"lhs={bracket(w_i, u_i)}",
            pair="wu",
            i=i,
        )
        # head grid of the first family: iterated ad-actions vs closed forms
        for xi in range(p**S):
            for eta in range(p**R):
                if xi == p**S - 1 and eta == p**R - 1:
                    continue
                lhs = ad_power(v_i, ad_power(w_i, h_next, eta), xi)
                swapped = ad_power(w_i, ad_power(v_i, h_next, xi), eta)
                rhs = Derivation.zero(ctx)
                if p**R - 2 - eta >= 0:
                    rhs = rhs + v_n.lmul(
                        _mono(ctx, {(i, 0): p**S - 1 - xi, (i, 1): p**R - 2 - eta})
                    )
                if p**S - 2 - xi >= 0:
                    rhs = rhs - w_n.lmul(
                        _mono(ctx, {(i, 0): p**S - 2 - xi, (i, 1): p**R - 1 - eta})
                    )
                rep.check(
                    "head-grid-first",
                    lhs == rhs,
                    witness=f"lhs={lhs} rhs={rhs}",
                    i=i,
                    xi=xi,
                    eta=eta,
                )
                rep.check(
                    "head-grid-order",
                    lhs == swapped,
                    witness=f"vw-first={lhs} wv-first={swapped}",
                    i=i,
                    xi=xi,
                    eta=eta,
                )
        # head grid of the second family
        for xi in range(p**S - 1):
            for zeta in range(p**R):
                lhs = ad_power(v_i, ad_power(u_i, g_next, zeta), xi)
                rhs = u_n.lmul(
                    _mono(ctx, {(i, 0): p**S - 2 - xi, (i, 2): p**R - 1 - zeta})
                )
                rep.check(
                    "head-grid-second",
                    lhs == rhs,
                    witness=f"lhs={lhs} rhs={rhs}",
                    i=i,
                    xi=xi,
                    zeta=zeta,
                )
    return rep


# -- basis and grading verification ---------------------------------------------------


def _group_descriptors(tup: ParameterTuple, cap: int):
    """In-zone descriptors with their multidegrees, grouped per multidegree."""
    by_md: dict[tuple[int, int, int], list[MonomialDescriptor]] = {}
    for d in enumerate_descriptors(tup, cap):
        md = monomial_weight(d, tup).as_tuple()
        by_md.setdefault(md, []).append(d)
    return by_md


def verify_basis_theorem(tup: ParameterTuple, depth: int) -> VerificationReport:
    """Closure dimensions vs descriptor counts, membership, and the split.

    Within the trusted zone of the given depth: per-multidegree and
    per-weight closure dimensions must equal descriptor counts, every
    realized descriptor must lie in the closure and reproduce its predicted
    multidegree, the realized descriptors must be linearly independent, the
    first family together with the v/w-power families must span a
    subalgebra, and the second family with the u-power family an ideal.
    """
    if depth < 3:
        raise ValueError("basis verification requires depth >= 3")
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    rep = VerificationReport(suite="basis")
    basis = restricted_closure(_standard_generators(ctx), cap)
    by_md = _group_descriptors(tup, cap)

    closure_dims = basis.dims_by_multidegree()
    pred_dims = {md: len(ds) for md, ds in sorted(by_md.items())}
    for md in sorted(set(closure_dims) | set(pred_dims)):
        rep.check(
            "dimension-multidegree",
            closure_dims.get(md, 0) == pred_dims.get(md, 0),
            witness=f"closure={closure_dims.get(md, 0)} descriptors={pred_dims.get(md, 0)}",
            multidegree=md,
        )
    wt_closure: dict[int, int] = basis.dims_by_weight()
    wt_pred: dict[int, int] = {}
    for md, ds in by_md.items():
        wt_pred[sum(md)] = wt_pred.get(sum(md), 0) + len(ds)
    for m in range(1, cap + 1):
        rep.check(
            "dimension-weight",
            wt_closure.get(m, 0) == wt_pred.get(m, 0),
            witness=f"closure={wt_closure.get(m, 0)} descriptors={wt_pred.get(m, 0)}",
            weight=m,
        )

    realized: dict[tuple[int, int, int], list[tuple[MonomialDescriptor, Derivation]]]
    realized = {}
    indep = _Echelon(tup.p)
    indep_ok = True
    first_span: dict[tuple[int, int, int], _Echelon] = {}
    second_span: dict[tuple[int, int, int], _Echelon] = {}
    first_vecs: list[tuple[tuple[int, int, int], Derivation]] = []
    second_vecs: list[tuple[tuple[int, int, int], Derivation]] = []
    for md in sorted(by_md):
        for d in by_md[md]:
            D = realize(d, ctx)
            realized.setdefault(md, []).append((d, D))
            rep.check(
                "realize-membership",
                basis.member(D),
                witness=f"descriptor={d} element={D}",
                descriptor=str(d),
            )
            actual = D.multidegree()
            rep.check(
                "realize-multidegree",
                actual == md,
                witness=f"descriptor={d} predicted={md} actual={actual}",
                descriptor=str(d),
            )
            if indep.insert(_derivation_to_vec(D)) is None:
                indep_ok = False
                rep.check(
                    "realize-independence", False,
                    witness=f"dependent descriptor {d}", descriptor=str(d),
                )
            if d.family in ("first", "power_v", "power_w"):
                first_span.setdefault(md, _Echelon(tup.p)).insert(_derivation_to_vec(D))
                first_vecs.append((md, D))
            else:
                second_span.setdefault(md, _Echelon(tup.p)).insert(_derivation_to_vec(D))
                second_vecs.append((md, D))
    if indep_ok:
        rep.check("realize-independence", True, count=sum(map(len, by_md.values())))

    def in_span(span: dict, D: Derivation) -> bool:
        for md, part in D.graded_components().items():
            ech = span.get(md)
            if ech is None or not ech.member(_derivation_to_vec(part)):
                return False
        return True

    p = tup.p
    for i, (mdi, Di) in enumerate(first_vecs):
        for mdj, Dj in first_vecs[i:]:
            if sum(mdi) + sum(mdj) > cap:
                continue
            res = bracket(Di, Dj)
            rep.check(
                "subalgebra-first",
                res.is_zero() or in_span(first_span, res),
                witness=f"[{Di},{Dj}]={res}",
                weights=(sum(mdi), sum(mdj)),
            )
        if p * sum(mdi) <= cap:
            res = p_power(Di)
            rep.check(
                "subalgebra-first-power",
                res.is_zero() or in_span(first_span, res),
                witness=f"power of {Di}",
                weight=sum(mdi),
            )
    all_vecs = first_vecs + second_vecs
    for mdi, Di in all_vecs:
        for mdj, Dj in second_vecs:
            if sum(mdi) + sum(mdj) > cap:
                continue
            res = bracket(Di, Dj)
            rep.check(
                "ideal-second",
                res.is_zero() or in_span(second_span, res),
                witness=f"[{Di},{Dj}]={res}",
                weights=(sum(mdi), sum(mdj)),
            )
    for mdj, Dj in second_vecs:
        if p * sum(mdj) <= cap:
            res = p_power(Dj)
            rep.check(
                "ideal-second-power",
                res.is_zero() or in_span(second_span, res),
                witness=f"power of {Dj}",
                weight=sum(mdj),
            )
    return rep


def verify_grading(tup: ParameterTuple, depth: int) -> VerificationReport:
    """Brackets and p-powers of graded basis vectors land where predicted."""
    if depth < 2:
        raise ValueError("grading verification requires depth >= 2")
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    rep = VerificationReport(suite="grading")
    basis = restricted_closure(_standard_generators(ctx), cap)
    vecs = basis.vectors
    p = tup.p
    for i, (mdi, Di, _wi) in enumerate(vecs):
        for j in range(i, len(vecs)):
            mdj, Dj, _wj = vecs[j]
            target = (mdi[0] + mdj[0], mdi[1] + mdj[1], mdi[2] + mdj[2])
            if sum(target) > cap:
                continue
            res = bracket(Di, Dj)
            if res.is_zero():
                rep.check("bracket-grading", True, i=i, j=j)
                continue
            comps = res.graded_components()
            ok = set(comps) == {target}
            ech = basis.components.get(target)
            ok = ok and ech is not None and ech.member(_derivation_to_vec(res))
            rep.check(
                "bracket-grading",
                ok,
                witness=f"components={sorted(comps)} expected={target}",
                i=i,
                j=j,
            )
    for i, (mdi, Di, _wi) in enumerate(vecs):
        target = (p * mdi[0], p * mdi[1], p * mdi[2])
        if sum(target) > cap:
            continue
        res = p_power(Di)
        if res.is_zero():
            rep.check("power-grading", True, i=i)
            continue
        comps = res.graded_components()
        ok = set(comps) == {target}
        ech = basis.components.get(target)
        ok = ok and ech is not None and ech.member(_derivation_to_vec(res))
        rep.check(
            "power-grading",
            ok,
            witness=f"components={sorted(comps)} expected={target}",
            i=i,
        )
    return rep


# -- nil chains -----------------------------------------------------------------------


@dataclass(frozen=True)
class NilResult:
    """Outcome of iterating the p-th power map on one element."""

    status: str  # "nil" | "inconclusive"
    k: int  # nil: least k with e^{[p^k]} = 0; else last safely computed step
    p: int
    chain_weights: tuple[int, ...]  # max weight of e^{[p^j]} for j = 0..
    witness: str = ""

    @property
    def index(self) -> int | None:
        return self.p**self.k if self.status == "nil" else None


def _max_weight(D: Derivation) -> int:
    if D.is_zero():
        return 0
    return max(sum(md) for md in D.graded_components())


def nil_index(e: Derivation, basis: GradedBasis) -> NilResult:
    """Iterate the p-th power map inside the trusted zone.

    Returns nil with the least exponent k such that the p^k-th power
    vanishes, when that happens while every intermediate power stays within
    the trusted cap; otherwise inconclusive.  Never claims non-nil.
    """
    if e.ctx != basis.ctx:
        raise ContextMismatchError("context mismatch")
    if not basis.member(e):
        raise ValueError("element outside algebra")
    p = e.ctx.p
    cap = basis.cap
    cur = e
    k = 0
    weights = []
    while True:
        if cur.is_zero():
            return NilResult("nil", k, p, tuple(weights))
        wt = _max_weight(cur)
        weights.append(wt)
        if p * wt > cap:
            return NilResult(
                "inconclusive",
                k,
                p,
                tuple(weights),
                witness=f"next power would leave trusted zone ({p * wt} > {cap})",
            )
        cur = p_power(cur)
        k += 1


def sample_nil_chains(
    tup: ParameterTuple,
    depth: int,
    samples: int,
    seed: int,
    max_terms: int = 5,
    basis: GradedBasis | None = None,
) -> list[NilResult]:
    """Seeded random in-zone elements pushed through the p-power chain.

    Elements are F_p-combinations of at most max_terms closure basis
    vectors, chosen below a weight budget that is itself sampled from
    cap/p², cap/p, and cap (favoring small budgets so that several chain
    steps stay inside the trusted zone).
    """
    ctx = DpContext(tup, depth)
    cap = tup.trusted_weight_bound(depth)
    if basis is None:
        basis = restricted_closure(_standard_generators(ctx), cap)
    rng = random.Random(seed)
    p = tup.p
    budgets = [max(1, cap // (p * p)), max(1, cap // p), cap]
    weightsq = [6, 3, 1]
    results = []
    for _ in range(samples):
        budget = rng.choices(budgets, weights=weightsq, k=1)[0]
        pool = [i for i, (md, _r, _w) in enumerate(basis.vectors) if sum(md) <= budget]
        k = rng.randint(1, max_terms)
        picks = [rng.choice(pool) for _ in range(min(k, len(pool)))]
        e = Derivation.zero(ctx)
        for i in picks:
            c = rng.randrange(1, p)
            e = e + basis.vectors[i][1].scale(c)
        results.append(nil_index(e, basis))
    return results


# -- self-similarity --------------------------------------------------------------------


def self_similarity_decompose(tup: ParameterTuple, depth: int) -> VerificationReport:
    """Unfold each generator one period and verify the recursion shape.

    For a periodic tuple with period q (constant tuples have period 1) and
    depth >= 2q: each generator equals a finite part supported on
    generations < q plus the full-corner monomial of generations < q times
    the generation-q pivot of the same kind; the generation-q pivots then
    satisfy the whole relation suite with shifted indices.
    """
    if tup.kind == "constant":
        period = 1
    elif tup.kind == "periodic":
        period = len(tup.params["pattern"])
    else:
        raise ValueError("self-similarity requires periodic tuple")
    if depth < 2 * period:
        raise ValueError(
            f"self-similarity needs depth >= twice the period ({2 * period})"
        )
    ctx = DpContext(tup, depth)
    rep = VerificationReport(suite="self-similarity")
    p = tup.p
    for kind in "vwu":
        corner: dict[tuple[int, int], int] = {}
        for g in range(period):
            S, R = tup.materialize(g)
            if kind == "u":
                corner[(g, 2)] = p**R - 1
                corner[(g, 0)] = p**S - 1
            else:
                corner[(g, 0)] = p**S - 1
                corner[(g, 1)] = p**R - 1
        tail = pivot(ctx, kind, period).lmul(AlgebraElement.monomial(ctx, corner))
        head = pivot(ctx, kind, 0) - tail
        ok = True
        for (var, level), f in head.coeffs.items():
            if var[0] >= period:
                ok = False
            for mono, _c in f.terms.items():
                if any(g >= period for (g, _a), _e in mono.exps):
                    ok = False
        rep.check(
            "head-decomposition",
            ok,
            witness=f"head={head}",
            kind=kind,
            period=period,
        )
    shifted = relation_suite(tup, depth, base_index=period)
    for r in shifted.records:
        rep.records.append(
            CheckRecord(
                suite=rep.suite,
                check_id=f"shifted-{r.check_id}",
                params=r.params,
                status=r.status,
                witness=r.witness,
            )
        )
    return rep
