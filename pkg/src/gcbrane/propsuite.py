"""Seeded property suites over the core operators.

Each suite draws its instances from a single random.Random stream, so a
(suite, seed, count) triple fully determines the report, including the
order of any failures.  Reports are plain dicts with string details,
safe to serialize as JSON.

The two brane lemma suites carry a negative control: the same instances
relabeled by a coordinate permutation that mixes tangential and normal
indices.  The relabeled inputs no longer place the brane on the first k
coordinates, and the lemma conclusions are expected to fail for at
least one of them; the control records the first such witness.  A
control that finds no violation fails the suite, since it would mean
the coordinate-order assumption was not load-bearing.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .jets import (
    JetContext,
    JetFunction,
    MixedTensor,
    Deformation,
    mc_residual,
    majorant_norm,
    vanishing_order,
    brane_compat_check,
    schouten_bracket,
)
from .scalars import QI
from .homotopy import q_operator, p_operator
from .realcalc import (
    RealVector,
    RealForm,
    form_restricts_to_brane_tangent,
    map_preserves_brane_ideal,
)
from .flows import GeneralizedField, flow, act_on_deformation
from .normalizer import (
    homotopy_field,
    normalize_step,
    field_restricts_into_tau,
    zoom,
    cotangent_scale,
    ScalingSchedule,
)


# ---------------------------------------------------------------------------
# generators


def rand_q(rng, den=3):
    return Fraction(rng.randint(-2, 2), rng.randint(1, den))


def rand_qi(rng):
    return QI(rand_q(rng), rand_q(rng))


def rand_jet(rng, ctx, min_deg=0, max_deg=None, nterms=3):
    if max_deg is None:
        max_deg = ctx.max_degree
    f = JetFunction.zero(ctx)
    for _ in range(nterms):
        d = rng.randint(min_deg, max_deg)
        a = [0] * ctx.n
        b = [0] * ctx.n
        for _ in range(d):
            if rng.random() < 0.5:
                a[rng.randrange(ctx.n)] += 1
            else:
                b[rng.randrange(ctx.n)] += 1
        f = f + JetFunction(ctx, {(tuple(a), tuple(b)): rand_qi(rng)})
    return f


def rand_hol_jet(rng, ctx, min_deg=1, max_deg=None, nterms=2):
    if max_deg is None:
        max_deg = ctx.max_degree
    f = JetFunction.zero(ctx)
    zb = tuple([0] * ctx.n)
    for _ in range(nterms):
        d = rng.randint(min_deg, max_deg)
        a = [0] * ctx.n
        for _ in range(d):
            a[rng.randrange(ctx.n)] += 1
        f = f + JetFunction(ctx, {(tuple(a), zb): rand_qi(rng)})
    return f


def rand_vanishing_jet(rng, ctx, nterms=3, max_deg=2):
    """Random jet whose every monomial carries a normal-coordinate
    factor, so it restricts to zero on the brane."""
    f = rand_jet(rng, ctx, max_deg=max_deg, nterms=nterms)
    g = JetFunction.zero(ctx)
    for (a, b), c in f.terms.items():
        m = rng.randrange(ctx.k, ctx.n)
        if rng.randrange(2):
            a = a[:m] + (a[m] + 1,) + a[m + 1:]
        else:
            b = b[:m] + (b[m] + 1,) + b[m + 1:]
        g = g + JetFunction(ctx, {(a, b): c})
    return g


def rand_tensor(rng, ctx, p, q, min_deg=0, max_deg=2, nterms=2):
    T = MixedTensor(ctx, p, q)
    for _ in range(nterms):
        alpha = tuple(sorted(rng.sample(range(ctx.n), p))) if p else ()
        beta = tuple(sorted(rng.sample(range(ctx.n), q))) if q else ()
        T._add_term(alpha, beta,
                    rand_jet(rng, ctx, min_deg=min_deg, max_deg=max_deg,
                             nterms=2))
    return T


def rand_isotropic_form(rng, ctx, q, nterms=3):
    """(0,q)-form whose pullback to the brane vanishes: components with
    all form legs tangential get coefficients vanishing on S."""
    T = MixedTensor(ctx, 0, q)
    betas = list(itertools.combinations(range(ctx.n), q))
    for _ in range(nterms):
        be = rng.choice(betas)
        if all(j < ctx.k for j in be):
            T._add_term((), be, rand_vanishing_jet(rng, ctx))
        else:
            T._add_term((), be, rand_jet(rng, ctx, max_deg=2))
    return T


def rand_tangency_tensor(rng, ctx, p, nterms=3):
    """(p,1)-tensor sending brane-tangent antiholomorphic directions
    into brane-tangent polyvectors: components with a tangential form
    leg either keep all vector legs tangential or vanish on S."""
    T = MixedTensor(ctx, p, 1)
    alphas = list(itertools.combinations(range(ctx.n), p))
    tangent_alphas = [al for al in alphas if all(i < ctx.k for i in al)]
    for _ in range(nterms):
        j = rng.randrange(ctx.n)
        if j < ctx.k:
            if tangent_alphas and rng.randrange(2):
                T._add_term(rng.choice(tangent_alphas), (j,),
                            rand_jet(rng, ctx, max_deg=2))
            else:
                T._add_term(rng.choice(alphas), (j,),
                            rand_vanishing_jet(rng, ctx))
        else:
            T._add_term(rng.choice(alphas), (j,),
                        rand_jet(rng, ctx, max_deg=2))
    return T


def rand_real_field(rng, ctx, min_deg=2):
    """Random real generalized field, vector part of order >= 2."""
    vec = {}
    form = {}
    for i in range(ctx.n):
        if rng.random() < 0.8:
            vec[(0, i)] = rand_jet(rng, ctx, min_deg=min_deg, nterms=2)
        if rng.random() < 0.8:
            form[((1, i),)] = rand_jet(rng, ctx, min_deg=1, nterms=2)
    half = GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1, form))
    return half + half.conj()


def rand_tangent_field(rng, ctx, min_deg=2):
    """Real field with X|_S tangent to S and xi|_S conormal to S."""
    k, n = ctx.k, ctx.n
    vec = {}
    form = {}
    for i in range(n):
        if i < k:
            f = rand_jet(rng, ctx, min_deg=min_deg, nterms=2)
        else:
            g = rand_jet(rng, ctx, min_deg=min_deg - 1, nterms=2)
            mul = JetFunction.coord(ctx, rng.randrange(k, n))
            if rng.random() < 0.5:
                mul = JetFunction.coord_bar(ctx, rng.randrange(k, n))
            f = g * mul
        vec[(0, i)] = f
    for i in range(n):
        if i < k:
            g = rand_jet(rng, ctx, min_deg=min_deg - 1, nterms=2)
            mul = JetFunction.coord(ctx, rng.randrange(k, n))
            if rng.random() < 0.5:
                mul = JetFunction.coord_bar(ctx, rng.randrange(k, n))
            form[((1, i),)] = g * mul
        else:
            form[((1, i),)] = rand_jet(rng, ctx, min_deg=min_deg, nterms=2)
    half = GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1, form))
    return half + half.conj()


def rand_hol_poisson(rng, ctx, min_deg=1):
    """f(z) d_a ^ d_b with a tangential: holomorphic, Poisson (the
    bivector is decomposable), and brane-compatible."""
    k, n = ctx.k, ctx.n
    a = rng.randrange(k)
    b = rng.randrange(n)
    while b == a:
        b = rng.randrange(n)
    a, b = min(a, b), max(a, b)
    T = MixedTensor(ctx, 2, 0)
    T._add_term((a, b), (), rand_hol_jet(rng, ctx, min_deg=min_deg))
    return T


def rand_compatible_deformation(rng, ctx, with_bivector=True):
    """Brane-compatible deformation with mixed parts of order >= 1,
    built so every constrained component vanishes on S."""
    k, n = ctx.k, ctx.n
    e20 = rand_hol_poisson(rng, ctx) if with_bivector \
        else MixedTensor(ctx, 2, 0)
    e11 = MixedTensor(ctx, 1, 1)
    for _ in range(2):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i >= k and j < k:
            f = rand_vanishing_jet(rng, ctx)
        else:
            f = rand_jet(rng, ctx, min_deg=1, nterms=2)
        e11._add_term((i,), (j,), f)
    e02 = MixedTensor(ctx, 0, 2)
    for _ in range(2):
        be = tuple(sorted(rng.sample(range(n), 2)))
        if be[1] < k:
            f = rand_vanishing_jet(rng, ctx)
        else:
            f = rand_jet(rng, ctx, min_deg=1, nterms=2)
        e02._add_term((), be, f)
    return Deformation(e20, e11, e02)


def roundtrip_instance(rng, ctx, min_pi_deg=1):
    """Integrable, brane-compatible deformation made by transporting a
    holomorphic Poisson bivector along a brane-tangent flow.  Returns
    (transported, original, field)."""
    pi0 = rand_hol_poisson(rng, ctx, min_deg=min_pi_deg)
    eps0 = Deformation(pi0, MixedTensor(ctx, 1, 1), MixedTensor(ctx, 0, 2))
    W = rand_tangent_field(rng, ctx)
    return act_on_deformation(flow(W, 1), eps0), eps0, W


# ---------------------------------------------------------------------------
# coordinate relabeling (negative control)


def _sort_word(word):
    w = list(word)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            w[j - 1], w[j] = w[j], w[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(w)


def relabel_jet(f, sigma):
    """Coefficients of the jet after renaming coordinate sigma[i] to i."""
    g = JetFunction.zero(f.ctx)
    for (a, b), c in f.terms.items():
        a2 = tuple(a[sigma[i]] for i in range(len(a)))
        b2 = tuple(b[sigma[i]] for i in range(len(b)))
        g = g + JetFunction(f.ctx, {(a2, b2): c})
    return g


def relabel_tensor(T, sigma):
    """The tensor after renaming coordinate sigma[i] to i, with basis
    words re-sorted and signed."""
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s] = i
    out = MixedTensor(T.ctx, T.p, T.q)
    for (alpha, beta), f in T.comps.items():
        sa, a2 = _sort_word(tuple(inv[x] for x in alpha))
        sb, b2 = _sort_word(tuple(inv[x] for x in beta))
        g = relabel_jet(f, sigma)
        if sa * sb == -1:
            g = -g
        out._add_term(a2, b2, g)
    return out


def mixing_relabelings(n, k):
    """Permutations that move at least one index across the tangent /
    normal boundary, so the brane is no longer the first k coordinates."""
    out = []
    for s in itertools.permutations(range(n)):
        if any((s[i] < k) != (i < k) for i in range(n)):
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# checkers


def pullback_to_brane_vanishes(T):
    """Do all components with every form leg tangential vanish on S?"""
    for (alpha, beta), f in T.comps.items():
        if all(j < T.ctx.k for j in beta):
            if not f.restrict_brane().is_zero():
                return False
    return True


def multi_tangent_on_brane(T):
    """Do all components with a normal vector leg vanish on S?"""
    for (alpha, beta), f in T.comps.items():
        if any(i >= T.ctx.k for i in alpha):
            if not f.restrict_brane().is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# suites


def _report(name, seed, count):
    return {"suite": name, "seed": seed, "count": count,
            "passed": 0, "failures": [], "ok": True}


def _fail(report, case, detail):
    report["failures"].append({"case": case, "detail": detail})


def _finish(report):
    report["ok"] = (not report["failures"]
                    and report.get("negative_control",
                                   {"violations": 1})["violations"] >= 1)
    return report


def suite_homotopy_identity(seed, count):
    """(contraction o dbar + dbar o contraction - id) theta = 0, for the
    plain and the brane-stabilized operator, on jets one degree below
    the cap."""
    rep = _report("homotopy-identity", seed, count)
    rng = random.Random(seed)
    ctxs = [JetContext(n, k, max_degree=7)
            for (n, k) in ((1, 1), (2, 1), (3, 1), (3, 2), (2, 2))]
    for case in range(count):
        ctx = ctxs[case % len(ctxs)]
        p = rng.randrange(ctx.n + 1)
        q = 1 + rng.randrange(ctx.n)
        T = rand_tensor(rng, ctx, p, q, max_deg=6, nterms=3)
        T = T.truncate(ctx.max_degree - 1)
        ok = True
        for op, label in ((q_operator, "plain"), (p_operator, "stabilized")):
            lhs = op(T.dbar()) + op(T).dbar()
            if not (lhs - T).is_zero():
                _fail(rep, case,
                      f"{label} homotopy identity violated at "
                      f"n={ctx.n} k={ctx.k} p={p} q={q}")
                ok = False
        if ok:
            rep["passed"] += 1
    return _finish(rep)


def suite_q_isotropic(seed, count):
    """Brane-isotropic (0,q)-forms, q >= 2, stay brane-isotropic under
    the contraction.  Negative control: relabeled inputs break it."""
    rep = _report("q-isotropic", seed, count)
    rng = random.Random(seed)
    ctx = JetContext(3, 2, max_degree=6)
    sigmas = mixing_relabelings(ctx.n, ctx.k)
    control = {"cases": 0, "violations": 0, "witness": None}
    for case in range(count):
        q = 2 + (case % 2)
        T = rand_isotropic_form(rng, ctx, q)
        if not pullback_to_brane_vanishes(T):
            _fail(rep, case, "generator produced a non-isotropic form")
            continue
        if pullback_to_brane_vanishes(q_operator(T)):
            rep["passed"] += 1
        else:
            _fail(rep, case, f"contraction broke isotropy at q={q}")
        sigma = sigmas[rng.randrange(len(sigmas))]
        control["cases"] += 1
        if not pullback_to_brane_vanishes(q_operator(relabel_tensor(T, sigma))):
            control["violations"] += 1
            if control["witness"] is None:
                control["witness"] = {"case": case,
                                      "relabeling": list(sigma),
                                      "detail": "isotropy lost after "
                                                "relabeling"}
    rep["negative_control"] = control
    return _finish(rep)


def suite_p_isotropic(seed, count):
    """On brane-isotropic forms the stabilized operator agrees with the
    plain contraction exactly."""
    rep = _report("p-isotropic", seed, count)
    rng = random.Random(seed)
    ctx = JetContext(3, 2, max_degree=6)
    for case in range(count):
        q = 2 + (case % 2)
        T = rand_isotropic_form(rng, ctx, q)
        if (p_operator(T) - q_operator(T)).is_zero():
            rep["passed"] += 1
        else:
            _fail(rep, case, f"stabilized != plain on isotropic input, q={q}")
    return _finish(rep)


def suite_p_tangent(seed, count):
    """Stabilized contraction of a brane-tangency tensor is multi-
    tangent along S.  Negative control: relabeled inputs break it."""
    rep = _report("p-tangent", seed, count)
    rng = random.Random(seed)
    ctxs = [JetContext(3, 2, max_degree=6), JetContext(2, 1, max_degree=6)]
    control = {"cases": 0, "violations": 0, "witness": None}
    for case in range(count):
        ctx = ctxs[case % len(ctxs)]
        p = 1 + rng.randrange(ctx.n - 1)
        T = rand_tangency_tensor(rng, ctx, p)
        if multi_tangent_on_brane(p_operator(T)):
            rep["passed"] += 1
        else:
            _fail(rep, case, f"tangency lost at n={ctx.n} k={ctx.k} p={p}")
        sigmas = mixing_relabelings(ctx.n, ctx.k)
        sigma = sigmas[rng.randrange(len(sigmas))]
        control["cases"] += 1
        if not multi_tangent_on_brane(p_operator(relabel_tensor(T, sigma))):
            control["violations"] += 1
            if control["witness"] is None:
                control["witness"] = {"case": case,
                                      "relabeling": list(sigma),
                                      "detail": "tangency lost after "
                                                "relabeling"}
    rep["negative_control"] = control
    return _finish(rep)


def suite_v_tangent(seed, count):
    """The corrector field of a brane-compatible deformation restricts
    into TS + N*S."""
    rep = _report("v-tangent", seed, count)
    rng = random.Random(seed)
    ctxs = [JetContext(2, 1, max_degree=5), JetContext(3, 1, max_degree=4),
            JetContext(3, 2, max_degree=4)]
    for case in range(count):
        ctx = ctxs[case % len(ctxs)]
        if case % 2:
            eps, _, _ = roundtrip_instance(rng, ctx)
        else:
            eps = rand_compatible_deformation(rng, ctx,
                                              with_bivector=bool(case % 4))
        chk = brane_compat_check(eps)
        if not chk["compatible"]:
            _fail(rep, case,
                  f"generator violated compatibility: {chk['violations']}")
            continue
        v = homotopy_field(eps)
        if field_restricts_into_tau(v):
            rep["passed"] += 1
        else:
            _fail(rep, case,
                  f"corrector field left TS + N*S at n={ctx.n} k={ctx.k}")
    return _finish(rep)


def suite_flow_brane(seed, count):
    """Time-1 flow of a brane-tangent field keeps the ideal of S, and
    its accumulated 2-form restricts to zero on brane-tangent legs."""
    rep = _report("flow-brane", seed, count)
    rng = random.Random(seed)
    ctxs = [JetContext(2, 1, max_degree=4), JetContext(3, 2, max_degree=4),
            JetContext(3, 1, max_degree=4)]
    for case in range(count):
        ctx = ctxs[case % len(ctxs)]
        v = rand_tangent_field(rng, ctx)
        fl = flow(v, 1)
        ok = True
        if not map_preserves_brane_ideal(fl.phi):
            _fail(rep, case, f"flow map left the ideal of S, n={ctx.n} "
                             f"k={ctx.k}")
            ok = False
        if not form_restricts_to_brane_tangent(fl.B):
            _fail(rep, case, f"accumulated 2-form not conormal on S, "
                             f"n={ctx.n} k={ctx.k}")
            ok = False
        if ok:
            rep["passed"] += 1
    return _finish(rep)


def suite_bracket_jacobi(seed, count):
    """Graded antisymmetry (exact) and graded Jacobi (two degrees below
    the cap) for the polyvector-form bracket."""
    rep = _report("bracket-jacobi", seed, count)
    rng = random.Random(seed)
    ctxs = [JetContext(2, 1, max_degree=4), JetContext(3, 1, max_degree=4)]
    for case in range(count):
        ctx = ctxs[case % len(ctxs)]
        # first two factors keep a vector leg so every nested bracket
        # has a well-defined shape
        degs = []
        for slot in range(3):
            p = 1 + rng.randrange(2) if slot < 2 else rng.randrange(3)
            q = rng.randrange(3 - p) if p < 2 else 0
            if p + q == 0:
                p = 1
            degs.append((p, q))
        (p1, q1), (p2, q2), (p3, q3) = degs
        A = rand_tensor(rng, ctx, p1, q1)
        B = rand_tensor(rng, ctx, p2, q2)
        C = rand_tensor(rng, ctx, p3, q3)
        a, b = p1 + q1, p2 + q2
        ok = True
        anti = schouten_bracket(B, A).scale(
            -(1 if ((a - 1) * (b - 1)) % 2 == 0 else -1))
        if schouten_bracket(A, B) != anti:
            _fail(rep, case, f"antisymmetry violated at degrees {degs}")
            ok = False
        lhs = schouten_bracket(A, schouten_bracket(B, C))
        rhs = schouten_bracket(schouten_bracket(A, B), C)
        extra = schouten_bracket(B, schouten_bracket(A, C))
        if ((a - 1) * (b - 1)) % 2:
            extra = -extra
        if not (lhs - rhs - extra).truncate(ctx.max_degree - 2).is_zero():
            _fail(rep, case, f"Jacobi violated at degrees {degs}")
            ok = False
        if ok:
            rep["passed"] += 1
    return _finish(rep)


_T_POOL = (Fraction(1, 2), Fraction(1, 3), Fraction(2, 5), Fraction(3, 4))
_S_POOL = (Fraction(1, 2), Fraction(2), Fraction(3, 5), Fraction(5, 3))
_R_POOL = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4))


def _homogeneous_jet(rng, ctx, order):
    a = [0] * ctx.n
    b = [0] * ctx.n
    for _ in range(order):
        if rng.random() < 0.5:
            a[rng.randrange(ctx.n)] += 1
        else:
            b[rng.randrange(ctx.n)] += 1
    c = rand_qi(rng)
    while not c:
        c = rand_qi(rng)
    return JetFunction(ctx, {(tuple(a), tuple(b)): c})


def suite_scaling_laws(seed, count):
    """Zoom and cotangent scaling: commutation, radius transport of the
    majorant norm, preservation of integrability, and the half-integer
    exponent bookkeeping of the combined schedule."""
    rep = _report("scaling-laws", seed, count)
    rng = random.Random(seed)
    ctx = JetContext(2, 1, max_degree=4)
    weights = (("e20", -2), ("e11", 0), ("e02", 2))
    for case in range(count):
        eps = Deformation(rand_tensor(rng, ctx, 2, 0),
                          rand_tensor(rng, ctx, 1, 1),
                          rand_tensor(rng, ctx, 0, 2))
        t = _T_POOL[rng.randrange(len(_T_POOL))]
        s = _S_POOL[rng.randrange(len(_S_POOL))]
        r = _R_POOL[rng.randrange(len(_R_POOL))]
        ok = True
        if cotangent_scale(zoom(eps, t), s) != zoom(cotangent_scale(eps, s), t):
            _fail(rep, case, "zoom and cotangent scaling do not commute")
            ok = False
        if zoom(eps, Fraction(1)) != eps or \
                cotangent_scale(eps, Fraction(1)) != eps:
            _fail(rep, case, "unit scaling is not the identity")
            ok = False
        z = zoom(eps, t)
        for part, w in weights:
            lhs = majorant_norm(getattr(z, part), r)
            rhs = Fraction(t) ** w * majorant_norm(getattr(eps, part), t * r)
            if lhs != rhs:
                _fail(rep, case, f"radius transport failed for {part}")
                ok = False
        if case % 5 == 0:
            ctx5 = JetContext(2, 1, max_degree=4)
            eps_int, _, _ = roundtrip_instance(rng, ctx5)
            if not mc_residual(cotangent_scale(eps_int, s)).is_zero():
                _fail(rep, case, "cotangent scaling broke integrability")
                ok = False
            if not mc_residual(eps).is_zero():
                if mc_residual(cotangent_scale(eps, s)).is_zero():
                    _fail(rep, case,
                          "cotangent scaling hid a nonzero residual")
                    ok = False
        al, be, ga = (rng.randrange(3) for _ in range(3))
        h = Deformation(
            MixedTensor(ctx, 2, 0, {((0, 1), ()): _homogeneous_jet(rng, ctx, al)}),
            MixedTensor(ctx, 1, 1, {((0,), (1,)): _homogeneous_jet(rng, ctx, be)}),
            MixedTensor(ctx, 0, 2, {((), (0, 1)): _homogeneous_jet(rng, ctx, ga)}),
        )
        u = Fraction(1, 2) if case % 2 else Fraction(1, 3)
        sched = ScalingSchedule(u=u, alpha=al, beta=be, gamma=ga)
        out = sched.apply(h)
        exps = sched.predicted_u_exponents()
        for (part, _), e in zip(weights, exps):
            base = majorant_norm(getattr(h, part), Fraction(1, 2))
            got = majorant_norm(getattr(out, part), Fraction(1, 2))
            if got != u ** e * base:
                _fail(rep, case,
                      f"schedule exponent wrong for {part}: expected "
                      f"u^{e}")
                ok = False
        if ok:
            rep["passed"] += 1
    return _finish(rep)


SUITES = {
    "homotopy-identity": suite_homotopy_identity,
    "q-isotropic": suite_q_isotropic,
    "p-isotropic": suite_p_isotropic,
    "p-tangent": suite_p_tangent,
    "v-tangent": suite_v_tangent,
    "flow-brane": suite_flow_brane,
    "bracket-jacobi": suite_bracket_jacobi,
    "scaling-laws": suite_scaling_laws,
}


def run_suite(name, seed, count):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{sorted(SUITES)}")
    return SUITES[name](seed, count)


# ---------------------------------------------------------------------------
# quadratic-decay measurement


def quadratic_decay_points(seed, deltas=None, ctx=None):
    """Mixed-part norms after one normalization step on a scaled family.

    The family transports a delta-scaled holomorphic Poisson bivector
    along the time-1 flow of a delta-scaled brane-tangent field, so it
    is integrable and compatible for every delta.  Returns a list of
    (delta, norm) pairs with exact rational norms at radius 1/2.
    """
    if ctx is None:
        ctx = JetContext(2, 1, max_degree=5)
    if deltas is None:
        deltas = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8),
                  Fraction(1, 16))
    rng = random.Random(seed)
    pi0 = rand_hol_poisson(rng, ctx, min_deg=1)
    W = rand_tangent_field(rng, ctx)
    r = Fraction(1, 2)
    pts = []
    for d in deltas:
        eps0 = Deformation(pi0.scale(QI(d)), MixedTensor(ctx, 1, 1),
                           MixedTensor(ctx, 0, 2))
        epsd = act_on_deformation(flow(W.scale(QI(d)), 1), eps0)
        eps1 = normalize_step(epsd)
        pts.append((d, majorant_norm(eps1.e11, r) + majorant_norm(eps1.e02, r)))
    return pts


def loglog_slope(points):
    """Least-squares slope of log(norm) against log(delta)."""
    xs = [math.log(float(d)) for d, v in points]
    ys = [math.log(float(v)) for d, v in points]
    m = len(xs)
    xbar = sum(xs) / m
    ybar = sum(ys) / m
    return sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / \
        sum((x - xbar) ** 2 for x in xs)
