import random
from fractions import Fraction

from gcbrane.scalars import QI
from gcbrane.errors import PreconditionError
from gcbrane.jets import (
    JetContext,
    JetFunction,
    MixedTensor,
    Deformation,
    mc_residual,
)
from gcbrane.realcalc import (
    RealVector,
    RealForm,
    JetMap,
    exterior_d,
    pullback,
    form_restricts_to_brane_tangent,
    map_preserves_brane_ideal,
)
from gcbrane.flows import (
    GeneralizedField,
    GeneralizedFlow,
    pairing,
    courant_bracket,
    flow,
    compose_flows,
    invert_flow,
    act_on_deformation,
    infinitesimal_action,
    graph_bracket_residuals,
)
from gcbrane import linalg as la
from gcbrane.propsuite import (
    rand_jet,
    rand_tensor,
    rand_real_field,
    rand_tangent_field,
    roundtrip_instance,
)


def rand_deformation(rng, ctx, min_deg=1):
    return Deformation(
        rand_tensor(rng, ctx, 2, 0, min_deg=min_deg),
        rand_tensor(rng, ctx, 1, 1, min_deg=min_deg),
        rand_tensor(rng, ctx, 0, 2, min_deg=min_deg),
    )


def defl(d):
    out = {}
    for name, T in (("20", d.e20), ("11", d.e11), ("02", d.e02)):
        for (alpha, beta), f in T.comps.items():
            for (a, b), c in f.terms.items():
                if c:
                    out[(name, alpha, beta, a, b)] = c
    return out


def fit_poly(ts, vals):
    A = [[QI(Fraction(t) ** k) for k in range(len(ts))] for t in ts]
    return la.solve(A, vals)


def t_coefficients(fn, ts):
    flats = [defl(fn(t)) for t in ts]
    keys = set()
    for fl in flats:
        keys.update(fl)
    out = {}
    for key in keys:
        out[key] = fit_poly(ts, [fl.get(key, QI(0)) for fl in flats])
    return out


def test_zero_field_flow_is_identity():
    ctx = JetContext(n=2, k=1, max_degree=4)
    fl = flow(GeneralizedField.zero(ctx), Fraction(3, 2))
    ident = JetMap.identity(ctx)
    assert fl.phi.zim == ident.zim and fl.phi.zbim == ident.zbim
    assert fl.B.is_zero()


def test_pure_form_flow_gauges_by_t_d_xi():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(5)
    xi = RealForm(ctx, 1, {((0, 0),): rand_jet(rng, ctx, max_deg=3, nterms=3)})
    xi = xi + xi.conj()
    v = GeneralizedField(RealVector(ctx), xi)
    t = Fraction(5, 7)
    fl = flow(v, t)
    assert fl.B == exterior_d(xi).scale(QI(t))
    assert fl.phi.zim == JetMap.identity(ctx).zim


def test_flow_inverse_is_exact():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(11)
    ident = JetMap.identity(ctx)
    for _ in range(4):
        v = rand_real_field(rng, ctx)
        fl = flow(v, Fraction(1))
        comp = fl.phi.compose(fl.phi_inv)
        assert comp.zim == ident.zim and comp.zbim == ident.zbim
        comp2 = fl.phi_inv.compose(fl.phi)
        assert comp2.zim == ident.zim


def test_flow_one_parameter_group_law():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(13)
    t, s = Fraction(1, 2), Fraction(1, 3)
    N1 = ctx.max_degree - 1
    for _ in range(3):
        v = rand_real_field(rng, ctx)
        a = flow(v, t + s)
        b = compose_flows(flow(v, t), flow(v, s))
        assert a.phi.zim == b.phi.zim
        # the gauge parts pick up a top-degree composition artifact
        assert a.B.truncate(N1) == b.B.truncate(N1)


def test_invert_flow():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(17)
    N1 = ctx.max_degree - 1
    for _ in range(3):
        v = rand_real_field(rng, ctx)
        fl = flow(v, Fraction(2, 3))
        cc = compose_flows(invert_flow(fl), fl)
        assert cc.phi.zim == JetMap.identity(ctx).zim
        assert cc.B.truncate(N1).is_zero()


def test_compose_flows_gauge_rule():
    # B of the composite = B_first + pullback along phi_first of B_second
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(19)
    for _ in range(3):
        f1 = flow(rand_real_field(rng, ctx), Fraction(1, 2))
        f2 = flow(rand_real_field(rng, ctx), Fraction(1, 3))
        comp = compose_flows(f2, f1)
        assert comp.B == f1.B + pullback(f1.phi, f2.B)


def test_flow_rejects_complex_field():
    ctx = JetContext(n=2, k=1, max_degree=4)
    vec = {(0, 0): JetFunction.monomial(ctx, (0, 2), (0, 0))}
    v = GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1))
    try:
        flow(v, 1)
    except PreconditionError:
        pass
    else:
        raise AssertionError("complex field accepted")


def test_flow_rejects_nonnilpotent_series():
    # a linear vector field exponentiates to an infinite series; the
    # guard must refuse instead of silently truncating
    ctx = JetContext(n=2, k=1, max_degree=4)
    f = JetFunction.coord(ctx, 0)
    half = GeneralizedField(RealVector(ctx, {(0, 0): f}), RealForm(ctx, 1))
    v = half + half.conj()
    try:
        flow(v, 1)
    except PreconditionError:
        pass
    else:
        raise AssertionError("non-terminating series accepted")


def test_courant_bracket_symmetric_defect():
    # [a,b] + [b,a] = 2 d<a,b>
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(23)
    N1 = ctx.max_degree - 1
    for _ in range(5):
        def rand_field():
            vec = {(c, i): rand_jet(rng, ctx, max_deg=3, nterms=2)
                   for c in (0, 1) for i in range(ctx.n) if rng.random() < 0.7}
            form = {((c, i),): rand_jet(rng, ctx, max_deg=3, nterms=2)
                    for c in (0, 1) for i in range(ctx.n) if rng.random() < 0.7}
            return GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1, form))
        a, b = rand_field(), rand_field()
        lhs = courant_bracket(None, a, b) + courant_bracket(None, b, a)
        dp = exterior_d(RealForm(ctx, 0, {(): pairing(a, b)}))
        assert lhs.X.is_zero()
        assert lhs.xi.truncate(N1) == dp.scale(QI(2)).truncate(N1)


def test_act_identity_flow_is_exact():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(29)
    eps = rand_deformation(rng, ctx)
    out = act_on_deformation(GeneralizedFlow.identity(ctx), eps)
    assert defl(out) == defl(eps)


def test_pure_gauge_action_adds_b_to_form_part():
    # frozen orientation: acting with (id, B) on zero lands B in the
    # (0,2) slot with coefficient +1
    ctx = JetContext(n=2, k=1, max_degree=4)
    B = RealForm(ctx, 2, {((1, 0), (1, 1)): JetFunction.const(ctx, 1)})
    fl = GeneralizedFlow(JetMap.identity(ctx), JetMap.identity(ctx), B)
    out = act_on_deformation(fl, Deformation.zero(ctx))
    zero_exp = (0, 0)
    assert defl(out) == {("02", (), (0, 1), zero_exp, zero_exp): QI(1)}


def test_act_composition_consistency():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(31)
    N1 = ctx.max_degree - 1
    for _ in range(3):
        f1 = flow(rand_real_field(rng, ctx), Fraction(1, 2))
        f2 = flow(rand_real_field(rng, ctx), Fraction(1, 3))
        eps = rand_deformation(rng, ctx)
        a = act_on_deformation(f2, act_on_deformation(f1, eps))
        b = act_on_deformation(compose_flows(f2, f1), eps)
        d = a - b
        assert d.e20.truncate(N1).is_zero()
        assert d.e11.truncate(N1).is_zero()
        assert d.e02.truncate(N1).is_zero()


def test_infinitesimal_action_is_t1_coefficient_at_zero():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(37)
    ts = [Fraction(x) for x in range(9)]
    for _ in range(3):
        v = rand_real_field(rng, ctx)
        zero = Deformation.zero(ctx)
        coeffs = t_coefficients(
            lambda t: act_on_deformation(flow(v, t), zero), ts)
        inf = defl(infinitesimal_action(v, zero))
        got = {key: cs[1] for key, cs in coeffs.items() if cs[1]}
        assert got == inf


def test_coupled_scaling_residual_is_quadratic():
    # scale both the field and the deformation by delta: the action
    # minus (eps + infinitesimal term) has no constant or linear part
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(23)
    deltas = [Fraction(d) for d in range(8)]
    for _ in range(2):
        v = rand_real_field(rng, ctx)
        eps0 = rand_deformation(rng, ctx)

        def residual(d):
            vd = v.scale(QI(d))
            ed = Deformation(eps0.e20.scale(QI(d)), eps0.e11.scale(QI(d)),
                             eps0.e02.scale(QI(d)))
            lhs = act_on_deformation(flow(vd, 1), ed)
            return lhs - ed - infinitesimal_action(vd, ed)

        coeffs = t_coefficients(residual, deltas)
        for key, cs in coeffs.items():
            assert cs[0] == QI(0) and cs[1] == QI(0), key


def test_brane_tangent_flow_preserves_ideal_and_gauge():
    ctx = JetContext(n=3, k=2, max_degree=4)
    rng = random.Random(23)
    for _ in range(4):
        v = rand_tangent_field(rng, ctx)
        fl = flow(v, 1)
        assert map_preserves_brane_ideal(fl.phi)
        assert form_restricts_to_brane_tangent(fl.B)


def test_graph_residuals_vanish_for_integrable():
    ctx = JetContext(n=2, k=1, max_degree=8)
    fhol = JetFunction(ctx, {((1, 0), (0, 0)): QI(1),
                             ((0, 2), (0, 0)): QI(Fraction(1, 2))})
    eps = Deformation.from_poisson(MixedTensor(ctx, 2, 0, {((0, 1), ()): fhol}))
    assert mc_residual(eps).is_zero()
    for key, (vec, form) in graph_bracket_residuals(eps).items():
        assert vec.is_zero() and form.is_zero(), key


def test_graph_residuals_match_mc_parts():
    # frozen table: each pairwise bracket residual equals a contraction
    # of one integrability part, with coefficient +1 in every slot
    ctx = JetContext(n=3, k=1, max_degree=4)
    rng = random.Random(41)
    n = ctx.n
    N1 = ctx.max_degree - 1

    def comp_of(T, alpha, beta):
        return T.comps.get((alpha, beta), JetFunction.zero(ctx))

    for _ in range(3):
        eps = rand_deformation(rng, ctx)
        mc = mc_residual(eps)
        res = graph_bracket_residuals(eps)
        for a in range(n):
            for b in range(a + 1, n):
                vec, form = res[(a, b)]
                cv = mc.p12.contract_form(a).contract_form(b)
                cf = mc.p03.contract_form(a).contract_form(b)
                for i in range(n):
                    assert vec.get((0, i)).truncate(N1) == comp_of(cv, (i,), ()).truncate(N1)
                for j in range(n):
                    assert form.get(((1, j),)).truncate(N1) == comp_of(cf, (), (j,)).truncate(N1)
        for a in range(n):
            for b in range(n):
                vec, form = res[(a, n + b)]
                cv = mc.p21.contract_form(a).contract_vector(b)
                cf = mc.p12.contract_form(a).contract_vector(b)
                for i in range(n):
                    assert vec.get((0, i)).truncate(N1) == comp_of(cv, (i,), ()).truncate(N1)
                for j in range(n):
                    assert form.get(((1, j),)).truncate(N1) == comp_of(cf, (), (j,)).truncate(N1)
        for a in range(n):
            for b in range(a + 1, n):
                vec, form = res[(n + a, n + b)]
                cv = mc.p30.contract_vector(a).contract_vector(b)
                cf = mc.p21.contract_vector(a).contract_vector(b)
                for i in range(n):
                    assert vec.get((0, i)).truncate(N1) == comp_of(cv, (i,), ()).truncate(N1)
                for j in range(n):
                    assert form.get(((1, j),)).truncate(N1) == comp_of(cf, (), (j,)).truncate(N1)


def test_roundtrip_transport_preserves_integrability():
    ctx = JetContext(n=2, k=1, max_degree=5)
    rng = random.Random(43)
    eps, eps0, W = roundtrip_instance(rng, ctx)
    assert mc_residual(eps).is_zero()
    assert not eps.e11.is_zero() or not eps.e02.is_zero()
