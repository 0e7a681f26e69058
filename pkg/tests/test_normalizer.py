"""Order-raising normalization, scaling laws, and flat brane connections."""

import random
from fractions import Fraction

import pytest

from gcbrane.scalars import QI
from gcbrane.jets import (
    JetContext, JetFunction, MixedTensor, Deformation, mc_residual,
    majorant_norm, vanishing_order, brane_compat_check,
)
from gcbrane.flows import act_on_deformation, invert_flow, compose_flows
from gcbrane.realcalc import map_preserves_brane_ideal, form_restricts_to_brane_tangent
from gcbrane.normalizer import (
    homotopy_field, normalize_step, run_normalization, NormalizationParams,
    zoom, cotangent_scale, ScalingSchedule, mixed_order,
    split_brane_connection, gauge_flat_connection, field_restricts_into_tau,
)
from gcbrane.propsuite import roundtrip_instance
from gcbrane.errors import PreconditionError


def rand_q(rng, den=3):
    return Fraction(rng.randint(-2, 2), rng.randint(1, den))


def rand_qi(rng):
    return QI(rand_q(rng), rand_q(rng))


def sjet(rng, ctx, nterms=2, hol=False):
    """Random jet in tangential variables only, so it lives on the brane."""
    f = JetFunction.zero(ctx)
    for _ in range(nterms):
        d = rng.randint(0, 2)
        a = [0] * ctx.n
        b = [0] * ctx.n
        for _ in range(d):
            if hol or rng.random() < 0.5:
                a[rng.randrange(ctx.k)] += 1
            else:
                b[rng.randrange(ctx.k)] += 1
        f = f + JetFunction(ctx, {(tuple(a), tuple(b)): rand_qi(rng)})
    return f


def zero_def(ctx):
    return Deformation(MixedTensor(ctx, 2, 0), MixedTensor(ctx, 1, 1),
                       MixedTensor(ctx, 0, 2))


def test_params_validation():
    with pytest.raises(ValueError):
        NormalizationParams(max_iterations=-1, target_order=3)
    with pytest.raises(ValueError):
        NormalizationParams(max_iterations=3, target_order=0)
    p = NormalizationParams(max_iterations=3, target_order=3)
    assert p.delta_schedule == (Fraction(1, 2), Fraction(1, 4),
                                Fraction(1, 8), Fraction(1, 16))


def test_homotopy_field_single_form_term():
    """A constant pure-form term is cancelled by a conormal-valued primitive."""
    ctx = JetContext(n=3, k=1, max_degree=4)
    e02 = MixedTensor(ctx, 0, 2)
    e02._add_term((), (0, 1), JetFunction.const(ctx, QI(Fraction(3, 2))))
    v = homotopy_field(Deformation(MixedTensor(ctx, 2, 0),
                                   MixedTensor(ctx, 1, 1), e02))
    assert not v.X.comps
    assert v.xi.comps == {
        ((1, 1),): JetFunction(ctx, {((0, 0, 0), (1, 0, 0)): QI(Fraction(-3, 2))}),
        ((0, 1),): JetFunction(ctx, {((1, 0, 0), (0, 0, 0)): QI(Fraction(-3, 2))}),
    }
    assert v.is_real()
    assert field_restricts_into_tau(v)


def test_homotopy_field_zero_input():
    ctx = JetContext(n=3, k=1, max_degree=4)
    v = homotopy_field(zero_def(ctx))
    assert not v.X.comps and not v.xi.comps


def test_transport_keeps_normalization_preconditions():
    ctx = JetContext(n=3, k=1, max_degree=4)
    rng = random.Random(5)
    for _ in range(3):
        eps, eps0, W = roundtrip_instance(rng, ctx)
        assert mc_residual(eps).is_zero()
        assert brane_compat_check(eps)["compatible"]
        assert mixed_order(eps) >= 1


def test_normalize_step_raises_mixed_order():
    ctx = JetContext(n=3, k=1, max_degree=4)
    rng = random.Random(6)
    for _ in range(3):
        eps, _, _ = roundtrip_instance(rng, ctx)
        m0 = mixed_order(eps)
        m1 = mixed_order(normalize_step(eps))
        assert m1 > m0


def test_rejects_target_above_degree_cap():
    ctx = JetContext(2, 1, max_degree=4)
    with pytest.raises(PreconditionError, match="target_order exceeds"):
        run_normalization(zero_def(ctx),
                          NormalizationParams(max_iterations=2, target_order=9))


def test_rejects_nonintegrable_input():
    ctx = JetContext(2, 1, max_degree=4)
    e20 = MixedTensor(ctx, 2, 0)
    e20._add_term((0, 1), (), JetFunction(ctx, {((0, 0), (1, 0)): QI(1)}))
    bad = Deformation(e20, MixedTensor(ctx, 1, 1), MixedTensor(ctx, 0, 2))
    with pytest.raises(PreconditionError, match="not integrable"):
        run_normalization(bad, NormalizationParams(max_iterations=2, target_order=3))


def test_rejects_brane_incompatible_input():
    ctx = JetContext(2, 1, max_degree=4)
    e11 = MixedTensor(ctx, 1, 1)
    e11._add_term((1,), (0,), JetFunction.coord(ctx, 0))
    inc = Deformation(MixedTensor(ctx, 2, 0), e11, MixedTensor(ctx, 0, 2))
    assert mc_residual(inc).is_zero()
    with pytest.raises(PreconditionError, match="not brane-compatible"):
        run_normalization(inc, NormalizationParams(max_iterations=2, target_order=3))


def test_rejects_constant_mixed_part():
    ctx = JetContext(2, 1, max_degree=4)
    e11 = MixedTensor(ctx, 1, 1)
    e11._add_term((0,), (0,), JetFunction.const(ctx, 1))
    flat = Deformation(MixedTensor(ctx, 2, 0), e11, MixedTensor(ctx, 0, 2))
    assert mc_residual(flat).is_zero()
    with pytest.raises(PreconditionError, match="mixed parts must vanish"):
        run_normalization(flat, NormalizationParams(max_iterations=2, target_order=3))


def test_deep_roundtrip_normalizes():
    """A transported holomorphic Poisson structure is pushed back to order 6."""
    ctx = JetContext(2, 1, max_degree=8)
    rng = random.Random(3)
    eps, eps0, W = roundtrip_instance(rng, ctx)
    rep = run_normalization(eps, NormalizationParams(max_iterations=10,
                                                     target_order=6))
    assert rep["converged"]
    assert rep["iterations"] == 3
    cols = ("iteration", "ord_eps11_02", "norm20", "norm11", "norm02",
            "mc_residual_norm", "S_preserved", "tau_preserved")
    for row in rep["rows"]:
        assert tuple(row) == cols
        assert row["S_preserved"] and row["tau_preserved"]
    assert rep["rows"][0]["iteration"] == 0
    fin = rep["eps"]
    assert vanishing_order(fin.e11) >= 6
    assert vanishing_order(fin.e02) >= 6
    mcf = mc_residual(fin)
    assert mcf.p21.truncate(5).is_zero()
    assert mcf.p30.truncate(5).is_zero()


def test_holomorphic_poisson_needs_no_steps():
    ctx = JetContext(2, 1, max_degree=8)
    pi0 = MixedTensor(ctx, 2, 0)
    pi0._add_term((0, 1), (), JetFunction.coord(ctx, 0))
    eps = Deformation(pi0, MixedTensor(ctx, 1, 1), MixedTensor(ctx, 0, 2))
    rep = run_normalization(eps, NormalizationParams(max_iterations=3,
                                                     target_order=6))
    assert rep["converged"] and rep["iterations"] == 0
    assert len(rep["rows"]) == 1


def rand_jet(rng, ctx, nterms=3):
    f = JetFunction.zero(ctx)
    for _ in range(nterms):
        d = rng.randint(0, ctx.max_degree)
        a = [0] * ctx.n
        b = [0] * ctx.n
        for _ in range(d):
            if rng.random() < 0.5:
                a[rng.randrange(ctx.n)] += 1
            else:
                b[rng.randrange(ctx.n)] += 1
        f = f + JetFunction(ctx, {(tuple(a), tuple(b)): rand_qi(rng)})
    return f


def test_zoom_and_cotangent_scale_commute():
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(8)
    eps = Deformation(
        MixedTensor(ctx, 2, 0, {((0, 1), ()): rand_jet(rng, ctx)}),
        MixedTensor(ctx, 1, 1, {((0,), (1,)): rand_jet(rng, ctx)}),
        MixedTensor(ctx, 0, 2, {((), (0, 1)): rand_jet(rng, ctx)}),
    )
    t = Fraction(1, 3)
    s = Fraction(2, 5)
    assert cotangent_scale(zoom(eps, t), s) == zoom(cotangent_scale(eps, s), t)
    assert zoom(eps, 1) == eps
    assert cotangent_scale(eps, 1) == eps


def test_zoom_radius_transport():
    """norm(zoom(eps, t), r) equals t^w norm(eps, t r), with w = -2, 0, 2."""
    ctx = JetContext(n=2, k=1, max_degree=4)
    rng = random.Random(9)
    eps = Deformation(
        MixedTensor(ctx, 2, 0, {((0, 1), ()): rand_jet(rng, ctx)}),
        MixedTensor(ctx, 1, 1, {((0,), (1,)): rand_jet(rng, ctx)}),
        MixedTensor(ctx, 0, 2, {((), (0, 1)): rand_jet(rng, ctx)}),
    )
    t = Fraction(1, 3)
    r = Fraction(1, 2)
    for part, w in (("e20", -2), ("e11", 0), ("e02", 2)):
        lhs = majorant_norm(getattr(zoom(eps, t), part), r)
        rhs = Fraction(t) ** w * majorant_norm(getattr(eps, part), t * r)
        assert lhs == rhs
    cst = Deformation(
        MixedTensor(ctx, 2, 0, {((0, 1), ()): JetFunction.const(ctx, 2)}),
        MixedTensor(ctx, 1, 1),
        MixedTensor(ctx, 0, 2, {((), (0, 1)): JetFunction.const(ctx, 3)}),
    )
    z = zoom(cst, t)
    assert majorant_norm(z.e20, r) == t ** -2 * majorant_norm(cst.e20, r)
    assert majorant_norm(z.e02, r) == t ** 2 * majorant_norm(cst.e02, r)


def test_schedule_exponents():
    """Homogeneous orders (0, 1, 1) contract with u-exponents (1, 2, 1)."""
    ctx = JetContext(n=2, k=1, max_degree=4)
    u = Fraction(1, 2)
    sched = ScalingSchedule(u=u, alpha=0, beta=1, gamma=1)
    h = Deformation(
        MixedTensor(ctx, 2, 0, {((0, 1), ()): JetFunction.const(ctx, 1)}),
        MixedTensor(ctx, 1, 1, {((0,), (1,)): JetFunction.coord(ctx, 0)}),
        MixedTensor(ctx, 0, 2, {((), (0, 1)): JetFunction.coord_bar(ctx, 1)}),
    )
    out = sched.apply(h)
    r = ctx.r
    exps = sched.predicted_u_exponents()
    assert exps == (1, 2, 1)
    for part, e in zip(("e20", "e11", "e02"), exps):
        ratio = majorant_norm(getattr(out, part), r) / majorant_norm(getattr(h, part), r)
        assert ratio == u ** e


def test_flat_connection_trivial():
    ctx = JetContext(n=3, k=1, max_degree=5)
    z = JetFunction.zero(ctx)
    conn = {"rank": 1, "theta": [[[z]]], "gamma": [[[z]], [[z]]]}
    bc, rep = split_brane_connection(conn, MixedTensor(ctx, 2, 0))
    assert rep["ok"] and not rep["failures"]


def test_gauge_flat_family():
    """Conjugating the zero connection by a gauge stays flat."""
    ctx = JetContext(n=3, k=1, max_degree=5)
    rng = random.Random(7)
    for _ in range(4):
        pi = MixedTensor(ctx, 2, 0)
        pi._add_term((0, 1), (), JetFunction(
            ctx, {((d, 0, 0), (0, 0, 0)): rand_qi(rng) for d in range(3)}))
        rank = rng.choice([1, 2])
        g = [[sjet(rng, ctx) for _ in range(rank)] for _ in range(rank)]
        for i in range(rank):
            g[i][i] = g[i][i] + JetFunction.const(ctx, 1)
        conn = gauge_flat_connection(g, pi)
        bc, rep = split_brane_connection(conn, pi)
        assert rep["ok"], rep["failures"]


def test_structure_constant_family_and_gauge():
    """Both anchor legs normal: flatness is a bracket relation on the fiber."""
    ctx = JetContext(n=3, k=1, max_degree=5)
    rng = random.Random(7)
    z = JetFunction.zero(ctx)
    one = JetFunction.const(ctx, 1)

    def mm(A, B):
        return [[sum((A[i][l] * B[l][j] for l in range(2)), JetFunction.zero(ctx))
                 for j in range(2)] for i in range(2)]

    for _ in range(3):
        pi = MixedTensor(ctx, 2, 0)
        h = JetFunction(ctx, {((d, 0, 0), (0, 0, 0)): rand_qi(rng) for d in range(2)})
        pi._add_term((1, 2), (), JetFunction.coord(ctx, 1) * h)
        # [G2, G3] = h G2 closes the structure equation when the base
        # vector fields vanish
        u_f = sjet(rng, ctx, hol=True)
        aa = sjet(rng, ctx, hol=True)
        G2 = [[z, u_f], [z, z]]
        G3 = [[aa, z], [z, aa + h]]
        conn = {"rank": 2, "theta": [[[z, z], [z, z]]], "gamma": [G2, G3]}
        bc, rep = split_brane_connection(conn, pi)
        assert rep["ok"], rep["failures"]
        # gauge by a unitriangular jet matrix and recheck
        s = sjet(rng, ctx)
        g = [[one, s], [z, one]]
        gi = [[one, JetFunction.zero(ctx) - s], [z, one]]
        th = [[[sum((gi[i][l] * g[l][j].diff_zbar(0) for l in range(2)),
                    JetFunction.zero(ctx)) for j in range(2)] for i in range(2)]]
        conn_g = {"rank": 2, "theta": th,
                  "gamma": [mm(gi, mm(G, g)) for G in (G2, G3)]}
        bc2, rep2 = split_brane_connection(conn_g, pi)
        assert rep2["ok"], rep2["failures"]


def test_injected_mixed_curvature_rejected():
    ctx = JetContext(n=3, k=1, max_degree=5)
    pi = MixedTensor(ctx, 2, 0)
    pi._add_term((0, 1), (), JetFunction.const(ctx, 1))
    conn = gauge_flat_connection([[JetFunction.const(ctx, 1)]], pi)
    conn["gamma"][0][0][0] = conn["gamma"][0][0][0] + JetFunction.coord_bar(ctx, 0)
    bc, rep = split_brane_connection(conn, pi)
    assert not rep["ok"]
    assert [f["check"] for f in rep["failures"]] == ["mixed-anticommutator"]
    rec = rep["failures"][0]
    assert set(rec) == {"check", "indices", "witness"}
    assert rec["indices"] == (0, 1)
    assert "JetFunction" in rec["witness"][2]


def test_injected_antiholomorphic_curvature_rejected():
    # two tangential directions are needed for a nonzero square
    ctx = JetContext(n=3, k=2, max_degree=5)
    pi = MixedTensor(ctx, 2, 0)
    pi._add_term((0, 1), (), JetFunction.const(ctx, 1))
    conn = gauge_flat_connection([[JetFunction.const(ctx, 1)]], pi)
    zb1 = JetFunction.coord_bar(ctx, 1)
    conn["theta"][0][0][0] = conn["theta"][0][0][0] + zb1
    bc, rep = split_brane_connection(conn, pi)
    assert not rep["ok"]
    assert [f["check"] for f in rep["failures"]] == ["antiholomorphic-square"]
    assert rep["failures"][0]["indices"] == (0, 1)


def test_connection_data_must_live_on_brane():
    ctx = JetContext(n=3, k=1, max_degree=5)
    pi = MixedTensor(ctx, 2, 0)
    pi._add_term((0, 1), (), JetFunction.const(ctx, 1))
    conn = gauge_flat_connection([[JetFunction.const(ctx, 1)]], pi)
    conn["theta"][0][0][0] = conn["theta"][0][0][0] + JetFunction.coord_bar(ctx, 1)
    with pytest.raises(PreconditionError, match="jets on the brane"):
        split_brane_connection(conn, pi)


def test_endpoint_agrees_up_to_flow():
    """Two stopping rules give endpoints conjugate by a brane-preserving flow."""
    ctx = JetContext(2, 1, max_degree=5)
    rng = random.Random(0)
    eps, eps0, W = roundtrip_instance(rng, ctx)
    rep_a = run_normalization(eps, NormalizationParams(max_iterations=8,
                                                       target_order=2))
    rep_b = run_normalization(eps, NormalizationParams(max_iterations=8,
                                                       target_order=3))
    assert rep_a["converged"] and rep_a["iterations"] >= 1
    assert rep_b["converged"] and rep_b["iterations"] > rep_a["iterations"]
    cut = ctx.max_degree - 1
    moved_a = act_on_deformation(rep_a["flow"], eps) - rep_a["eps"]
    assert all(t.truncate(cut).is_zero() for t in moved_a.parts())
    # the relating flow is the second flow against the first one, inverted
    G = compose_flows(rep_b["flow"], invert_flow(rep_a["flow"]))
    assert map_preserves_brane_ideal(G.phi)
    assert form_restricts_to_brane_tangent(G.B)
    diff = act_on_deformation(G, rep_a["eps"]) - rep_b["eps"]
    assert all(t.truncate(cut).is_zero() for t in diff.parts())
    # normalizing the transported endpoint finds nothing left to do
    moved = act_on_deformation(G, rep_a["eps"])
    assert mc_residual(moved).is_zero()
    assert brane_compat_check(moved)["compatible"]
    rep_c = run_normalization(moved, NormalizationParams(max_iterations=8,
                                                         target_order=3))
    assert rep_c["converged"] and rep_c["iterations"] == 0
