import random
from fractions import Fraction

from gcbrane.scalars import QI
from gcbrane.jets import (
    JetContext,
    JetFunction,
    MixedTensor,
    Deformation,
    wedge,
    schouten_bracket,
    mc_residual,
    majorant_norm,
    vanishing_order,
    brane_compat_check,
)
from gcbrane.propsuite import rand_jet, rand_tensor


CTX = JetContext(n=2, k=1, max_degree=8)


def test_jet_ring_basics():
    ctx = CTX
    f = JetFunction.monomial(ctx, (1, 1), (0, 0))
    g = JetFunction.monomial(ctx, (2, 0), (0, 0))
    assert (f * g).terms == {((3, 1), (0, 0)): QI(1)}
    assert (f + f).terms == {((1, 1), (0, 0)): QI(2)}
    assert (f - f).is_zero()
    assert f.conj().conj() == f
    assert f.diff_z(0) == JetFunction.monomial(ctx, (0, 1), (0, 0))
    assert f.diff_zbar(0).is_zero()
    assert f.vanishing_order() == 2


def test_truncation_drops_high_degree():
    ctx = JetContext(n=1, k=0, max_degree=3)
    f = JetFunction(ctx, {((2,), (0,)): QI(1)})
    g = JetFunction(ctx, {((2,), (0,)): QI(1), ((4,), (0,)): QI(7)})
    # the degree-4 monomial exceeds the cap and is never stored
    assert g == f
    assert (f * f).is_zero()


def test_order_semantics():
    # "vanishes to order m" means truncate(m - 1) is zero
    ctx = CTX
    f = JetFunction.monomial(ctx, (0, 3), (0, 0))
    assert vanishing_order(f) == 3
    assert f.truncate(2).is_zero()
    assert not f.truncate(3).is_zero()


def test_lie_bracket_of_vector_fields():
    ctx = CTX
    f = JetFunction.monomial(ctx, (1, 1), (0, 0))
    g = JetFunction.monomial(ctx, (2, 0), (0, 0))
    X = MixedTensor(ctx, 1, 0, {((0,), ()): f})
    Y = MixedTensor(ctx, 1, 0, {((1,), ()): g})
    expect = MixedTensor(ctx, 1, 0, {
        ((1,), ()): f * g.diff_z(0),
        ((0,), ()): -(g * f.diff_z(1)),
    })
    assert schouten_bracket(X, Y) == expect


def test_vector_form_bracket_is_directional_derivative():
    ctx = CTX
    f = JetFunction.monomial(ctx, (1, 1), (0, 0))
    g = JetFunction.monomial(ctx, (2, 0), (0, 0))
    X = MixedTensor(ctx, 1, 0, {((0,), ()): f})
    eta = MixedTensor(ctx, 0, 1, {((), (1,)): g})
    br = schouten_bracket(X, eta)
    assert br == MixedTensor(ctx, 0, 1, {((), (1,)): f * g.diff_z(0)})
    assert schouten_bracket(eta, X) == -br


def test_form_form_bracket_vanishes():
    ctx = CTX
    rng = random.Random(3)
    xi = MixedTensor(ctx, 0, 1, {((), (0,)): rand_jet(rng, ctx, max_deg=3)})
    eta = MixedTensor(ctx, 0, 1, {((), (1,)): rand_jet(rng, ctx, max_deg=3)})
    assert schouten_bracket(xi, eta).is_zero()


def test_bracket_graded_antisymmetry():
    ctx = CTX
    rng = random.Random(7)
    pairs = [((1, 0), (1, 1)), ((2, 0), (0, 2)), ((1, 1), (1, 1)),
             ((2, 0), (1, 1)), ((2, 0), (2, 0))]
    for (p1, q1), (p2, q2) in pairs:
        A = rand_tensor(rng, ctx, p1, q1, max_deg=2, nterms=2)
        B = rand_tensor(rng, ctx, p2, q2, max_deg=2, nterms=2)
        a, b = p1 + q1, p2 + q2
        sgn = -1 if ((a - 1) * (b - 1)) % 2 == 0 else 1
        assert schouten_bracket(A, B) == schouten_bracket(B, A).scale(sgn)


def test_bracket_jacobi():
    ctx = CTX
    rng = random.Random(9)
    for trial in range(6):
        degs = []
        for slot in range(3):
            # the first two operands keep a vector leg so every nested
            # bracket has a well-defined shape
            p = 1 + rng.randrange(2) if slot < 2 else rng.randrange(3)
            q = rng.randrange(3 - p) if p < 3 else 0
            if p + q == 0:
                q = 1
            degs.append((p, q))
        (p1, q1), (p2, q2), (p3, q3) = degs
        A = rand_tensor(rng, ctx, p1, q1, max_deg=2, nterms=2)
        B = rand_tensor(rng, ctx, p2, q2, max_deg=2, nterms=2)
        C = rand_tensor(rng, ctx, p3, q3, max_deg=2, nterms=2)
        a, b = p1 + q1, p2 + q2
        lhs = schouten_bracket(A, schouten_bracket(B, C))
        rhs = schouten_bracket(schouten_bracket(A, B), C)
        extra = schouten_bracket(B, schouten_bracket(A, C))
        if ((a - 1) * (b - 1)) % 2:
            extra = -extra
        # two nested brackets differentiate twice: exact to N - 2
        diff = lhs - rhs - extra
        assert diff.truncate(ctx.max_degree - 2).is_zero(), (degs, trial)


def test_bracket_leibniz_over_wedge():
    ctx = CTX
    rng = random.Random(11)
    for trial in range(6):
        degs = [(1 + rng.randrange(2), rng.randrange(2))]
        for _ in range(2):
            p = rng.randrange(2)
            q = rng.randrange(2)
            if p + q == 0:
                q = 1
            degs.append((p, q))
        (p1, q1), (p2, q2), (p3, q3) = degs
        A = rand_tensor(rng, ctx, p1, q1, max_deg=2, nterms=2)
        B = rand_tensor(rng, ctx, p2, q2, max_deg=2, nterms=2)
        C = rand_tensor(rng, ctx, p3, q3, max_deg=2, nterms=2)
        a, b = p1 + q1, p2 + q2
        lhs = schouten_bracket(A, wedge(B, C))
        t1 = wedge(schouten_bracket(A, B), C)
        t2 = wedge(B, schouten_bracket(A, C))
        if ((a - 1) * b) % 2:
            t2 = -t2
        diff = lhs - t1 - t2
        assert diff.truncate(ctx.max_degree - 2).is_zero(), (degs, trial)


def test_dbar_squares_to_zero():
    ctx = CTX
    rng = random.Random(13)
    for _ in range(6):
        p = rng.randrange(3)
        q = rng.randrange(2)
        T = rand_tensor(rng, ctx, p, q, max_deg=3, nterms=3)
        assert T.dbar().dbar().is_zero()


def test_dbar_is_a_bracket_derivation():
    # dbar[A, B] = [dbar A, B] + (-1)^(a-1) [A, dbar B]
    ctx = JetContext(n=2, k=1, max_degree=6)
    rng = random.Random(11)
    for _ in range(8):
        p1, q1 = 1 + rng.randrange(2), rng.randrange(2)
        p2, q2 = 1 + rng.randrange(2), rng.randrange(2)
        A = rand_tensor(rng, ctx, p1, q1, max_deg=3, nterms=2)
        B = rand_tensor(rng, ctx, p2, q2, max_deg=3, nterms=2)
        a = p1 + q1
        lhs = schouten_bracket(A, B).dbar()
        rhs = schouten_bracket(A.dbar(), B)
        t2 = schouten_bracket(A, B.dbar())
        if (a - 1) % 2:
            t2 = -t2
        assert (lhs - rhs - t2).truncate(ctx.max_degree - 2).is_zero()


def test_wedge_associative_and_graded_commutative():
    ctx = CTX
    rng = random.Random(17)
    for _ in range(4):
        A = rand_tensor(rng, ctx, 1, 0, max_deg=2, nterms=2)
        B = rand_tensor(rng, ctx, 0, 1, max_deg=2, nterms=2)
        C = rand_tensor(rng, ctx, 1, 1, max_deg=2, nterms=2)
        assert wedge(wedge(A, B), C) == wedge(A, wedge(B, C))
        # degree-1 times degree-1 anticommutes
        assert wedge(A, B) == -wedge(B, A)


def test_majorant_norm_basics():
    ctx = CTX
    r = Fraction(1, 2)
    f = JetFunction(ctx, {((1, 0), (0, 0)): QI(Fraction(3), Fraction(-4))})
    # |3 - 4i| is bounded by |re| + |im| = 7, times r for the degree
    assert majorant_norm(f, r) == Fraction(7, 2)
    g = JetFunction.const(ctx, 2)
    assert majorant_norm(f + g, r) <= majorant_norm(f, r) + majorant_norm(g, r)
    rng = random.Random(19)
    T = rand_tensor(rng, ctx, 1, 1, max_deg=2, nterms=3)
    assert majorant_norm(T.scale(QI(Fraction(-2))), r) == 2 * majorant_norm(T, r)


def test_mc_residual_holomorphic_poisson_is_flat():
    ctx = CTX
    fhol = JetFunction(ctx, {((1, 0), (0, 0)): QI(1),
                             ((0, 2), (0, 0)): QI(Fraction(1, 2))})
    eps = Deformation.from_poisson(MixedTensor(ctx, 2, 0, {((0, 1), ()): fhol}))
    assert mc_residual(eps).is_zero()


def test_mc_residual_detects_antiholomorphic_dependence():
    ctx = CTX
    f = JetFunction(ctx, {((0, 0), (1, 0)): QI(1)})
    eps = Deformation.from_poisson(MixedTensor(ctx, 2, 0, {((0, 1), ()): f}))
    mc = mc_residual(eps)
    assert not mc.is_zero()
    assert not mc.p21.is_zero()
    assert mc.p30.is_zero() and mc.p12.is_zero() and mc.p03.is_zero()


def test_brane_compat_check_conditions():
    ctx = JetContext(n=3, k=1, max_degree=4)
    one = JetFunction.const(ctx, 1)

    # both bivector legs normal, nonzero on S: coisotropy violated
    bad20 = MixedTensor(ctx, 2, 0, {((1, 2), ()): one})
    rep = brane_compat_check(Deformation.from_poisson(bad20))
    assert not rep["compatible"] and not rep["poisson_coisotropic"]

    # normal vector leg against tangential form leg
    bad11 = MixedTensor(ctx, 1, 1, {((1,), (0,)): one})
    rep = brane_compat_check(
        Deformation(MixedTensor(ctx, 2, 0), bad11, MixedTensor(ctx, 0, 2)))
    assert not rep["compatible"] and not rep["mixed_ok"]

    # multiplying by a normal coordinate moves the component into the
    # ideal of S, which restores compatibility
    z1 = JetFunction.coord(ctx, 1)
    ok11 = MixedTensor(ctx, 1, 1, {((1,), (0,)): z1})
    rep = brane_compat_check(
        Deformation(MixedTensor(ctx, 2, 0), ok11, MixedTensor(ctx, 0, 2)))
    assert rep["compatible"]

    # form part pulled back to S must vanish; needs k >= 2 for a
    # tangential 2-form word
    ctx2 = JetContext(n=3, k=2, max_degree=4)
    bad02 = MixedTensor(ctx2, 0, 2, {((), (0, 1)): JetFunction.const(ctx2, 1)})
    rep = brane_compat_check(
        Deformation(MixedTensor(ctx2, 2, 0), MixedTensor(ctx2, 1, 1), bad02))
    assert not rep["compatible"] and not rep["form_pullback_zero"]


def test_deformation_shape_validation():
    ctx = CTX
    try:
        Deformation(MixedTensor(ctx, 1, 1), MixedTensor(ctx, 1, 1),
                    MixedTensor(ctx, 0, 2))
    except ValueError:
        pass
    else:
        raise AssertionError("wrong bidegree accepted")
