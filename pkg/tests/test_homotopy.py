import random
from fractions import Fraction

from gcbrane.scalars import QI
from gcbrane.jets import JetContext, JetFunction, MixedTensor, wedge
from gcbrane.homotopy import (
    pi_j,
    antiderivative_T,
    hol_projection_H,
    q_operator,
    stretch_s,
    p_operator,
)
from gcbrane.propsuite import rand_tensor, mixing_relabelings, relabel_tensor


def test_slot_projection_strips_lowest_form_index():
    ctx = JetContext(n=3, k=2, max_degree=5)
    a = JetFunction.monomial(ctx, (0, 0, 0), (0, 0, 1))
    T = MixedTensor(ctx, 0, 2, {((), (0, 1)): a})
    out = pi_j(T, 0)
    assert out.comps == {((), (1,)): a}
    assert pi_j(T, 2).is_zero()


def test_antiderivative_examples():
    ctx = JetContext(n=3, k=2, max_degree=5)
    one = JetFunction.const(ctx, 1)
    assert antiderivative_T(one, 0) == JetFunction.monomial(ctx, (0, 0, 0), (1, 0, 0))
    for b in range(1, 4):
        zb = JetFunction.monomial(ctx, (0, 0, 0), (b, 0, 0))
        out = antiderivative_T(zb, 0)
        want = JetFunction.monomial(ctx, (0, 0, 0), (b + 1, 0, 0)).scale(
            QI(Fraction(1, b + 1)))
        assert out == want
    # monomials that would overflow the degree cap are dropped
    top = JetFunction.monomial(ctx, (0, 0, 0), (5, 0, 0))
    assert antiderivative_T(top, 0).is_zero()


def test_holomorphic_projection_example():
    ctx = JetContext(n=3, k=2, max_degree=5)
    f = (JetFunction.monomial(ctx, (1, 0, 0), (0, 0, 0))
         + JetFunction.monomial(ctx, (0, 0, 0), (1, 0, 0)))
    assert hol_projection_H(f, 0) == JetFunction.monomial(ctx, (1, 0, 0), (0, 0, 0))


def test_q_operator_single_form_example():
    ctx = JetContext(n=3, k=2, max_degree=5)
    g = MixedTensor(ctx, 0, 1, {((), (0,)): JetFunction.const(ctx, 1)})
    out = q_operator(g)
    assert out.comps == {((), ()): JetFunction.monomial(ctx, (0, 0, 0), (1, 0, 0))}


def test_reconstruction_from_slot_projections():
    ctx = JetContext(n=3, k=2, max_degree=5)
    rng = random.Random(4)

    def dzb(j):
        return MixedTensor(ctx, 0, 1, {((), (j,)): JetFunction.const(ctx, 1)})

    for _ in range(8):
        p = rng.randrange(2)
        q = 1 + rng.randrange(2)
        T = rand_tensor(rng, ctx, p, q, max_deg=3, nterms=3)
        acc = MixedTensor(ctx, p, q)
        for j in range(ctx.n):
            acc = acc + wedge(dzb(j), pi_j(T, j))
        assert acc == T


def test_stretch_examples():
    # k = 2: the first normal coordinate has index 2
    ctx = JetContext(n=3, k=2, max_degree=5)
    one = JetFunction.const(ctx, 1)
    normal_leg = MixedTensor(ctx, 0, 1, {((), (2,)): one})
    assert stretch_s(normal_leg).is_zero()
    zb3 = JetFunction.monomial(ctx, (0, 0, 0), (0, 0, 1))
    normal_coeff = MixedTensor(ctx, 0, 1, {((), (0,)): zb3})
    assert stretch_s(normal_coeff).is_zero()
    zb1 = JetFunction.monomial(ctx, (0, 0, 0), (1, 0, 0))
    tangential = MixedTensor(ctx, 0, 1, {((), (0,)): zb1})
    assert stretch_s(tangential) == tangential


def test_stretch_idempotent_and_commutes_with_dbar():
    rng = random.Random(21)
    for n, k in [(2, 1), (3, 1), (3, 2)]:
        ctx = JetContext(n=n, k=k, max_degree=5)
        for _ in range(10):
            p = rng.randrange(0, 2)
            q = rng.randrange(0, n + 1)
            T = rand_tensor(rng, ctx, p, q, max_deg=3, nterms=3)
            assert stretch_s(stretch_s(T)) == stretch_s(T)
            assert stretch_s(T.dbar()) == stretch_s(T).dbar()


def test_homotopy_identities_all_bidegrees():
    # (Q dbar + dbar Q - Id) theta = 0 and the same for P, exactly, on
    # inputs truncated one below the cap (the antiderivative raises the
    # antiholomorphic degree by one)
    for n, k in [(1, 0), (2, 1), (3, 1), (3, 2)]:
        ctx = JetContext(n=n, k=k, max_degree=6)
        rng = random.Random(100 * n + k)
        for _ in range(20):
            p = rng.randrange(0, min(n, 2) + 1)
            q = rng.randrange(1, n + 1)
            T = rand_tensor(rng, ctx, p, q, max_deg=5, nterms=3)
            T = T.truncate(ctx.max_degree - 1)
            assert q_operator(T).dbar() + q_operator(T.dbar()) == T
            assert p_operator(T).dbar() + p_operator(T.dbar()) == T


def test_p_equals_q_on_jets():
    # the corrected operator agrees with the plain one identically in
    # this polynomial realization: the stretch commutes with Q, so the
    # correction terms cancel pairwise
    rng = random.Random(33)
    for n, k in [(2, 1), (3, 1), (3, 2), (2, 2)]:
        ctx = JetContext(n=n, k=k, max_degree=5)
        for _ in range(15):
            p = rng.randrange(0, 2)
            q = rng.randrange(1, n + 1)
            T = rand_tensor(rng, ctx, p, q, max_deg=3, nterms=3)
            assert p_operator(T) == q_operator(T)


def test_homotopy_identity_survives_input_relabeling():
    # the identity is coordinate-blind: relabeling the input by any
    # permutation that mixes tangent and normal indices cannot break it
    ctx = JetContext(n=3, k=2, max_degree=5)
    rng = random.Random(8)
    sigmas = mixing_relabelings(ctx.n, ctx.k)
    for _ in range(10):
        T = rand_tensor(rng, ctx, 1, 2, max_deg=3, nterms=3)
        T = T.truncate(ctx.max_degree - 1)
        sigma = sigmas[rng.randrange(len(sigmas))]
        R = relabel_tensor(T, sigma)
        assert q_operator(R).dbar() + q_operator(R.dbar()) == R
