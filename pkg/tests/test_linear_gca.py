import random
from fractions import Fraction

from gcbrane import linalg as la
from gcbrane.errors import PreconditionError
from gcbrane.linear_gca import (
    LinearBrane,
    make_symplectic_gc,
    make_complex_gc,
    make_complex_poisson_gc,
    standard_complex_matrix,
    b_transform,
    real_poisson,
    check_gc,
    check_linear_brane,
    lagrangian_tau,
    annihilator_rows,
    split_linear_brane,
    verify_splitting,
    random_split_instance,
    brane_tangent_from_F,
)


def test_symplectic_constructor():
    om = [[0, 1], [-1, 0]]
    gc = make_symplectic_gc(om)
    assert check_gc(gc)["ok"]
    assert real_poisson(gc) == [[Fraction(0), Fraction(-1)],
                                [Fraction(1), Fraction(0)]]
    assert gc.op[2][0] == 0 and gc.op[2][1] == -1


def test_complex_constructor():
    I2 = [[0, -1], [1, 0]]
    gc = make_complex_gc(I2)
    assert check_gc(gc)["ok"]
    assert real_poisson(gc) == [[Fraction(0)] * 2] * 2


def test_complex_poisson_constructor():
    I4 = standard_complex_matrix(4)
    P4 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]
    gc = make_complex_poisson_gc(I4, P4)
    assert check_gc(gc)["ok"]
    assert real_poisson(gc) == [[Fraction(x) for x in row] for row in P4]


def test_b_transform_group_law_and_poisson_invariance():
    I4 = standard_complex_matrix(4)
    P4 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]
    gc = make_complex_poisson_gc(I4, P4)
    B = [[0, 1, 0, -2], [-1, 0, 3, 0], [0, -3, 0, 1], [2, 0, -1, 0]]
    gb = b_transform(gc, B)
    assert real_poisson(gb) == real_poisson(gc)
    back = b_transform(gb, la.mat_neg([[Fraction(x) for x in r] for r in B]))
    assert back.op == gc.op


def test_lagrangian_brane_on_symplectic():
    om4 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    gs = make_symplectic_gc(om4)
    S = [[1, 0, 0, 0], [0, 1, 0, 0]]
    br = lagrangian_tau(gs, S)
    expect = la.row_basis(
        [[1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0, 0]]
        + annihilator_rows(S, 4))
    assert br.tau_rows == [[Fraction(x) for x in r] for r in expect]
    assert check_linear_brane(gs, br)["ok"]
    spl = split_linear_brane(gs, br)
    assert verify_splitting(gs, br, spl)["ok"]


def test_standard_brane_splits_trivially():
    # holomorphic-form-style input: the splitting is identity-like
    I4 = standard_complex_matrix(4)
    P4 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]
    gc = make_complex_poisson_gc(I4, P4)
    S0 = [[1, 0, 0, 0], [0, 1, 0, 0]]
    tau0 = [[1, 0, 0, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0, 0]] + annihilator_rows(S0, 4)
    br = LinearBrane(S0, tau0)
    spl = split_linear_brane(gc, br)
    assert spl.B == la.zeros(4, 4, Fraction(1))
    assert spl.I == [[Fraction(x) for x in r] for r in I4]
    assert verify_splitting(gc, br, spl)["ok"]


def test_brane_tangent_from_F():
    S = [[Fraction(1), 0, 0, 0], [0, Fraction(1), 0, 0]]
    F = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    br = brane_tangent_from_F(S, F, 4)
    assert len(br.tau_rows) == 4
    # rows over S carry the F-pairing in the covector half
    sp = la.Span(br.tau_rows)
    assert sp.contains([Fraction(1), 0, 0, 0, 0, Fraction(-1), 0, 0])


def test_odd_dimensional_brane_is_rejected():
    om = [[0, 1], [-1, 0]]
    gc = make_symplectic_gc(om)
    e0 = [Fraction(1), Fraction(0), Fraction(0), Fraction(0)]
    br = LinearBrane([[Fraction(1), Fraction(0)]], [e0, gc.apply(e0)])
    assert check_linear_brane(gc, br)["ok"]
    try:
        split_linear_brane(gc, br)
    except PreconditionError as e:
        assert "parity" in str(e)
    else:
        raise AssertionError("odd-dimensional S accepted")


def test_random_instances_split_exactly():
    rng = random.Random(11)
    for _ in range(15):
        m = rng.choice([4, 6, 8])
        gc, brane = random_split_instance(rng, m)
        assert check_gc(gc)["ok"]
        assert check_linear_brane(gc, brane)["ok"]
        spl = split_linear_brane(gc, brane)
        rep = verify_splitting(gc, brane, spl)
        assert rep["ok"], (m, rep)
