"""Homotopy operators for the antiholomorphic differential.

The polynomial complex in the zbar variables is exact in positive form
degree, and the contraction is explicit: peel off the lowest form
index, antidifferentiate in that variable, and freeze the earlier
variables at zero.  `q_operator` realizes this; on inputs whose
coefficients stay one degree below the truncation order it satisfies

    dbar(Q(T)) + Q(dbar(T)) == T          (form degree >= 1)

exactly, no analysis required.

`stretch_s` restricts a tensor to the brane S (tangential legs only,
coefficients evaluated on S).  It commutes with dbar and is an
idempotent, and `p_operator` mixes it into Q so that outputs of the
combined homotopy stay tangent to the brane on brane-compatible
input while satisfying the same identity.
"""

from __future__ import annotations

from fractions import Fraction

from .jets import JetFunction, MixedTensor, _remove_at
from .scalars import QI


def pi_j(T: MixedTensor, j: int) -> MixedTensor:
    """Components whose lowest form index is j, with fbar_j stripped.

    The form block sits leftmost in the basis word and j is its first
    letter, so stripping it costs no sign.
    """
    res = MixedTensor(T.ctx, T.p, T.q - 1)
    for (alpha, beta), f in T.comps.items():
        if beta and beta[0] == j:
            res._add_term(alpha, _remove_at(beta, 0), f)
    return res


def antiderivative_T(f: JetFunction, i: int) -> JetFunction:
    """Antiderivative in zbar_i with integration constant zero.

    Raises each monomial degree by one; monomials that would leave the
    truncation range are dropped, so exactness statements need inputs
    one degree below the cap.
    """
    N = f.ctx.max_degree
    out = {}
    for (a, b), c in f.terms.items():
        if sum(a) + sum(b) + 1 > N:
            continue
        e = b[i]
        b2 = b[:i] + (e + 1,) + b[i + 1 :]
        out[(a, b2)] = c * QI(Fraction(1, e + 1))
    g = JetFunction(f.ctx)
    g.terms = out
    return g


def hol_projection_H(f: JetFunction, i: int) -> JetFunction:
    """Freeze zbar_i at zero: keep only monomials of zbar_i-degree 0."""
    out = {key: c for key, c in f.terms.items() if key[1][i] == 0}
    g = JetFunction(f.ctx)
    g.terms = out
    return g


def q_operator(T: MixedTensor) -> MixedTensor:
    """Contraction for dbar in form degree >= 1.

    Q(T) = sum_j T_j( H_1 ... H_{j-1} ( pi_j(T) ) ), where pi_j picks
    the part with lowest form index j.  Zero in form degree 0.
    """
    if T.q == 0:
        return MixedTensor(T.ctx, T.p, 0)
    total = MixedTensor(T.ctx, T.p, T.q - 1)
    for j in range(T.ctx.n):
        part = pi_j(T, j)
        if part.is_zero():
            continue
        for i in range(j):
            part = part.scale_coeffs(lambda f, i=i: hol_projection_H(f, i))
        total = total + part.scale_coeffs(lambda f, j=j: antiderivative_T(f, j))
    return total


def stretch_s(T: MixedTensor) -> MixedTensor:
    """Restrict to the brane: drop any component with a normal leg,
    evaluate the remaining coefficients on S."""
    k = T.ctx.k
    res = MixedTensor(T.ctx, T.p, T.q)
    for (alpha, beta), f in T.comps.items():
        if any(i >= k for i in alpha) or any(j >= k for j in beta):
            continue
        res._add_term(alpha, beta, f.restrict_brane())
    return res


def p_operator(T: MixedTensor) -> MixedTensor:
    """Brane-stabilized homotopy: P = Q - sQ + Qs."""
    qt = q_operator(T)
    return qt - stretch_s(qt) + q_operator(stretch_s(T))
