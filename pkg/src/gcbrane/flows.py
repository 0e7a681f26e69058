"""Generalized vector fields, their flows, and the action on deformations.

A generalized field is X + xi (vector plus 1-form).  Its flow is the
pair (phi_t, B_t): the diffeomorphism part integrates X, and the gauge
part integrates the pullbacks of d(xi) along the way,

    B_t = sum_{k>=0} t^{k+1}/(k+1)! L_X^k (d xi),

which is termwise exact, hence closed.  Both series must terminate on
jets; constant fields and fields vanishing to order two always do, and
anything else is rejected rather than silently truncated.

`act_on_deformation` moves a deformation by a flow: deform the
standard isotropic frame by the deformation, gauge it, push it
forward, and re-read the deformation off the transported frame.  The
re-reading inverts the frame's holomorphic block with a Neumann
series, which terminates because the correction has no constant term.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QI
from .errors import PreconditionError
from .jets import Deformation, JetContext, JetFunction, MixedTensor
from .realcalc import (
    JetMap,
    RealForm,
    RealVector,
    contract,
    exterior_d,
    form_wedge,
    lie_bracket,
    lie_derivative,
    pullback,
    pushforward_vector,
)
from . import linalg as la

_SERIES_GUARD = 4


class GeneralizedField:
    """X + xi: a vector field plus a 1-form on the polydisc."""

    __slots__ = ("X", "xi")

    def __init__(self, X: RealVector, xi: RealForm):
        if xi.degree != 1:
            raise ValueError("the form part must be a 1-form")
        self.X = X
        self.xi = xi

    @property
    def ctx(self):
        return self.X.ctx

    @classmethod
    def zero(cls, ctx):
        return cls(RealVector(ctx), RealForm(ctx, 1))

    def __add__(self, other):
        return GeneralizedField(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other):
        return GeneralizedField(self.X - other.X, self.xi - other.xi)

    def scale(self, c):
        return GeneralizedField(self.X.scale(c), self.xi.scale(c))

    def conj(self):
        return GeneralizedField(self.X.conj(), self.xi.conj())

    def is_real(self):
        return self.X.is_real() and self.xi.is_real()

    def __eq__(self, other):
        if not isinstance(other, GeneralizedField):
            return NotImplemented
        return self.X == other.X and self.xi == other.xi


def pairing(a: GeneralizedField, b: GeneralizedField) -> JetFunction:
    """Half-sum pairing <X+xi, Y+eta> = (xi(Y) + eta(X))/2."""
    val = contract(b.X, a.xi).get(()) + contract(a.X, b.xi).get(())
    return val.scale(QI(Fraction(1, 2)))


def courant_bracket(
    H, a: GeneralizedField, b: GeneralizedField
) -> GeneralizedField:
    """[X+xi, Y+eta] = [X,Y] + L_X eta - i_Y d(xi) + i_X i_Y H.

    Pass H = None (or a zero 3-form) for the untwisted bracket.  This
    is the non-skew (Leibniz) convention; the symmetric defect is the
    differential of the pairing.
    """
    X, xi = a.X, a.xi
    Y, eta = b.X, b.xi
    form = lie_derivative(X, eta) - contract(Y, exterior_d(xi))
    if H is not None and not H.is_zero():
        if H.degree != 3:
            raise PreconditionError("twist must be a 3-form")
        if not exterior_d(H).is_zero():
            raise PreconditionError("twist 3-form must be closed")
        form = form + contract(X, contract(Y, H))
    return GeneralizedField(lie_bracket(X, Y), form)


class GeneralizedFlow:
    """A diffeomorphism-plus-gauge pair (phi, B) with phi's inverse."""

    __slots__ = ("phi", "phi_inv", "B")

    def __init__(self, phi: JetMap, phi_inv: JetMap, B: RealForm):
        if B.degree != 2:
            raise ValueError("gauge part must be a 2-form")
        self.phi = phi
        self.phi_inv = phi_inv
        self.B = B

    @property
    def ctx(self):
        return self.phi.ctx

    @classmethod
    def identity(cls, ctx):
        ident = JetMap.identity(ctx)
        return cls(ident, ident, RealForm(ctx, 2))


def _exp_images(X: RealVector, t, ctx) -> list:
    """Images of all coordinates under exp(tX); errors if the series
    fails to terminate on jets."""
    coords = [JetFunction.coord(ctx, i) for i in range(ctx.n)] + [
        JetFunction.coord_bar(ctx, i) for i in range(ctx.n)
    ]
    images = list(coords)
    terms = list(coords)
    factor = QI(1)
    for k in range(1, ctx.max_degree + _SERIES_GUARD + 2):
        terms = [X.apply(f) for f in terms]
        factor = factor * QI(Fraction(t) / k)
        if all(f.is_zero() for f in terms):
            return images
        if k > ctx.max_degree + _SERIES_GUARD:
            raise PreconditionError(
                "flow series does not terminate on jets; the field must be "
                "constant or vanish to order at least two"
            )
        images = [g + f.scale(factor) for g, f in zip(images, terms)]
    return images


def _gauge_series(X: RealVector, xi: RealForm, t, ctx) -> RealForm:
    """B_t as the terminating exponential series of Lie derivatives."""
    dxi = exterior_d(xi)
    B = RealForm(ctx, 2)
    term = dxi
    coeff = QI(Fraction(t))
    k = 0
    while not term.is_zero():
        B = B + term.scale(coeff)
        k += 1
        if k > ctx.max_degree + _SERIES_GUARD:
            raise PreconditionError(
                "gauge series does not terminate on jets; the field must be "
                "constant or vanish to order at least two"
            )
        term = lie_derivative(X, term)
        coeff = coeff * QI(Fraction(t) / (k + 1))
    return B


def flow(v: GeneralizedField, t) -> GeneralizedFlow:
    """Integrate a real generalized field for time t, exactly on jets."""
    ctx = v.ctx
    if not v.is_real():
        raise PreconditionError("can only flow a real generalized field")
    fw = _exp_images(v.X, t, ctx)
    bw = _exp_images(v.X, -t, ctx)
    n = ctx.n
    phi = JetMap(ctx, fw[:n], fw[n:])
    phi_inv = JetMap(ctx, bw[:n], bw[n:])
    B = _gauge_series(v.X, v.xi, t, ctx)
    return GeneralizedFlow(phi, phi_inv, B)


def compose_flows(second: GeneralizedFlow, first: GeneralizedFlow) -> GeneralizedFlow:
    """The flow doing `first` and then `second`."""
    phi = second.phi.compose(first.phi)
    phi_inv = first.phi_inv.compose(second.phi_inv)
    B = first.B + pullback(first.phi, second.B)
    return GeneralizedFlow(phi, phi_inv, B)


def invert_flow(f: GeneralizedFlow) -> GeneralizedFlow:
    B = pullback(f.phi_inv, f.B).scale(QI(-1))
    return GeneralizedFlow(f.phi_inv, f.phi, B)


# -- the graph dictionary -----------------------------------------------------


def graph_sections(eps: Deformation):
    """The deformed frame: for each m the transported antiholomorphic
    coordinate vector and the transported holomorphic coordinate form,
    each as a (RealVector, RealForm) pair."""
    ctx = eps.ctx
    n = ctx.n
    one = JetFunction.const(ctx, 1)
    secs = []
    for m in range(n):
        vec = {(1, m): one}
        v11 = eps.e11.contract_form(m)
        for (alpha, _), f in v11.comps.items():
            vec[(0, alpha[0])] = vec.get((0, alpha[0]), JetFunction.zero(ctx)) + f
        form = {}
        v02 = eps.e02.contract_form(m)
        for (_, beta), f in v02.comps.items():
            key = ((1, beta[0]),)
            form[key] = form.get(key, JetFunction.zero(ctx)) + f
        secs.append((RealVector(ctx, vec), RealForm(ctx, 1, form)))
    for m in range(n):
        form = {((0, m),): one}
        vec = {}
        v20 = eps.e20.contract_vector(m)
        for (alpha, _), f in v20.comps.items():
            vec[(0, alpha[0])] = vec.get((0, alpha[0]), JetFunction.zero(ctx)) + f
        v11 = eps.e11.contract_vector(m)
        for (_, beta), f in v11.comps.items():
            key = ((1, beta[0]),)
            form[key] = form.get(key, JetFunction.zero(ctx)) + f
        secs.append((RealVector(ctx, vec), RealForm(ctx, 1, form)))
    return secs


def _frame_blocks(ctx, secs):
    """Split sections into the frame block U (dbar-vectors and dz-forms)
    and the transverse block V (d-vectors and dzbar-forms)."""
    n = ctx.n
    U = []
    V = []
    for X, xi in secs:
        U.append(
            [X.get((1, j)) for j in range(n)]
            + [xi.get(((0, j),)) for j in range(n)]
        )
        V.append(
            [X.get((0, j)) for j in range(n)]
            + [xi.get(((1, j),)) for j in range(n)]
        )
    return U, V


def _jmat_mul(A, B, ctx):
    rows = len(A)
    inner = len(B)
    cols = len(B[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            f = JetFunction.zero(ctx)
            for l in range(inner):
                if not A[i][l].is_zero() and not B[l][j].is_zero():
                    f = f + A[i][l] * B[l][j]
            row.append(f)
        out.append(row)
    return out


def _jet_matrix_inverse(U, ctx):
    """Invert a jet-coefficient matrix whose constant part is invertible
    by a terminating Neumann series."""
    size = len(U)
    U0 = [[U[i][j].constant_term() for j in range(size)] for i in range(size)]
    try:
        U0_inv = la.inverse(U0)
    except ValueError:
        raise PreconditionError(
            "transported frame is degenerate at the base point: the "
            "structure is no longer a graph over the standard frame"
        )
    U0_inv_jets = [
        [JetFunction.const(ctx, U0_inv[i][j]) for j in range(size)]
        for i in range(size)
    ]
    R = _jmat_mul(U0_inv_jets, U, ctx)
    for i in range(size):
        R[i][i] = R[i][i] - JetFunction.const(ctx, 1)
    acc = [
        [
            JetFunction.const(ctx, 1) if i == j else JetFunction.zero(ctx)
            for j in range(size)
        ]
        for i in range(size)
    ]
    term = acc
    for _ in range(ctx.max_degree + 1):
        term = _jmat_mul(term, R, ctx)
        term = [[f.scale(QI(-1)) for f in row] for row in term]
        if all(f.is_zero() for row in term for f in row):
            break
        acc = [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, term)
        ]
    return _jmat_mul(acc, U0_inv_jets, ctx)


def _lift(ctx: JetContext) -> JetContext:
    return JetContext(n=ctx.n, k=ctx.k, max_degree=ctx.max_degree + 1, r=ctx.r)


def _rejet(f: JetFunction, ctx2: JetContext) -> JetFunction:
    return JetFunction(ctx2, f.terms)


def _retensor(T: MixedTensor, ctx2: JetContext) -> MixedTensor:
    out = MixedTensor(ctx2, T.p, T.q)
    for (alpha, beta), f in T.comps.items():
        out._add_term(alpha, beta, _rejet(f, ctx2))
    return out


def _redef(eps: Deformation, ctx2: JetContext) -> Deformation:
    return Deformation(
        _retensor(eps.e20, ctx2),
        _retensor(eps.e11, ctx2),
        _retensor(eps.e02, ctx2),
    )


def _remap(m: JetMap, ctx2: JetContext) -> JetMap:
    return JetMap(
        ctx2,
        [_rejet(f, ctx2) for f in m.zim],
        [_rejet(f, ctx2) for f in m.zbim],
    )


def _reform(A: RealForm, ctx2: JetContext) -> RealForm:
    out = RealForm(ctx2, A.degree)
    for w, f in A.comps.items():
        out._add_term(w, _rejet(f, ctx2))
    return out


def invert_jet_map(phi: JetMap) -> JetMap:
    """Inverse of a jet map with invertible linear part.  Maps moving
    the origin are handled by factoring off the translation."""
    ctx = phi.ctx
    c = phi.constant_part()
    if all(x == QI(0) for x in c):
        return phi.invert()
    n = ctx.n
    shifted_z = [phi.zim[i] - JetFunction.const(ctx, c[i]) for i in range(n)]
    shifted_zb = [
        phi.zbim[i] - JetFunction.const(ctx, c[n + i]) for i in range(n)
    ]
    inv0 = JetMap(ctx, shifted_z, shifted_zb).invert()
    trans = JetMap(
        ctx,
        [
            JetFunction.coord(ctx, i) - JetFunction.const(ctx, c[i])
            for i in range(n)
        ],
        [
            JetFunction.coord_bar(ctx, i) - JetFunction.const(ctx, c[n + i])
            for i in range(n)
        ],
    )
    return inv0.compose(trans)


def deformation_from_transverse(ctx, M) -> Deformation:
    """Read a deformation back off the normalized frame's transverse
    block, checking the structural symmetries.

    M rows: n transported antiholomorphic vectors then n transported
    holomorphic forms; columns: n holomorphic vector components then n
    antiholomorphic form components.
    """
    n = ctx.n
    e20 = MixedTensor(ctx, 2, 0)
    e11 = MixedTensor(ctx, 1, 1)
    e02 = MixedTensor(ctx, 0, 2)
    for a in range(n):
        if not M[n + a][a].is_zero():
            raise AssertionError("transported frame lost bivector antisymmetry")
        if not M[a][n + a].is_zero():
            raise AssertionError("transported frame lost form antisymmetry")
        for b in range(a + 1, n):
            f = M[n + a][b]
            if f != M[n + b][a].scale(QI(-1)):
                raise AssertionError("transported frame lost bivector antisymmetry")
            if not f.is_zero():
                e20._add_term((a, b), (), f)
            g = M[a][n + b]
            if g != M[b][n + a].scale(QI(-1)):
                raise AssertionError("transported frame lost form antisymmetry")
            if not g.is_zero():
                e02._add_term((), (a, b), g)
    for i in range(n):
        for j in range(n):
            f = M[j][i]
            if f != M[n + i][n + j].scale(QI(-1)):
                raise AssertionError("transported frame's mixed blocks disagree")
            if not f.is_zero():
                e11._add_term((i,), (j,), f)
    return Deformation(e20, e11, e02)


def act_on_deformation(fl: GeneralizedFlow, eps: Deformation) -> Deformation:
    """Transport a deformation by a flow: gauge the deformed frame,
    push it forward, renormalize, and read the new deformation off.

    The result is the exact jet of the transported structure at the
    context degree.  The transport itself runs one degree higher so
    that the differentiations inside pullback and pushforward do not
    eat into the returned degrees; the flow's inverse is recomputed at
    the lifted degree for the same reason.
    """
    ctx = eps.ctx
    up = _lift(ctx)
    phi = _remap(fl.phi, up)
    try:
        phi_inv = invert_jet_map(phi)
    except ValueError:
        raise PreconditionError("flow is not jet-invertible")
    B = _reform(fl.B, up)
    secs = graph_sections(_redef(eps, up))
    secs = [(X, xi + contract(X, B)) for X, xi in secs]
    secs = [
        (pushforward_vector(phi, phi_inv, X), pullback(phi_inv, xi))
        for X, xi in secs
    ]
    U, V = _frame_blocks(up, secs)
    U_inv = _jet_matrix_inverse(U, up)
    M = _jmat_mul(U_inv, V, up)
    M = [[f.truncate(ctx.max_degree) for f in row] for row in M]
    return _redef(deformation_from_transverse(up, M), ctx)


def field_from_parts(V10: MixedTensor, V01: MixedTensor) -> GeneralizedField:
    """Realify the L-transverse data X^{1,0} + xi^{0,1} into the real
    field (X + conj X) + (xi + conj xi)."""
    ctx = V10.ctx
    if (V10.p, V10.q) != (1, 0) or (V01.p, V01.q) != (0, 1):
        raise ValueError("expected a (1,0) vector and a (0,1) form")
    vec = {}
    for (alpha, _), f in V10.comps.items():
        vec[(0, alpha[0])] = f
    form = {}
    for (_, beta), f in V01.comps.items():
        form[((1, beta[0]),)] = f
    half = GeneralizedField(RealVector(ctx, vec), RealForm(ctx, 1, form))
    return half + half.conj()


def transverse_parts(v: GeneralizedField):
    """The (1,0)-vector and (0,1)-form components of a field."""
    ctx = v.ctx
    V10 = MixedTensor(ctx, 1, 0)
    for (c, i), f in v.X.comps.items():
        if c == 0 and not f.is_zero():
            V10._add_term((i,), (), f)
    V01 = MixedTensor(ctx, 0, 1)
    for word, f in v.xi.comps.items():
        if word[0][0] == 1 and not f.is_zero():
            V01._add_term((), (word[0][1],), f)
    return V10, V01


def infinitesimal_action(v: GeneralizedField, eps: Deformation) -> Deformation:
    """First-order change of the deformation along the field:
    dbar(V) + [V, eps] for the transverse part V of the field."""
    from .jets import schouten_bracket

    ctx = eps.ctx
    V10, V01 = transverse_parts(v)
    order = ctx.max_degree - 1
    i20 = schouten_bracket(V10, eps.e20, order)
    i11 = (
        V10.dbar()
        + schouten_bracket(V10, eps.e11, order)
        + schouten_bracket(V01, eps.e20, order)
    )
    i02 = (
        V01.dbar()
        + schouten_bracket(V10, eps.e02, order)
        + schouten_bracket(V01, eps.e11, order)
    )
    return Deformation(i20.truncate(order), i11.truncate(order), i02.truncate(order))


def graph_bracket_residuals(eps: Deformation):
    """Courant brackets of all pairs of deformed frame sections, reduced
    against the deformed frame: the transverse remainders.

    The remainders vanish exactly when the deformed structure is
    involutive, so this is an independent integrability check against
    `mc_residual`.  Returns a dict {(s, t): (RealVector, RealForm)}
    with s, t frame indices (antiholomorphic vectors first).
    """
    ctx = eps.ctx
    n = ctx.n
    secs = graph_sections(eps)
    fields = [GeneralizedField(X, xi) for X, xi in secs]
    U, V = _frame_blocks(ctx, secs)
    U_inv = _jet_matrix_inverse(U, ctx)
    out = {}
    for s in range(2 * n):
        for t in range(s + 1, 2 * n):
            br = courant_bracket(None, fields[s], fields[t])
            row_u = [br.X.get((1, j)) for j in range(n)] + [
                br.xi.get(((0, j),)) for j in range(n)
            ]
            row_v = [br.X.get((0, j)) for j in range(n)] + [
                br.xi.get(((1, j),)) for j in range(n)
            ]
            coeffs = [
                sum(
                    (row_u[l] * U_inv[l][j] for l in range(2 * n)),
                    JetFunction.zero(ctx),
                )
                for j in range(2 * n)
            ]
            res = [
                row_v[j]
                - sum(
                    (coeffs[l] * V[l][j] for l in range(2 * n)),
                    JetFunction.zero(ctx),
                )
                for j in range(2 * n)
            ]
            order = ctx.max_degree - 1
            vec = RealVector(
                ctx, {(0, j): res[j].truncate(order) for j in range(n)}
            )
            form = RealForm(
                ctx,
                1,
                {((1, j),): res[n + j].truncate(order) for j in range(n)},
            )
            out[(s, t)] = (vec, form)
    return out
