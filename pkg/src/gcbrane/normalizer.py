"""Brane-adapted normalization of deformations, scaling preprocessing,
and the higher-rank connection splitter.

The normalization loop: build the corrector field from the stabilized
homotopy operator, flow for time one, transport the deformation, and
repeat.  Each step is exact on jets; truncation to the context degree
plays the role of smoothing.  For integrable inputs whose mixed parts
vanish at the base point, the vanishing order of the mixed parts grows
until only the bivector part survives, which is then holomorphic
Poisson to the order reached.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import QI
from .errors import PreconditionError
from .jets import (
    Deformation,
    JetContext,
    JetFunction,
    MixedTensor,
    brane_compat_check,
    majorant_norm,
    mc_residual,
    schouten_bracket,
    vanishing_order,
)
from .homotopy import p_operator
from .realcalc import (
    form_restricts_to_brane_tangent,
    map_preserves_brane_ideal,
)
from .flows import (
    GeneralizedField,
    GeneralizedFlow,
    act_on_deformation,
    compose_flows,
    field_from_parts,
    flow,
    _jet_matrix_inverse,
    _jmat_mul,
)


def mixed_order(eps: Deformation):
    """Joint vanishing order of the two mixed parts; inf when both zero."""
    return min(vanishing_order(eps.e11), vanishing_order(eps.e02))


def field_restricts_into_tau(v: GeneralizedField) -> bool:
    """Does the field, restricted to S, lie in TS + N*S?"""
    k = v.ctx.k
    for (c, i), f in v.X.comps.items():
        if i >= k and not f.restrict_brane().is_zero():
            return False
    for word, f in v.xi.comps.items():
        if word[0][1] < k and not f.restrict_brane().is_zero():
            return False
    return True


def homotopy_field(eps: Deformation) -> GeneralizedField:
    """The corrector field: stabilized homotopy operator applied to
    [e20, P e02] - e11 - e02, realified.

    Its restriction to S lies in TS + N*S whenever the deformation is
    brane-compatible; that is asserted, not assumed.
    """
    rep = brane_compat_check(eps)
    if not rep["compatible"]:
        raise PreconditionError(
            f"deformation is not brane-compatible: {rep['violations']}"
        )
    arg11 = schouten_bracket(eps.e20, p_operator(eps.e02)) - eps.e11
    V10 = p_operator(arg11)
    V01 = p_operator(eps.e02).scale(QI(-1))
    v = field_from_parts(V10, V01)
    assert field_restricts_into_tau(v), "corrector field left TS + N*S"
    return v


def normalize_step(eps: Deformation) -> Deformation:
    """One normalization step: transport by the time-1 flow of the
    corrector field.  Output degrees beyond the context cap are gone;
    that truncation is the smoothing."""
    if mixed_order(eps) < 1:
        raise PreconditionError(
            "mixed parts must vanish at the base point (order >= 1)"
        )
    v = homotopy_field(eps)
    return act_on_deformation(flow(v, 1), eps)


@dataclass
class NormalizationParams:
    max_iterations: int
    target_order: int
    delta_schedule: tuple = (
        Fraction(1, 2),
        Fraction(1, 4),
        Fraction(1, 8),
        Fraction(1, 16),
    )

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if self.target_order < 1:
            raise ValueError("target_order must be at least 1")


def run_normalization(eps: Deformation, params: NormalizationParams) -> dict:
    """Iterate normalize_step until the mixed parts vanish to the
    target order, recording one report row per state.

    Rejects non-integrable or brane-incompatible inputs up front.  A
    run that exhausts max_iterations returns converged=False with the
    partial rows; it does not raise.
    """
    ctx = eps.ctx
    if params.target_order > ctx.max_degree:
        raise PreconditionError("target_order exceeds the jet degree")
    if not mc_residual(eps).is_zero():
        raise PreconditionError(
            "deformation is not integrable: nonzero Maurer-Cartan residual"
        )
    rep = brane_compat_check(eps)
    if not rep["compatible"]:
        raise PreconditionError(
            f"deformation is not brane-compatible: {rep['violations']}"
        )
    if mixed_order(eps) < 1:
        raise PreconditionError(
            "mixed parts must vanish at the base point (order >= 1)"
        )

    rows = []
    current = eps
    acc = GeneralizedFlow.identity(ctx)
    r = ctx.r
    s_ok = True
    tau_ok = True
    converged = False
    iteration = 0
    while True:
        mo = mixed_order(current)
        mc = mc_residual(current)
        rows.append(
            {
                "iteration": iteration,
                "ord_eps11_02": mo,
                "norm20": majorant_norm(current.e20, r),
                "norm11": majorant_norm(current.e11, r),
                "norm02": majorant_norm(current.e02, r),
                "mc_residual_norm": mc.majorant(r),
                "S_preserved": s_ok,
                "tau_preserved": tau_ok,
            }
        )
        if mo >= params.target_order:
            converged = True
            break
        if iteration >= params.max_iterations:
            break
        v = homotopy_field(current)
        fl = flow(v, 1)
        current = act_on_deformation(fl, current)
        s_ok = map_preserves_brane_ideal(fl.phi)
        tau_ok = (
            field_restricts_into_tau(v)
            and form_restricts_to_brane_tangent(fl.B)
            and brane_compat_check(current)["compatible"]
        )
        acc = compose_flows(fl, acc)
        r = r * Fraction(3, 4)
        iteration += 1
    return {
        "converged": converged,
        "iterations": iteration,
        "rows": rows,
        "eps": current,
        "flow": acc,
    }


# -- zoom and cotangent scaling ----------------------------------------------


def _scale_degrees(T: MixedTensor, t: Fraction, weight: int) -> MixedTensor:
    out = MixedTensor(T.ctx, T.p, T.q)
    for key, f in T.comps.items():
        terms = {}
        for (a, b), c in f.terms.items():
            d = sum(a) + sum(b)
            terms[(a, b)] = c * QI(t ** (d + weight))
        out._add_term(key[0], key[1], JetFunction(T.ctx, terms))
    return out


def zoom(eps: Deformation, t) -> Deformation:
    """Pull back under z -> t z with the tensor-type weights: a
    coefficient of joint degree d scales by t^(d-2), t^d, t^(d+2) in
    the bivector, mixed, and form parts respectively."""
    t = Fraction(t)
    if t == 0:
        raise PreconditionError("zoom factor must be nonzero")
    return Deformation(
        _scale_degrees(eps.e20, t, -2),
        _scale_degrees(eps.e11, t, 0),
        _scale_degrees(eps.e02, t, 2),
    )


def cotangent_scale(eps: Deformation, s) -> Deformation:
    """Scale the cotangent directions: (e20, e11, e02) -> (s e20, e11,
    e02/s).  Preserves vanishing of the Maurer-Cartan residual."""
    s = Fraction(s)
    if s <= 0:
        raise PreconditionError("cotangent scale must be positive")
    return Deformation(
        eps.e20.scale(QI(s)),
        eps.e11,
        eps.e02.scale(QI(1 / s)),
    )


@dataclass(frozen=True)
class ScalingSchedule:
    """Zoom-plus-cotangent-scale preprocessing, bookkept in u = t^(1/2)
    so that s = t^(5/2) = u^5 stays rational.

    alpha, beta, gamma are the vanishing orders of the three parts at
    the base point; the joint rescaling multiplies their norms by
    u^(2*alpha+1), u^(2*beta), u^(2*gamma-1) on homogeneous parts.
    """

    u: Fraction
    alpha: int
    beta: int
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        if self.u <= 0:
            raise ValueError("u must be positive")

    @property
    def t(self) -> Fraction:
        return self.u * self.u

    @property
    def s(self) -> Fraction:
        return self.u**5

    def apply(self, eps: Deformation) -> Deformation:
        return cotangent_scale(zoom(eps, self.t), self.s)

    def predicted_u_exponents(self):
        return (
            2 * self.alpha + 1,
            2 * self.beta,
            2 * self.gamma - 1,
        )


# -- higher-rank connection splitting -----------------------------------------


@dataclass
class BraneConnection:
    """Connection split along the brane algebroid: the antiholomorphic
    tangent part (one matrix per dzbar_a, a < k) and the conormal part
    (one matrix per normal direction j >= k), over jets on S."""

    rank: int
    nabla_prime: list
    nabla_doubleprime: list
    pi: MixedTensor


def _is_brane_jet(f: JetFunction) -> bool:
    k = f.ctx.k
    n = f.ctx.n
    for a, b in f.terms:
        if any(a[i] or b[i] for i in range(k, n)):
            return False
    return True


def _mat_check_brane(mat, rank):
    if len(mat) != rank or any(len(row) != rank for row in mat):
        return False
    return all(_is_brane_jet(f) for row in mat for f in row)


def _mat_map(mat, fn):
    return [[fn(f) for f in row] for row in mat]


def _mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_comm(A, B, ctx):
    return _mat_sub(_jmat_mul(A, B, ctx), _jmat_mul(B, A, ctx))


def anchor_fields(pi: MixedTensor):
    """For each normal direction j, the tangential coefficients of the
    bivector's anchor on S: {j: {b: coefficient jet}} with b < k."""
    ctx = pi.ctx
    k, n = ctx.k, ctx.n
    out = {j: {} for j in range(k, n)}
    for (alpha, _), f in pi.comps.items():
        a, b = alpha
        if a < k and b >= k:
            # pi^(j=b, a) = -coeff of the ascending key (a, b)
            g = f.restrict_brane().scale(QI(-1))
            if not g.is_zero():
                out[b][a] = out[b].get(a, JetFunction.zero(ctx)) + g
        elif a >= k and b >= k:
            pass  # vanishes on S for coisotropic pi
    return out


def _apply_anchor(anchor_j, mat):
    out = None
    for b, coeff in anchor_j.items():
        term = _mat_map(mat, lambda f, b=b, c=coeff: c * f.diff_z(b))
        out = term if out is None else _mat_add(out, term)
    if out is None:
        ctx = None
        for row in mat:
            for f in row:
                ctx = f.ctx
                break
            break
        z = JetFunction.zero(ctx)
        out = [[z for _ in row] for row in mat]
    return out


def structure_constants(pi: MixedTensor):
    """c[l][(i,j)] = normal-direction derivative of pi^(ij) on S, for
    normal i < j and normal l."""
    ctx = pi.ctx
    k, n = ctx.k, ctx.n
    out = {l: {} for l in range(k, n)}
    for (alpha, _), f in pi.comps.items():
        i, j = alpha
        if i >= k and j >= k:
            for l in range(k, n):
                g = f.diff_z(l).restrict_brane()
                if not g.is_zero():
                    out[l][(i, j)] = g
    return out


def _check_pi(pi: MixedTensor):
    ctx = pi.ctx
    if (pi.p, pi.q) != (2, 0):
        raise PreconditionError("bivector must have bidegree (2,0)")
    if not pi.dbar().is_zero():
        raise PreconditionError("bivector must be holomorphic")
    k = ctx.k
    for (alpha, _), f in pi.comps.items():
        if alpha[0] >= k and alpha[1] >= k:
            if not f.restrict_brane().is_zero():
                raise PreconditionError("bivector must be coisotropic along S")
    jac = schouten_bracket(pi, pi, ctx.max_degree - 1)
    if not jac.is_zero():
        raise PreconditionError("bivector must satisfy the Jacobi identity")


def split_brane_connection(conn: dict, pi: MixedTensor):
    """Split raw connection data over the brane algebroid and verify
    flatness: the antiholomorphic part squares to zero, the two parts
    anticommute, and the conormal part is flat over the bivector.

    conn: {"rank": int, "theta": [k matrices], "gamma": [n-k matrices]}
    with jet entries living on S.  Returns (BraneConnection or None,
    report); a failing check lands in the report with the curvature
    witness, it does not raise.
    """
    _check_pi(pi)
    ctx = pi.ctx
    k, n = ctx.k, ctx.n
    rank = conn["rank"]
    theta = conn["theta"]
    gamma = conn["gamma"]
    if len(theta) != k or len(gamma) != n - k:
        raise PreconditionError(
            "need one tangent matrix per dzbar_a and one conormal matrix "
            "per normal direction"
        )
    for mat in list(theta) + list(gamma):
        if not _mat_check_brane(mat, rank):
            raise PreconditionError(
                "connection coefficients must be rank-sized matrices of "
                "jets on the brane"
            )
    anchors = anchor_fields(pi)
    consts = structure_constants(pi)
    horizon = ctx.max_degree - 1
    failures = []

    def witness(mat):
        for r_i, row in enumerate(mat):
            for c_i, f in enumerate(row):
                g = f.truncate(horizon)
                if not g.is_zero():
                    return (r_i, c_i, repr(g))
        return None

    # antiholomorphic curvature: square of the dzbar part
    for a in range(k):
        for b in range(a + 1, k):
            cur = _mat_add(
                _mat_sub(
                    _mat_map(theta[b], lambda f, a=a: f.diff_zbar(a)),
                    _mat_map(theta[a], lambda f, b=b: f.diff_zbar(b)),
                ),
                _mat_comm(theta[a], theta[b], ctx),
            )
            w = witness(cur)
            if w:
                failures.append(
                    {"check": "antiholomorphic-square", "indices": (a, b),
                     "witness": w}
                )
    # mixed anticommutator
    for a in range(k):
        for j in range(k, n):
            cur = _mat_add(
                _mat_sub(
                    _mat_map(gamma[j - k], lambda f, a=a: f.diff_zbar(a)),
                    _apply_anchor(anchors[j], theta[a]),
                ),
                _mat_comm(theta[a], gamma[j - k], ctx),
            )
            w = witness(cur)
            if w:
                failures.append(
                    {"check": "mixed-anticommutator", "indices": (a, j),
                     "witness": w}
                )
    # conormal curvature over the bivector
    for i in range(k, n):
        for j in range(i + 1, n):
            cur = _mat_add(
                _mat_sub(
                    _apply_anchor(anchors[i], gamma[j - k]),
                    _apply_anchor(anchors[j], gamma[i - k]),
                ),
                _mat_comm(gamma[i - k], gamma[j - k], ctx),
            )
            for l in range(k, n):
                c = consts[l].get((i, j))
                if c is not None:
                    cur = _mat_sub(
                        cur,
                        _mat_map(gamma[l - k], lambda f, c=c: c * f),
                    )
            w = witness(cur)
            if w:
                failures.append(
                    {"check": "conormal-curvature", "indices": (i, j),
                     "witness": w}
                )
    report = {"ok": not failures, "rank": rank, "failures": failures}
    if failures:
        return None, report
    return (
        BraneConnection(
            rank=rank,
            nabla_prime=theta,
            nabla_doubleprime=gamma,
            pi=pi,
        ),
        report,
    )


def gauge_flat_connection(g, pi: MixedTensor) -> dict:
    """The flat connection with generators g^-1 dzbar_a(g) and
    g^-1 X_j(g): the gauge transform of the trivial one.  g must be a
    square matrix of brane jets with invertible constant part."""
    _check_pi(pi)
    ctx = pi.ctx
    k, n = ctx.k, ctx.n
    rank = len(g)
    g_inv = _jet_matrix_inverse(g, ctx)
    anchors = anchor_fields(pi)
    theta = [
        _jmat_mul(g_inv, _mat_map(g, lambda f, a=a: f.diff_zbar(a)), ctx)
        for a in range(k)
    ]
    gamma = [
        _jmat_mul(g_inv, _apply_anchor(anchors[j], g), ctx)
        for j in range(k, n)
    ]
    return {"rank": rank, "theta": theta, "gamma": gamma}
