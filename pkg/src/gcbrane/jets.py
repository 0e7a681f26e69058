"""Truncated jet calculus for deformations of the standard structure.

Everything here lives on a polydisc in C^n with coordinates z_1..z_n
(0-based in code) and a distinguished complex submanifold
S = {z_i = 0 for i >= k}.  Indices below k are tangent to S, indices
k and above are normal.

A `JetFunction` is a polynomial jet: a finite sum of monomials
z^a zbar^b with Gaussian rational coefficients, truncated at joint
total degree `max_degree`.  All ring operations drop monomials above
the truncation degree.

A `MixedTensor` of bidegree (p, q) collects components of a section of
wedge^q (antiholomorphic cotangent) tensor wedge^p (holomorphic
tangent).  The basis word for a component keyed (alpha, beta) is

    fbar_{beta_1} ^ ... ^ fbar_{beta_q} ^ ebar_{alpha_1} ^ ... ^ ebar_{alpha_p}

with the form block on the left, both index blocks strictly ascending.
Here ebar_i stands for the holomorphic coordinate vector field d/dz_i
and fbar_j for the antiholomorphic coordinate covector dzbar_j; both
are sections of the same odd bundle, so the wedge mixes them with the
usual Koszul signs.

Deformations are triples (e20, e11, e02) of bidegrees (2,0), (1,1),
(0,2).  `mc_residual` computes the obstruction to integrability,
dbar(eps) + (1/2)[eps, eps], split by bidegree.  The bracket and the
residual are only trustworthy one degree below the truncation order,
so both truncate their output at max_degree - 1.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .scalars import QI

DEFAULT_MAX_DEGREE = 8


def default_max_degree() -> int:
    """Truncation degree, overridable via the GCB_MAX_DEGREE env var."""
    raw = os.environ.get("GCB_MAX_DEGREE")
    return int(raw) if raw else DEFAULT_MAX_DEGREE


@dataclass(frozen=True)
class JetContext:
    """Ambient dimension n, brane dimension k, truncation degree, radius.

    r is the polydisc radius used by majorant norms; it is a positive
    rational and defaults to 1/2 so that higher-degree terms weigh less.
    """

    n: int
    k: int
    max_degree: int = None  # type: ignore[assignment]
    r: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.max_degree is None:
            object.__setattr__(self, "max_degree", default_max_degree())
        if not isinstance(self.r, Fraction):
            object.__setattr__(self, "r", Fraction(self.r))
        if not (0 <= self.k <= self.n):
            raise ValueError(f"brane dimension k={self.k} out of range for n={self.n}")
        if self.max_degree < 1:
            raise ValueError("max_degree must be at least 1")
        if self.r <= 0:
            raise ValueError("polydisc radius must be positive")

    def tangent_indices(self):
        return range(self.k)

    def normal_indices(self):
        return range(self.k, self.n)


def _as_qi(c) -> QI:
    if isinstance(c, QI):
        return c
    return QI(c)


class JetFunction:
    """Sparse polynomial jet with QI coefficients, truncated by degree.

    terms: {(a, b): QI} where a and b are length-n exponent tuples for
    z and zbar, a + b summing to at most ctx.max_degree.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: JetContext, terms=None):
        self.ctx = ctx
        self.terms = {}
        if terms:
            N = ctx.max_degree
            for (a, b), c in terms.items():
                c = _as_qi(c)
                if not c:
                    continue
                if sum(a) + sum(b) > N:
                    continue
                self.terms[(a, b)] = c

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def const(cls, ctx, c):
        zero_exp = (0,) * ctx.n
        return cls(ctx, {(zero_exp, zero_exp): _as_qi(c)})

    @classmethod
    def coord(cls, ctx, i):
        """The coordinate function z_i."""
        a = tuple(1 if j == i else 0 for j in range(ctx.n))
        return cls(ctx, {(a, (0,) * ctx.n): QI(1)})

    @classmethod
    def coord_bar(cls, ctx, i):
        """The coordinate function zbar_i."""
        b = tuple(1 if j == i else 0 for j in range(ctx.n))
        return cls(ctx, {((0,) * ctx.n, b): QI(1)})

    @classmethod
    def monomial(cls, ctx, a, b, c=1):
        return cls(ctx, {(tuple(a), tuple(b)): _as_qi(c)})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, JetFunction):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s:
                    out[key] = s
                else:
                    del out[key]
        res = JetFunction(self.ctx)
        res.terms = out
        return res

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        res = JetFunction(self.ctx)
        res.terms = {key: -c for key, c in self.terms.items()}
        return res

    def __mul__(self, other):
        if not isinstance(other, JetFunction):
            return self.scale(other)
        N = self.ctx.max_degree
        out = {}
        for (a1, b1), c1 in self.terms.items():
            d1 = sum(a1) + sum(b1)
            for (a2, b2), c2 in other.terms.items():
                if d1 + sum(a2) + sum(b2) > N:
                    continue
                key = (
                    tuple(x + y for x, y in zip(a1, a2)),
                    tuple(x + y for x, y in zip(b1, b2)),
                )
                c = c1 * c2
                s = out.get(key)
                if s is None:
                    out[key] = c
                else:
                    s = s + c
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        res = JetFunction(self.ctx)
        res.terms = out
        return res

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = _as_qi(c)
        res = JetFunction(self.ctx)
        if c:
            res.terms = {key: v * c for key, v in self.terms.items()}
        return res

    # -- calculus ----------------------------------------------------------

    def diff_z(self, i):
        """d/dz_i."""
        out = {}
        for (a, b), c in self.terms.items():
            e = a[i]
            if e == 0:
                continue
            a2 = a[:i] + (e - 1,) + a[i + 1 :]
            out[(a2, b)] = c * e
        res = JetFunction(self.ctx)
        res.terms = out
        return res

    def diff_zbar(self, i):
        """d/dzbar_i."""
        out = {}
        for (a, b), c in self.terms.items():
            e = b[i]
            if e == 0:
                continue
            b2 = b[:i] + (e - 1,) + b[i + 1 :]
            out[(a, b2)] = c * e
        res = JetFunction(self.ctx)
        res.terms = out
        return res

    def conj(self):
        """Complex conjugate: swaps z and zbar exponents."""
        res = JetFunction(self.ctx)
        res.terms = {(b, a): c.conj() for (a, b), c in self.terms.items()}
        return res

    def restrict_brane(self):
        """Set the normal coordinates z_i, zbar_i (i >= k) to zero."""
        k = self.ctx.k
        out = {}
        for (a, b), c in self.terms.items():
            if any(a[i] or b[i] for i in range(k, self.ctx.n)):
                continue
            out[(a, b)] = c
        res = JetFunction(self.ctx)
        res.terms = out
        return res

    def truncate(self, order):
        res = JetFunction(self.ctx)
        res.terms = {
            key: c for key, c in self.terms.items() if sum(key[0]) + sum(key[1]) <= order
        }
        return res

    # -- queries -----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def constant_term(self) -> QI:
        zero_exp = (0,) * self.ctx.n
        return self.terms.get((zero_exp, zero_exp), QI(0))

    def vanishing_order(self):
        """Smallest total degree with a nonzero coefficient; inf if zero."""
        if not self.terms:
            return math.inf
        return min(sum(a) + sum(b) for a, b in self.terms)

    def majorant(self, r: Fraction) -> Fraction:
        """Sum of |coeff| * r^degree, an exact upper bound on the sup over
        the polydisc of radius r."""
        total = Fraction(0)
        for (a, b), c in self.terms.items():
            total += c.one_norm() * r ** (sum(a) + sum(b))
        return total

    def __eq__(self, other):
        if not isinstance(other, JetFunction):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "JetFunction(0)"
        bits = []
        for (a, b) in sorted(self.terms):
            bits.append(f"{self.terms[(a, b)]!r}*z^{a}*zb^{b}")
        return "JetFunction(" + " + ".join(bits) + ")"


# -- sign bookkeeping for ascending index words --------------------------


def _merge_asc(u, v):
    """Merge two strictly ascending index tuples.

    Returns (sign, merged) for the Koszul sign of sorting u followed by
    v into ascending order, or (0, None) if they share an index.
    """
    i = j = 0
    sign = 1
    out = []
    while i < len(u) and j < len(v):
        if u[i] == v[j]:
            return 0, None
        if u[i] < v[j]:
            out.append(u[i])
            i += 1
        else:
            # v[j] jumps over the remaining entries of u
            if (len(u) - i) % 2:
                sign = -sign
            out.append(v[j])
            j += 1
    out.extend(u[i:])
    out.extend(v[j:])
    return sign, tuple(out)


def _insert_asc(idx, word):
    """Insert one index at the front of an ascending word and re-sort.

    Returns (sign, new_word) or (0, None) on a repeat.
    """
    if idx in word:
        return 0, None
    pos = 0
    while pos < len(word) and word[pos] < idx:
        pos += 1
    sign = -1 if pos % 2 else 1
    return sign, word[:pos] + (idx,) + word[pos:]


def _remove_at(word, pos):
    return word[:pos] + word[pos + 1 :]


class MixedTensor:
    """Bidegree (p, q) tensor: q antiholomorphic form legs, p
    holomorphic vector legs, with JetFunction coefficients.

    comps: {(alpha, beta): JetFunction}, alpha the ascending vector
    indices (length p), beta the ascending form indices (length q).
    The underlying basis word puts the form block first; all signs in
    dbar, wedge, contraction and the bracket refer to positions in that
    word.
    """

    __slots__ = ("ctx", "p", "q", "comps")

    def __init__(self, ctx, p, q, comps=None):
        self.ctx = ctx
        self.p = p
        self.q = q
        self.comps = {}
        if comps:
            for (alpha, beta), f in comps.items():
                self._add_term(tuple(alpha), tuple(beta), f)

    @classmethod
    def zero(cls, ctx, p, q):
        return cls(ctx, p, q)

    def _add_term(self, alpha, beta, f):
        if f.is_zero():
            return
        if len(alpha) != self.p or len(beta) != self.q:
            raise ValueError(
                f"component ({alpha}, {beta}) does not match bidegree ({self.p}, {self.q})"
            )
        key = (alpha, beta)
        g = self.comps.get(key)
        if g is None:
            self.comps[key] = f
        else:
            g = g + f
            if g.is_zero():
                del self.comps[key]
            else:
                self.comps[key] = g

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MixedTensor):
            return NotImplemented
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError("bidegree mismatch in tensor sum")
        res = MixedTensor(self.ctx, self.p, self.q)
        res.comps = dict(self.comps)
        for key, f in other.comps.items():
            res._add_term(key[0], key[1], f)
        return res

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        res = MixedTensor(self.ctx, self.p, self.q)
        res.comps = {key: -f for key, f in self.comps.items()}
        return res

    def scale(self, c):
        c = _as_qi(c)
        res = MixedTensor(self.ctx, self.p, self.q)
        if c:
            res.comps = {key: f.scale(c) for key, f in self.comps.items()}
        return res

    def __rmul__(self, c):
        return self.scale(c)

    def scale_coeffs(self, fn):
        """Apply fn to every coefficient jet; drops components that die."""
        res = MixedTensor(self.ctx, self.p, self.q)
        for (alpha, beta), f in self.comps.items():
            res._add_term(alpha, beta, fn(f))
        return res

    # -- queries --------------------------------------------------------------

    def get(self, alpha, beta):
        return self.comps.get((tuple(alpha), tuple(beta)), JetFunction.zero(self.ctx))

    def is_zero(self):
        return not self.comps

    def truncate(self, order):
        return self.scale_coeffs(lambda f: f.truncate(order))

    def restrict_brane(self):
        return self.scale_coeffs(lambda f: f.restrict_brane())

    def vanishing_order(self):
        if not self.comps:
            return math.inf
        return min(f.vanishing_order() for f in self.comps.values())

    def majorant(self, r: Fraction) -> Fraction:
        return sum((f.majorant(r) for f in self.comps.values()), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, MixedTensor):
            return NotImplemented
        return (self.p, self.q) == (other.p, other.q) and self.comps == other.comps

    def __repr__(self):
        if not self.comps:
            return f"MixedTensor({self.p},{self.q}; 0)"
        keys = ", ".join(str(key) for key in sorted(self.comps))
        return f"MixedTensor({self.p},{self.q}; {keys})"

    # -- operations -------------------------------------------------------------

    def dbar(self):
        """Antiholomorphic differential: wedge dzbar_j into the form
        block from the left, coefficientwise d/dzbar_j."""
        res = MixedTensor(self.ctx, self.p, self.q + 1)
        for (alpha, beta), f in self.comps.items():
            for j in range(self.ctx.n):
                df = f.diff_zbar(j)
                if df.is_zero():
                    continue
                sign, beta2 = _insert_asc(j, beta)
                if sign == 0:
                    continue
                res._add_term(alpha, beta2, df.scale(sign) if sign < 0 else df)
        return res

    def contract_form(self, j):
        """Pair the vector e_j against the form legs (kills fbar_j)."""
        res = MixedTensor(self.ctx, self.p, self.q - 1) if self.q else None
        if res is None:
            return MixedTensor(self.ctx, self.p, 0)
        for (alpha, beta), f in self.comps.items():
            if j not in beta:
                continue
            pos = beta.index(j)
            sign = -1 if pos % 2 else 1
            res._add_term(alpha, _remove_at(beta, pos), f.scale(sign) if sign < 0 else f)
        return res

    def contract_vector(self, i):
        """Pair the covector f_i against the vector legs (kills ebar_i).
        Positions count through the form block first."""
        if self.p == 0:
            return MixedTensor(self.ctx, 0, self.q)
        res = MixedTensor(self.ctx, self.p - 1, self.q)
        for (alpha, beta), f in self.comps.items():
            if i not in alpha:
                continue
            pos = alpha.index(i)
            sign = -1 if (self.q + pos) % 2 else 1
            res._add_term(_remove_at(alpha, pos), beta, f.scale(sign) if sign < 0 else f)
        return res


def wedge(A: MixedTensor, B: MixedTensor) -> MixedTensor:
    """Wedge product of mixed tensors in the form-block-first convention."""
    ctx = A.ctx
    res = MixedTensor(ctx, A.p + B.p, A.q + B.q)
    swap = (A.p * B.q) % 2  # B's form block crosses A's vector block
    for (a1, b1), f1 in A.comps.items():
        for (a2, b2), f2 in B.comps.items():
            sb, beta = _merge_asc(b1, b2)
            if sb == 0:
                continue
            sa, alpha = _merge_asc(a1, a2)
            if sa == 0:
                continue
            sign = -sb * sa if swap else sb * sa
            f = f1 * f2
            if f.is_zero():
                continue
            res._add_term(alpha, beta, f.scale(sign) if sign < 0 else f)
    return res


def dbar(T: MixedTensor) -> MixedTensor:
    return T.dbar()


def schouten_bracket(A: MixedTensor, B: MixedTensor, order=None) -> MixedTensor:
    """Graded bracket extending the Lie bracket of vector fields.

    On generators: [X, Y] is the Lie bracket, [X, eta] the holomorphic
    Lie derivative of an antiholomorphic form along X (only the
    coefficient is differentiated), [eta, xi] = 0.  Extended as a
    biderivation with Koszul signs for total degree minus one.

    Output coefficients are truncated at max_degree - 1 (or `order`).
    """
    ctx = A.ctx
    if order is None:
        order = ctx.max_degree - 1
    a = A.p + A.q
    b = B.p + B.q
    p_out = A.p + B.p - 1
    res = MixedTensor(ctx, max(p_out, 0), A.q + B.q)
    if p_out < 0:
        return res

    def accumulate(T1, T2, outer_sign):
        # sum_i (left derivative of T1 by ebar_i) wedge (d/dz_i T2)
        for (a1, b1), f1 in T1.comps.items():
            q1 = len(b1)
            p1 = len(a1)
            for t, i in enumerate(a1):
                # ebar_i sits at word position q1 + t (0-based)
                s_pos = -1 if (q1 + t) % 2 else 1
                a1r = _remove_at(a1, t)
                for (a2, b2), f2 in T2.comps.items():
                    df2 = f2.diff_z(i)
                    if df2.is_zero():
                        continue
                    sb, beta = _merge_asc(b1, b2)
                    if sb == 0:
                        continue
                    sa, alpha = _merge_asc(a1r, a2)
                    if sa == 0:
                        continue
                    swap = -1 if ((p1 - 1) * len(b2)) % 2 else 1
                    sign = outer_sign * s_pos * sb * sa * swap
                    f = (f1 * df2).truncate(order)
                    if f.is_zero():
                        continue
                    res._add_term(alpha, beta, f.scale(sign) if sign < 0 else f)

    # [A,B] = sum_i (-1)^(a-1) (dA/debar_i) ^ (D_i B) - (D_i A) ^ (dB/debar_i),
    # the second term rewritten with the B factor on the left.
    accumulate(A, B, -1 if (a - 1) % 2 else 1)
    accumulate(B, A, -1 if (a * (b - 1)) % 2 == 0 else 1)
    return res.truncate(order)


# -- deformations ---------------------------------------------------------------


@dataclass
class Deformation:
    """Triple (e20, e11, e02): bivector, mixed, and form parts."""

    e20: MixedTensor
    e11: MixedTensor
    e02: MixedTensor

    def __post_init__(self):
        if (self.e20.p, self.e20.q) != (2, 0):
            raise ValueError("e20 must have bidegree (2,0)")
        if (self.e11.p, self.e11.q) != (1, 1):
            raise ValueError("e11 must have bidegree (1,1)")
        if (self.e02.p, self.e02.q) != (0, 2):
            raise ValueError("e02 must have bidegree (0,2)")

    @property
    def ctx(self):
        return self.e20.ctx

    @classmethod
    def zero(cls, ctx):
        return cls(
            MixedTensor.zero(ctx, 2, 0),
            MixedTensor.zero(ctx, 1, 1),
            MixedTensor.zero(ctx, 0, 2),
        )

    @classmethod
    def from_poisson(cls, pi: MixedTensor):
        ctx = pi.ctx
        return cls(pi, MixedTensor.zero(ctx, 1, 1), MixedTensor.zero(ctx, 0, 2))

    def parts(self):
        return (self.e20, self.e11, self.e02)

    def __add__(self, other):
        return Deformation(
            self.e20 + other.e20, self.e11 + other.e11, self.e02 + other.e02
        )

    def __sub__(self, other):
        return Deformation(
            self.e20 - other.e20, self.e11 - other.e11, self.e02 - other.e02
        )

    def __neg__(self):
        return Deformation(-self.e20, -self.e11, -self.e02)

    def scale(self, c):
        return Deformation(self.e20.scale(c), self.e11.scale(c), self.e02.scale(c))

    def truncate(self, order):
        return Deformation(
            self.e20.truncate(order), self.e11.truncate(order), self.e02.truncate(order)
        )

    def is_zero(self):
        return self.e20.is_zero() and self.e11.is_zero() and self.e02.is_zero()

    def vanishing_order(self):
        return min(p.vanishing_order() for p in self.parts())

    def majorant(self, r: Fraction) -> Fraction:
        return sum((p.majorant(r) for p in self.parts()), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Deformation):
            return NotImplemented
        return (
            self.e20 == other.e20 and self.e11 == other.e11 and self.e02 == other.e02
        )


@dataclass
class MCResidual:
    """Integrability defect of a deformation, split by bidegree."""

    p30: MixedTensor
    p21: MixedTensor
    p12: MixedTensor
    p03: MixedTensor

    @property
    def ctx(self):
        return self.p30.ctx

    def parts(self):
        return (self.p30, self.p21, self.p12, self.p03)

    def is_zero(self):
        return all(p.is_zero() for p in self.parts())

    def vanishing_order(self):
        return min(p.vanishing_order() for p in self.parts())

    def majorant(self, r: Fraction) -> Fraction:
        return sum((p.majorant(r) for p in self.parts()), Fraction(0))


def mc_residual(eps: Deformation, order=None) -> MCResidual:
    """dbar(eps) + (1/2)[eps, eps], by bidegree.

    Trustworthy only to degree max_degree - 1; all parts are truncated
    there (or at `order`).
    """
    ctx = eps.ctx
    if order is None:
        order = ctx.max_degree - 1
    half = QI(Fraction(1, 2))
    e20, e11, e02 = eps.parts()
    p30 = schouten_bracket(e20, e20, order).scale(half)
    p21 = e20.dbar() + schouten_bracket(e20, e11, order)
    p12 = (
        e11.dbar()
        + schouten_bracket(e20, e02, order)
        + schouten_bracket(e11, e11, order).scale(half)
    )
    p03 = e02.dbar() + schouten_bracket(e11, e02, order)
    return MCResidual(
        p30.truncate(order),
        p21.truncate(order),
        p12.truncate(order),
        p03.truncate(order),
    )


def majorant_norm(obj, r=None) -> Fraction:
    """Exact majorant bound for a jet, tensor, deformation or residual.

    r defaults to the context radius and must not exceed it: the bound
    is only meaningful on the polydisc the jets are truncated for.
    """
    ctx = obj.ctx
    if r is None:
        r = ctx.r
    r = Fraction(r)
    if r <= 0 or r > ctx.r:
        raise ValueError(f"norm radius {r} outside (0, {ctx.r}]")
    return obj.majorant(r)


def vanishing_order(obj):
    return obj.vanishing_order()


def brane_compat_check(eps: Deformation) -> dict:
    """Check that a deformation is compatible with the brane S.

    Three conditions, all evaluated after restriction to S:
      - the bivector part must be coisotropic along S: components with
        both vector legs normal vanish on S;
      - the mixed part must not push tangential form legs onto normal
        vector legs: components with a normal vector leg and a
        tangential form leg vanish on S;
      - the pullback of the form part to S vanishes: components with
        both form legs tangential vanish on S.
    """
    k = eps.ctx.k
    violations = []

    def bad(T, name, predicate):
        found = []
        for (alpha, beta), f in T.comps.items():
            if predicate(alpha, beta) and not f.restrict_brane().is_zero():
                found.append((name, alpha, beta))
        return found

    v_pi = bad(eps.e20, "e20", lambda a, b: a[0] >= k and a[1] >= k)
    v_mx = bad(eps.e11, "e11", lambda a, b: a[0] >= k and b[0] < k)
    v_fm = bad(eps.e02, "e02", lambda a, b: b[0] < k and b[1] < k)
    violations = v_pi + v_mx + v_fm
    return {
        "poisson_coisotropic": not v_pi,
        "mixed_ok": not v_mx,
        "form_pullback_zero": not v_fm,
        "compatible": not violations,
        "violations": violations,
    }
