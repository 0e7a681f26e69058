"""Calculus on the polydisc in real coordinates, complexified.

Vectors and forms carry both holomorphic and antiholomorphic legs.  A
leg is a letter (bar, i): for vectors (0, i) is d/dz_i and (1, i) is
d/dzbar_i, for forms (0, i) is dz_i and (1, i) is dzbar_i.  Coeffs are
JetFunctions, so everything is exact and truncated by total degree.

Real objects are the conjugation-invariant ones; reality is checked,
never assumed.  `JetMap` is a polynomial coordinate map with exact
substitution, composition, and (for maps fixing the origin with an
invertible linear part) compositional inversion.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QI
from .jets import JetContext, JetFunction, _insert_asc, _merge_asc, _remove_at
from . import linalg as la


def _letters(ctx):
    return [(c, i) for c in (0, 1) for i in range(ctx.n)]


def _diff(f: JetFunction, letter):
    return f.diff_z(letter[1]) if letter[0] == 0 else f.diff_zbar(letter[1])


def _sort_letters(seq):
    """Insertion-sort a letter word, tracking the Koszul sign."""
    word = list(seq)
    sign = 1
    for i in range(1, len(word)):
        j = i
        while j > 0 and word[j - 1] > word[j]:
            word[j - 1], word[j] = word[j], word[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(word, word[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(word)


class RealVector:
    """Complexified vector field: components over letters (bar, i)."""

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx: JetContext, comps=None):
        self.ctx = ctx
        self.comps = {}
        if comps:
            for letter, f in comps.items():
                if not f.is_zero():
                    self.comps[letter] = f

    def get(self, letter) -> JetFunction:
        return self.comps.get(letter, JetFunction.zero(self.ctx))

    def is_zero(self):
        return not self.comps

    def __add__(self, other):
        out = dict(self.comps)
        for letter, f in other.comps.items():
            g = out.get(letter)
            out[letter] = f if g is None else g + f
        return RealVector(self.ctx, out)

    def __sub__(self, other):
        return self + other.scale(QI(-1))

    def scale(self, c):
        return RealVector(self.ctx, {l: f.scale(c) for l, f in self.comps.items()})

    def conj(self):
        return RealVector(
            self.ctx, {(1 - c, i): f.conj() for (c, i), f in self.comps.items()}
        )

    def is_real(self):
        return self.conj() == self

    def apply(self, f: JetFunction) -> JetFunction:
        """Act as a derivation."""
        out = JetFunction.zero(self.ctx)
        for letter, g in self.comps.items():
            out = out + g * _diff(f, letter)
        return out

    def vanishing_order(self):
        return min(
            (f.vanishing_order() for f in self.comps.values()), default=float("inf")
        )

    def __eq__(self, other):
        if not isinstance(other, RealVector):
            return NotImplemented
        return self.comps == other.comps

    def __repr__(self):
        return f"RealVector({self.comps!r})"


def lie_bracket(X: RealVector, Y: RealVector) -> RealVector:
    """[X, Y] componentwise: X(Y^l) - Y(X^l)."""
    out = {}
    for letter in set(X.comps) | set(Y.comps):
        f = X.apply(Y.get(letter)) - Y.apply(X.get(letter))
        if not f.is_zero():
            out[letter] = f
    return RealVector(X.ctx, out)


class RealForm:
    """Differential form of fixed degree with letter-word keys."""

    __slots__ = ("ctx", "degree", "comps")

    def __init__(self, ctx: JetContext, degree: int, comps=None):
        self.ctx = ctx
        self.degree = degree
        self.comps = {}
        if comps:
            for word, f in comps.items():
                self._add_term(word, f)

    def _add_term(self, word, f: JetFunction):
        if len(word) != self.degree:
            raise ValueError("degree mismatch in form term")
        if f.is_zero():
            return
        g = self.comps.get(word)
        h = f if g is None else g + f
        if h.is_zero():
            self.comps.pop(word, None)
        else:
            self.comps[word] = h

    @classmethod
    def zero(cls, ctx, degree):
        return cls(ctx, degree)

    def get(self, word) -> JetFunction:
        return self.comps.get(word, JetFunction.zero(self.ctx))

    def is_zero(self):
        return not self.comps

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        out = RealForm(self.ctx, self.degree, dict(self.comps))
        for word, f in other.comps.items():
            out._add_term(word, f)
        return out

    def __sub__(self, other):
        return self + other.scale(QI(-1))

    def scale(self, c):
        return RealForm(
            self.ctx, self.degree, {w: f.scale(c) for w, f in self.comps.items()}
        )

    def conj(self):
        out = RealForm(self.ctx, self.degree)
        for word, f in self.comps.items():
            sign, new_word = _sort_letters([(1 - c, i) for (c, i) in word])
            g = f.conj()
            out._add_term(new_word, g.scale(sign) if sign < 0 else g)
        return out

    def is_real(self):
        return self.conj() == self

    def vanishing_order(self):
        return min(
            (f.vanishing_order() for f in self.comps.values()), default=float("inf")
        )

    def truncate(self, order):
        return RealForm(
            self.ctx, self.degree, {w: f.truncate(order) for w, f in self.comps.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, RealForm):
            return NotImplemented
        return self.degree == other.degree and self.comps == other.comps

    def __repr__(self):
        return f"RealForm(deg={self.degree}, {self.comps!r})"


def form_wedge(A: RealForm, B: RealForm) -> RealForm:
    out = RealForm(A.ctx, A.degree + B.degree)
    for wa, fa in A.comps.items():
        for wb, fb in B.comps.items():
            sign, word = _merge_asc(wa, wb)
            if sign == 0:
                continue
            f = fa * fb
            out._add_term(word, f.scale(sign) if sign < 0 else f)
    return out


def exterior_d(A: RealForm) -> RealForm:
    out = RealForm(A.ctx, A.degree + 1)
    for word, f in A.comps.items():
        for letter in _letters(A.ctx):
            df = _diff(f, letter)
            if df.is_zero():
                continue
            sign, new_word = _insert_asc(letter, word)
            if sign == 0:
                continue
            out._add_term(new_word, df.scale(sign) if sign < 0 else df)
    return out


def contract(X: RealVector, A: RealForm) -> RealForm:
    """Interior product; pairs vector letter (c,i) with form letter (c,i)."""
    out = RealForm(A.ctx, A.degree - 1)
    for word, f in A.comps.items():
        for t, letter in enumerate(word):
            g = X.get(letter)
            if g.is_zero():
                continue
            h = g * f
            if t % 2:
                h = h.scale(QI(-1))
            out._add_term(_remove_at(word, t), h)
    return out


def lie_derivative(X: RealVector, A: RealForm) -> RealForm:
    """Cartan formula: L_X = d(i_X A) + i_X(dA)."""
    return exterior_d(contract(X, A)) + contract(X, exterior_d(A))


# -- polynomial coordinate maps ---------------------------------------------


class JetMap:
    """Polynomial map of the polydisc: z_i -> zim[i], zbar_i -> zbim[i].

    For an honest (real) map the zbar images are the conjugates of the
    z images; this is not enforced, so complexified gadgets can reuse
    the machinery, but `is_real` reports it.
    """

    __slots__ = ("ctx", "zim", "zbim", "_powers")

    def __init__(self, ctx: JetContext, zim, zbim):
        if len(zim) != ctx.n or len(zbim) != ctx.n:
            raise ValueError("need one image per coordinate")
        self.ctx = ctx
        self.zim = list(zim)
        self.zbim = list(zbim)
        self._powers = {}

    @classmethod
    def identity(cls, ctx: JetContext):
        zim = [JetFunction.coord(ctx, i) for i in range(ctx.n)]
        zbim = [JetFunction.coord_bar(ctx, i) for i in range(ctx.n)]
        return cls(ctx, zim, zbim)

    def is_identity(self):
        return self == JetMap.identity(self.ctx)

    def is_real(self):
        return all(
            self.zbim[i] == self.zim[i].conj() for i in range(self.ctx.n)
        )

    def _power(self, which, i, e):
        key = (which, i, e)
        got = self._powers.get(key)
        if got is not None:
            return got
        if e == 0:
            out = JetFunction.const(self.ctx, 1)
        else:
            base = self.zim[i] if which == 0 else self.zbim[i]
            out = self._power(which, i, e - 1) * base
        self._powers[key] = out
        return out

    def substitute(self, f: JetFunction) -> JetFunction:
        """f composed with this map (evaluate f at the images)."""
        out = JetFunction.zero(self.ctx)
        for (a, b), c in f.terms.items():
            term = JetFunction.const(self.ctx, c)
            for i, e in enumerate(a):
                if e:
                    term = term * self._power(0, i, e)
            for i, e in enumerate(b):
                if e:
                    term = term * self._power(1, i, e)
            out = out + term
        return out

    def compose(self, inner: "JetMap") -> "JetMap":
        """self after inner: z -> self(inner(z))."""
        zim = [inner.substitute(f) for f in self.zim]
        zbim = [inner.substitute(f) for f in self.zbim]
        return JetMap(self.ctx, zim, zbim)

    def linear_part(self):
        """2n x 2n QI matrix over letters (0,0..n-1, 1,0..n-1)."""
        n = self.ctx.n
        rows = []
        for which in (0, 1):
            images = self.zim if which == 0 else self.zbim
            for i in range(n):
                f = images[i]
                row = []
                for c in (0, 1):
                    for j in range(n):
                        a = tuple(1 if t == j and c == 0 else 0 for t in range(n))
                        b = tuple(1 if t == j and c == 1 else 0 for t in range(n))
                        row.append(f.terms.get((a, b), QI(0)))
                rows.append(row)
        return rows

    def constant_part(self):
        return [f.constant_term() for f in self.zim] + [
            f.constant_term() for f in self.zbim
        ]

    def invert(self) -> "JetMap":
        """Compositional inverse, for maps fixing 0 with invertible
        linear part.  Degree-by-degree fixpoint iteration."""
        ctx = self.ctx
        if any(c != QI(0) for c in self.constant_part()):
            raise ValueError("can only invert maps fixing the origin")
        A = self.linear_part()
        A_inv = la.inverse(A)
        n = ctx.n

        def apply_linear(M, funcs):
            out = []
            for row in M:
                f = JetFunction.zero(ctx)
                for coef, g in zip(row, funcs):
                    if coef != QI(0):
                        f = f + g.scale(coef)
                out.append(f)
            return out

        ident = [JetFunction.coord(ctx, i) for i in range(n)] + [
            JetFunction.coord_bar(ctx, i) for i in range(n)
        ]
        lin_images = apply_linear(A, ident)
        tail = [
            f - g for f, g in zip(self.zim + self.zbim, lin_images)
        ]  # order >= 2
        psi = apply_linear(A_inv, ident)
        for _ in range(ctx.max_degree):
            psi_map = JetMap(ctx, psi[:n], psi[n:])
            corrected = [
                i_f - psi_map.substitute(t) for i_f, t in zip(ident, tail)
            ]
            new_psi = apply_linear(A_inv, corrected)
            if new_psi == psi:
                break
            psi = new_psi
        return JetMap(ctx, psi[:n], psi[n:])

    def __eq__(self, other):
        if not isinstance(other, JetMap):
            return NotImplemented
        return self.zim == other.zim and self.zbim == other.zbim

    def __repr__(self):
        return f"JetMap(zim={self.zim!r})"


def pullback(phi: JetMap, A: RealForm) -> RealForm:
    """phi^* A: substitute coefficients and push letters through the
    differentials of the coordinate images."""
    ctx = A.ctx
    diffs = {}
    for c in (0, 1):
        for i in range(ctx.n):
            img = phi.zim[i] if c == 0 else phi.zbim[i]
            comps = {}
            for letter in _letters(ctx):
                d = _diff(img, letter)
                if not d.is_zero():
                    comps[(letter,)] = d
            diffs[(c, i)] = RealForm(ctx, 1, comps)
    out = RealForm(ctx, A.degree)
    for word, f in A.comps.items():
        term = RealForm(ctx, 0, {(): phi.substitute(f)})
        for letter in word:
            term = form_wedge(term, diffs[letter])
        out = out + term
    return out


def pushforward_vector(phi: JetMap, phi_inv: JetMap, X: RealVector) -> RealVector:
    """phi_* X: apply the Jacobian and move base points with phi_inv."""
    ctx = X.ctx
    comps = {}
    for c in (0, 1):
        for i in range(ctx.n):
            img = phi.zim[i] if c == 0 else phi.zbim[i]
            f = X.apply(img)
            if not f.is_zero():
                comps[(c, i)] = phi_inv.substitute(f)
    return RealVector(ctx, comps)


def form_restricts_to_brane_tangent(B: RealForm) -> bool:
    """Whether the pullback of the form to S vanishes: no component
    with all legs tangential survives restriction to S."""
    k = B.ctx.k
    for word, f in B.comps.items():
        if all(i < k for (_, i) in word):
            if not f.restrict_brane().is_zero():
                return False
    return True


def map_preserves_brane_ideal(phi: JetMap) -> bool:
    """Whether every normal-coordinate image lies in the ideal of S."""
    k = phi.ctx.k
    for i in range(k, phi.ctx.n):
        if not phi.zim[i].restrict_brane().is_zero():
            return False
        if not phi.zbim[i].restrict_brane().is_zero():
            return False
    return True
