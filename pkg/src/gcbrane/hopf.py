"""Exact checks for a nonstandard generalized complex structure on the
Hopf surface and its family of two-sphere branes.

Scalars are rational functions of the coordinates x1, x2 and their
conjugates xb1, xb2, with denominators restricted to monomials times
powers of the radius polynomial r2 = x1*xb1 + x2*xb2.  Logarithms and
the radius R itself never appear; they enter only through logarithmic
differentials, which are rational.  Every identity here is decided
exactly, with no tolerances.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg as la
from .errors import PreconditionError
from .scalars import QI

# Generator order: 0 = x1, 1 = xb1, 2 = x2, 3 = xb2.  A numerator is a
# dict monomial-exponent-tuple -> QI; a denominator is the exponent
# tuple (r2, x1, xb1, x2, xb2).
_R2_POLY = {(1, 1, 0, 0): QI(1), (0, 0, 1, 1): QI(1)}
_R2_DIFF = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
_CONJ_GEN = (1, 0, 3, 2)
_GEN_NAMES = ("x1", "xb1", "x2", "xb2")


def _poly_add(p, q):
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, QI(0)) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _poly_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = out.get(m, QI(0)) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _poly_scale(p, c):
    if not c:
        return {}
    return {m: x * c for m, x in p.items()}


def _poly_diff(p, j):
    out = {}
    for m, c in p.items():
        if m[j]:
            dm = m[:j] + (m[j] - 1,) + m[j + 1 :]
            s = out.get(dm, QI(0)) + c * m[j]
            if s:
                out[dm] = s
            else:
                out.pop(dm, None)
    return out


def _poly_div_r2(p):
    """Exact quotient p / r2, or None when r2 does not divide p.

    Division tracks the lex-leading monomial; r2's leading term is
    x1*xb1, so failure at the leading step certifies indivisibility.
    """
    rem = dict(p)
    quot = {}
    while rem:
        m = max(rem)
        c = rem.pop(m)
        if m[0] < 1 or m[1] < 1:
            return None
        qm = (m[0] - 1, m[1] - 1, m[2], m[3])
        quot[qm] = quot.get(qm, QI(0)) + c
        tail = (qm[0], qm[1], qm[2] + 1, qm[3] + 1)
        s = rem.get(tail, QI(0)) - c
        if s:
            rem[tail] = s
        else:
            rem.pop(tail, None)
    return {m: c for m, c in quot.items() if c}


def _reduce(num, den):
    num = {m: c for m, c in num.items() if c}
    if not num:
        return {}, (0, 0, 0, 0, 0)
    r2 = den[0]
    dx = list(den[1:])
    for i in range(4):
        if dx[i]:
            g = min(min(m[i] for m in num), dx[i])
            if g:
                dx[i] -= g
                num = {m[:i] + (m[i] - g,) + m[i + 1 :]: c for m, c in num.items()}
    while r2:
        q = _poly_div_r2(num)
        if q is None:
            break
        num = q
        r2 -= 1
    return num, (r2, dx[0], dx[1], dx[2], dx[3])


def _as_qi(c):
    if isinstance(c, QI):
        return c
    return QI(c)


class HopfScalar:
    """A rational function with denominator limited to r2 and coordinate
    powers.  The representation is canonical: shared coordinate factors
    and exact r2 factors are always cancelled, so zero testing is a dict
    emptiness check."""

    __slots__ = ("num", "den")

    def __init__(self, num=None, den=(0, 0, 0, 0, 0)):
        num = {} if num is None else {m: _as_qi(c) for m, c in num.items()}
        self.num, self.den = _reduce(num, tuple(den))

    @classmethod
    def const(cls, c):
        return cls({(0, 0, 0, 0): _as_qi(c)})

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def one(cls):
        return cls.const(1)

    @classmethod
    def coord(cls, j):
        m = [0, 0, 0, 0]
        m[j] = 1
        return cls({tuple(m): QI(1)})

    @classmethod
    def r2(cls):
        return cls(dict(_R2_POLY))

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if not isinstance(other, HopfScalar):
            return NotImplemented
        return (self - other).is_zero()

    def _lift_num(self, target_den):
        """Numerator rewritten over the common denominator target_den."""
        num = self.num
        extra_r2 = target_den[0] - self.den[0]
        for _ in range(extra_r2):
            num = _poly_mul(num, _R2_POLY)
        shift = tuple(t - s for t, s in zip(target_den[1:], self.den[1:]))
        if any(shift):
            num = {tuple(a + b for a, b in zip(m, shift)): c for m, c in num.items()}
        return num

    def __add__(self, other):
        if not isinstance(other, HopfScalar):
            return NotImplemented
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return HopfScalar(_poly_add(self._lift_num(den), other._lift_num(den)), den)

    def __neg__(self):
        out = HopfScalar.__new__(HopfScalar)
        out.num = {m: -c for m, c in self.num.items()}
        out.den = self.den
        return out

    def __sub__(self, other):
        if not isinstance(other, HopfScalar):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            out = HopfScalar.__new__(HopfScalar)
            c = _as_qi(other)
            if not c:
                return HopfScalar.zero()
            out.num = {m: x * c for m, x in self.num.items()}
            out.den = self.den
            return out
        if not isinstance(other, HopfScalar):
            return NotImplemented
        den = tuple(a + b for a, b in zip(self.den, other.den))
        return HopfScalar(_poly_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def inverse(self):
        """Reciprocal, defined only when the numerator is a monomial
        times a power of r2; anything else has no representation with
        the restricted denominators."""
        num = self.num
        if not num:
            raise ZeroDivisionError("inverse of zero")
        r2_pow = 0
        while True:
            q = _poly_div_r2(num)
            if q is None:
                break
            num = q
            r2_pow += 1
        if len(num) != 1:
            raise ValueError(
                "cannot invert: numerator is not a monomial times a power of r2"
            )
        (mono, coeff), = num.items()
        inv_num = dict(_R2_POLY) if self.den[0] else {(0, 0, 0, 0): QI(1)}
        for _ in range(self.den[0] - 1):
            inv_num = _poly_mul(inv_num, _R2_POLY)
        shift = self.den[1:]
        inv_num = {
            tuple(a + b for a, b in zip(m, shift)): c / coeff
            for m, c in inv_num.items()
        }
        return HopfScalar(inv_num, (r2_pow,) + mono)

    def __truediv__(self, other):
        if isinstance(other, (QI, int, Fraction)):
            c = _as_qi(other)
            return self * (QI(1) / c)
        if not isinstance(other, HopfScalar):
            return NotImplemented
        return self * other.inverse()

    def conj(self):
        num = {
            (m[1], m[0], m[3], m[2]): c.conj() for m, c in self.num.items()
        }
        d = self.den
        return HopfScalar(num, (d[0], d[2], d[1], d[4], d[3]))

    def zsub(self):
        """Substitution x -> 2x (and conjugates), exactly."""
        down = Fraction(1, 2 ** (2 * self.den[0] + sum(self.den[1:])))
        num = {m: c * (2 ** sum(m)) * down for m, c in self.num.items()}
        return HopfScalar(num, self.den)

    def evaluate(self, vals, i_val):
        """Value at a point; vals are the four coordinate values in any
        exact field containing them and i_val is sqrt(-1) there."""
        one = -(i_val * i_val)
        zero = one - one

        def _qival(c):
            return one * c.re + i_val * c.im

        def _mono(m):
            v = one
            for x, e in zip(vals, m):
                for _ in range(e):
                    v = v * x
            return v

        total = zero
        for m, c in self.num.items():
            total = total + _qival(c) * _mono(m)
        r2v = vals[0] * vals[1] + vals[2] * vals[3]
        denv = one
        for _ in range(self.den[0]):
            denv = denv * r2v
        for x, e in zip(vals, self.den[1:]):
            for _ in range(e):
                denv = denv * x
        return total / denv

    def __repr__(self):
        if not self.num:
            return "0"
        parts = []
        for m in sorted(self.num):
            c = self.num[m]
            factors = [repr(c)]
            for name, e in zip(_GEN_NAMES, m):
                if e:
                    factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        s = " + ".join(parts)
        if any(self.den):
            dfac = []
            for name, e in zip(("r2",) + _GEN_NAMES, self.den):
                if e:
                    dfac.append(name if e == 1 else f"{name}^{e}")
            s = f"({s})/({'*'.join(dfac)})"
        return s


def _merge_word(w1, w2):
    """Concatenate two ascending generator words with wedge parity.
    Returns (word, sign), or (None, 0) when a generator repeats."""
    word = list(w1)
    sign = 1
    for g in w2:
        pos = len(word)
        for idx, h in enumerate(word):
            if g == h:
                return None, 0
            if g < h:
                pos = idx
                break
        if (len(word) - pos) % 2:
            sign = -sign
        word.insert(pos, g)
    return tuple(word), sign


class HopfForm:
    """Exterior-algebra element in dx1, dxb1, dx2, dxb2 over HopfScalar.
    Terms are keyed by ascending generator words."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    self.terms[w] = c

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def gen(cls, j):
        return cls({(j,): HopfScalar.one()})

    @classmethod
    def from_scalar(cls, s):
        return cls({(): s})

    def _accum(self, out, w, c):
        s = out.get(w, HopfScalar.zero()) + c
        if s.is_zero():
            out.pop(w, None)
        else:
            out[w] = s

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            self._accum(out, w, c)
        return HopfForm(out)

    def __neg__(self):
        return HopfForm({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        if isinstance(s, (QI, int, Fraction)):
            s = HopfScalar.const(s)
        return HopfForm({w: c * s for w, c in self.terms.items()})

    def wedge(self, other):
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w, sign = _merge_word(w1, w2)
                if w is None:
                    continue
                self._accum(out, w, c1 * c2 * sign)
        return HopfForm(out)

    def conj(self):
        out = {}
        for w, c in self.terms.items():
            mapped, sign = _merge_word((), tuple(_CONJ_GEN[g] for g in w))
            self._accum(out, mapped, c.conj() * sign)
        return HopfForm(out)

    def zsub(self):
        return HopfForm({w: c.zsub() * (2 ** len(w)) for w, c in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, HopfForm):
            return NotImplemented
        return (self - other).is_zero()

    def coefficient(self, word):
        return self.terms.get(tuple(word), HopfScalar.zero())

    def words(self):
        return sorted(self.terms)

    def first_nonzero(self):
        """Deterministic witness: the least word carrying a nonzero
        coefficient, with that coefficient's repr."""
        if not self.terms:
            return None
        w = min(self.terms)
        names = "^".join("d" + _GEN_NAMES[g] for g in w) if w else "1"
        return (names, repr(self.terms[w]))

    def __repr__(self):
        if not self.terms:
            return "HopfForm(0)"
        bits = []
        for w in sorted(self.terms):
            names = "^".join("d" + _GEN_NAMES[g] for g in w) if w else "1"
            bits.append(f"({self.terms[w]!r}) {names}")
        return "HopfForm(" + " + ".join(bits) + ")"


def _scalar_d(c):
    """Partial derivatives of a scalar, one per generator, using the
    quotient rule with the r2 chain factor."""
    r2_pow = c.den[0]
    out = []
    for j in range(4):
        t = HopfScalar(_poly_diff(c.num, j), c.den)
        if r2_pow:
            t = t - c * HopfScalar({_R2_DIFF[j]: QI(r2_pow)}, (1, 0, 0, 0, 0))
        dj = c.den[1 + j]
        if dj:
            den = [0, 0, 0, 0, 0]
            den[1 + j] = 1
            t = t - c * HopfScalar({(0, 0, 0, 0): QI(dj)}, tuple(den))
        out.append(t)
    return out


def exterior_d(form):
    """Exterior derivative on HopfForm; d**2 = 0 and the r2 chain rule
    keep everything rational."""
    out = HopfForm.zero()
    acc = {}
    for word, coeff in form.terms.items():
        for j, dj in enumerate(_scalar_d(coeff)):
            if dj.is_zero():
                continue
            w, sign = _merge_word((j,), word)
            if w is None:
                continue
            out._accum(acc, w, dj * sign)
    return HopfForm(acc)


# ---------------------------------------------------------------------------
# The structure forms.

def build_C():
    """The complex 2-form defining the structure: away from x2 = 0,
    (1/r2) * ( (2 x1/xb2) dxb1^dxb2 + dx1^dxb1 + dx2^dxb2 )."""
    lead = HopfScalar({(1, 0, 0, 0): QI(2)}, (1, 0, 0, 0, 1))
    inv_r2 = HopfScalar.r2().inverse()
    out = HopfForm.gen(1).wedge(HopfForm.gen(3)).scale(lead)
    out = out + HopfForm.gen(0).wedge(HopfForm.gen(1)).scale(inv_r2)
    out = out + HopfForm.gen(2).wedge(HopfForm.gen(3)).scale(inv_r2)
    return out


def build_B():
    """The real gauge 2-form (x2 xb2 / 2 r2) dlog(xb1/x1) ^ dlog(xb2/x2)."""
    factor = HopfScalar({(0, 0, 1, 1): QI(Fraction(1, 2))}, (1, 0, 0, 0, 0))
    a1 = HopfForm.gen(1).scale(HopfScalar.coord(1).inverse()) - HopfForm.gen(0).scale(
        HopfScalar.coord(0).inverse()
    )
    a2 = HopfForm.gen(3).scale(HopfScalar.coord(3).inverse()) - HopfForm.gen(2).scale(
        HopfScalar.coord(2).inverse()
    )
    return a1.wedge(a2).scale(factor)


def d_r2_form():
    out = HopfForm.zero()
    for j in range(4):
        out = out + HopfForm.gen(j).scale(HopfScalar({_R2_DIFF[j]: QI(1)}))
    return out


def d_w1():
    """Differential of the first log coordinate: dxb1/xb1 + dr2/r2 - dx1/x1."""
    inv_r2 = HopfScalar.r2().inverse()
    return (
        HopfForm.gen(1).scale(HopfScalar.coord(1).inverse())
        + d_r2_form().scale(inv_r2)
        - HopfForm.gen(0).scale(HopfScalar.coord(0).inverse())
    )


def dlog_w2():
    """Logarithmic differential of the second coordinate xb2/R:
    dxb2/xb2 - dr2/(2 r2)."""
    half_inv = HopfScalar.r2().inverse() * Fraction(1, 2)
    return HopfForm.gen(3).scale(HopfScalar.coord(3).inverse()) - d_r2_form().scale(
        half_inv
    )


def w2_squared():
    """|w2|-free rational stand-in: the square x2 xb2 / r2."""
    return HopfScalar({(0, 0, 1, 1): QI(1)}, (1, 0, 0, 0, 0))


def dC_target():
    inv_r4 = HopfScalar({(0, 0, 0, 0): QI(1)}, (2, 0, 0, 0, 0))
    t1 = (
        HopfForm.gen(3).scale(HopfScalar.coord(2))
        - HopfForm.gen(2).scale(HopfScalar.coord(3))
    ).wedge(HopfForm.gen(0).wedge(HopfForm.gen(1)))
    t2 = (
        HopfForm.gen(1).scale(HopfScalar.coord(0))
        - HopfForm.gen(0).scale(HopfScalar.coord(1))
    ).wedge(HopfForm.gen(2).wedge(HopfForm.gen(3)))
    return (t1 + t2).scale(inv_r4)


# ---------------------------------------------------------------------------
# Verification reports.

def _check(name, residual_form=None, ok=None, witness=None):
    if residual_form is not None:
        ok = residual_form.is_zero()
        if not ok and witness is None:
            witness = residual_form.first_nonzero()
    entry = {"name": name, "ok": bool(ok)}
    if witness is not None and not ok:
        entry["witness"] = witness
    return entry


def _finish(checks):
    return {"ok": all(c["ok"] for c in checks), "checks": checks}


def verify_dC():
    """The differential of the structure form: closed it is not, but its
    differential has the stated rational shape, is real, and is exact."""
    dc = exterior_d(build_C())
    checks = [
        _check("dC-formula", residual_form=dc - dC_target()),
        _check("dC-real", residual_form=dc - dc.conj()),
        _check("ddC-zero", residual_form=exterior_d(dc)),
    ]
    return _finish(checks)


def verify_w_gauge(b_form=None):
    """The log-coordinate gauge: C + B equals the product of the two log
    differentials, and B's differential cancels dC.  Passing a different
    2-form as b_form reruns the checks against it (used by mutation
    tests)."""
    B = build_B() if b_form is None else b_form
    C = build_C()
    checks = [
        _check("w-product", residual_form=(C + B) - d_w1().wedge(dlog_w2())),
        _check("dB-plus-dC", residual_form=exterior_d(B) + exterior_d(C)),
        _check("B-real", residual_form=B - B.conj()),
        _check(
            "doubling-fixes-w2", ok=(w2_squared().zsub() == w2_squared()),
        ),
        _check("doubling-fixes-dw1", residual_form=d_w1().zsub() - d_w1()),
        _check("doubling-fixes-C", residual_form=C.zsub() - C),
        _check("doubling-fixes-B", residual_form=B.zsub() - B),
    ]
    return _finish(checks)


def verify_pi_inverse():
    """The bivector w2 (dual pair of the two log directions) inverts the
    gauge-transformed 2-form.  In the coframe (dw1, dlog w2) with dual
    frame (e1, w2*e2), the 2-form has the standard skew matrix and the
    bivector's matrix is its inverse; the bivector pairs the covector in
    its second slot.  Degeneracy happens exactly where x2 = 0."""
    resid = (build_C() + build_B()) - d_w1().wedge(dlog_w2())
    checks = [_check("w-product", residual_form=resid)]
    # Coefficient of the bivector against the rescaled frame: the w2
    # factors cancel, computed through the rational square.
    q = w2_squared() * w2_squared().inverse()
    checks.append(_check("frame-coefficient-one", ok=(q == HopfScalar.one())))
    one, zero = Fraction(1), Fraction(0)
    w_mat = [[zero, one], [-one, zero]]
    pi_mat = [[zero, one], [-one, zero]]
    pi_sharp = la.transpose(pi_mat)
    prod = la.mat_mul(pi_sharp, w_mat)
    checks.append(
        _check(
            "matrix-inverse",
            ok=(prod == la.eye(2, one)),
            witness=None if prod == la.eye(2, one) else repr(prod),
        )
    )
    w2s = w2_squared()
    degen_ok = w2s.num == {(0, 0, 1, 1): QI(1)} and w2s.den == (1, 0, 0, 0, 0)
    checks.append(_check("degeneracy-locus-x2", ok=degen_ok, witness=repr(w2s)))
    return _finish(checks)


# ---------------------------------------------------------------------------
# Restriction to a brane: x1 real, radius squared pinned to c.

def _rb_reduce(p, c):
    """Normal form of a polynomial in (x1, x2, xb2) modulo the relation
    x1**2 = c - x2*xb2; exponents of x1 end up 0 or 1."""
    work = dict(p)
    out = {}
    while work:
        m = max(work)
        coeff = work.pop(m)
        if not coeff:
            continue
        if m[0] >= 2:
            base = (m[0] - 2, m[1], m[2])
            for mm, cc in (
                ((base[0], base[1], base[2]), coeff * QI(c)),
                ((base[0], base[1] + 1, base[2] + 1), -coeff),
            ):
                s = work.get(mm, QI(0)) + cc
                if s:
                    work[mm] = s
                else:
                    work.pop(mm, None)
        else:
            s = out.get(m, QI(0)) + coeff
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


class _BraneScalar:
    """Rational function on the brane: polynomial in (x1, x2, xb2)
    modulo x1**2 = c - x2*xb2, over a monomial denominator."""

    __slots__ = ("num", "den", "c")

    def __init__(self, num, den, c):
        self.num = _rb_reduce(num, c)
        self.den = tuple(den)
        self.c = c

    @classmethod
    def zero(cls, c):
        return cls({}, (0, 0, 0), c)

    def is_zero(self):
        return not self.num

    def _lift(self, den):
        shift = tuple(t - s for t, s in zip(den, self.den))
        return {tuple(a + b for a, b in zip(m, shift)): x for m, x in self.num.items()}

    def __add__(self, other):
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        num = _poly_add(self._lift(den), other._lift(den))
        return _BraneScalar(num, den, self.c)

    def __neg__(self):
        return _BraneScalar({m: -x for m, x in self.num.items()}, self.den, self.c)

    def __mul__(self, other):
        num = _poly_mul(self.num, other.num)
        den = tuple(a + b for a, b in zip(self.den, other.den))
        return _BraneScalar(num, den, self.c)

    def __repr__(self):
        if not self.num:
            return "0"
        names = ("x1", "x2", "xb2")
        parts = []
        for m in sorted(self.num):
            factors = [repr(self.num[m])]
            for name, e in zip(names, m):
                if e:
                    factors.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(factors))
        s = " + ".join(parts)
        if any(self.den):
            dfac = []
            for name, e in zip(names, self.den):
                if e:
                    dfac.append(name if e == 1 else f"{name}^{e}")
            s = f"({s})/({'*'.join(dfac)})"
        return s


def _restrict_scalar(s, c):
    """Push a HopfScalar onto the brane: xb1 becomes x1, the radius
    square becomes the constant c."""
    c = Fraction(c)
    num = {}
    scale = QI(Fraction(1) / c ** s.den[0])
    for m, co in s.num.items():
        mm = (m[0] + m[1], m[2], m[3])
        v = num.get(mm, QI(0)) + co * scale
        if v:
            num[mm] = v
        else:
            num.pop(mm, None)
    den = (s.den[1] + s.den[2], s.den[3], s.den[4])
    return _BraneScalar(num, den, c)


def restrict_form_to_brane(form, c):
    """Pull a form back to the brane.  The two real constraints force
    xb1 -> x1 and then dr2 = 0 eliminates dx1 in favor of dx2 and dxb2
    (away from x1 = 0).  The result is a form in dx2, dxb2 only, keyed
    by ascending words over generators {2, 3}."""
    c = Fraction(c)
    # dx1 = -(xb2 dx2 + x2 dxb2) / (2 x1)
    sub1 = {
        2: _BraneScalar({(0, 0, 1): QI(Fraction(-1, 2))}, (1, 0, 0), c),
        3: _BraneScalar({(0, 1, 0): QI(Fraction(-1, 2))}, (1, 0, 0), c),
    }
    out = {}
    for word, coeff in form.terms.items():
        folded, sign = _merge_word((), tuple(0 if g == 1 else g for g in word))
        if folded is None:
            continue
        base = _restrict_scalar(coeff, c)
        if sign < 0:
            base = -base
        # expand any leading dx1 into the two surviving generators
        expansions = [(folded, base)]
        done = []
        while expansions:
            w, sc = expansions.pop()
            if 0 not in w:
                done.append((w, sc))
                continue
            rest = tuple(g for g in w if g != 0)
            pos = w.index(0)
            flip = -1 if pos % 2 else 1
            for g, factor in sub1.items():
                merged, s2 = _merge_word((g,), rest)
                if merged is None:
                    continue
                val = sc * factor
                if flip * s2 < 0:
                    val = -val
                expansions.append((merged, val))
        for w, sc in done:
            cur = out.get(w)
            cur = sc if cur is None else cur + sc
            if cur.is_zero():
                out.pop(w, None)
            else:
                out[w] = cur
    return out


def _brane_first_nonzero(restr):
    if not restr:
        return None
    w = min(restr)
    names = "^".join("d" + _GEN_NAMES[g] for g in w) if w else "1"
    return (names, repr(restr[w]))


# ---------------------------------------------------------------------------
# Exact arithmetic in a real quadratic extension, for sample points that
# carry a square-root scale factor.

def _sqrt_decompose(fr):
    """Write a positive rational as rat**2 * m with m squarefree."""
    fr = Fraction(fr)
    n = fr.numerator * fr.denominator
    e = 1
    m = 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            e *= d
        if n % d == 0:
            n //= d
            m *= d
        d += 1
    m *= n
    return Fraction(e, fr.denominator), m


class SqrtExt:
    """Numbers a + b*s with s**2 = m, a and b Gaussian rationals and m a
    squarefree integer > 1; a field, since s is irrational in Q(i)."""

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b, m):
        self.a = _as_qi(a)
        self.b = _as_qi(b)
        self.m = m

    def _co(self, other):
        if isinstance(other, SqrtExt):
            return other
        if isinstance(other, (QI, int, Fraction)):
            return SqrtExt(other, 0, self.m)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return SqrtExt(self.a + o.a, self.b + o.b, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return SqrtExt(self.a - o.a, self.b - o.b, self.m)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return SqrtExt(
            self.a * o.a + self.b * o.b * self.m,
            self.a * o.b + self.b * o.a,
            self.m,
        )

    __rmul__ = __mul__

    def inverse(self):
        d = self.a * self.a - self.b * self.b * self.m
        if not d:
            raise ZeroDivisionError("inverse of zero in SqrtExt")
        return SqrtExt(self.a / d, -self.b / d, self.m)

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return SqrtExt(-self.a, -self.b, self.m)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def conj(self):
        return SqrtExt(self.a.conj(), self.b.conj(), self.m)

    def __repr__(self):
        return f"SqrtExt({self.a!r}, {self.b!r}, m={self.m})"


def _point_field(c, a, b):
    """Coordinate values for the sample point (a, b) scaled onto radius
    square c, plus sqrt(-1) in the matching exact field."""
    rat, m = _sqrt_decompose(Fraction(c) / (a * a + b * b))
    if m == 1:
        return QI(rat * a), QI(rat * b), QI(0, 1)
    lam_a = SqrtExt(0, rat * a, m)
    lam_b = SqrtExt(0, rat * b, m)
    return lam_a, lam_b, SqrtExt(QI(0, 1), 0, m)


def _real_form_matrix(form, vals, i_val):
    """Real-frame coefficient matrix of a 2-form at a point.  The real
    basis is (du1, dv1, du2, dv2) with dx = du + i dv."""
    one = -(i_val * i_val)
    zero = one - one
    A = (
        (one, i_val, zero, zero),
        (one, -i_val, zero, zero),
        (zero, zero, one, i_val),
        (zero, zero, one, -i_val),
    )
    M = [[zero for _ in range(4)] for _ in range(4)]
    for word, coeff in form.terms.items():
        if len(word) != 2:
            raise ValueError("need a 2-form")
        g1, g2 = word
        cv = coeff.evaluate(vals, i_val)
        for mu in range(4):
            for nu in range(4):
                M[mu][nu] = M[mu][nu] + cv * (
                    A[g1][mu] * A[g2][nu] - A[g1][nu] * A[g2][mu]
                )
    return M


def _tau_match_at(c, a, b):
    """Compare the two descriptions of the brane's generalized tangent
    space at one sample point, by exact linear algebra.

    One side transports span(TS, conormal) through the inverse gauge
    shear.  The other applies the structure's anti-involution (i on the
    graph of C, -i on its conjugate) to the conormal directions.  Both
    are 4-dimensional subspaces of the 8-dimensional sum of tangent and
    cotangent; agreement is exact span equality.
    """
    x1v, x2v, i_val = _point_field(c, a, b)
    one = -(i_val * i_val)
    zero = one - one
    vals = (x1v, x1v, x2v, x2v)
    Mc = _real_form_matrix(build_C(), vals, i_val)
    Mb = _real_form_matrix(build_B(), vals, i_val)

    def basis_vec(mu):
        v = [zero] * 4
        v[mu] = one
        return v

    ell = []
    ell_bar = []
    for mu in range(4):
        ell.append(basis_vec(mu) + list(Mc[mu]))
        ell_bar.append(basis_vec(mu) + [x.conj() for x in Mc[mu]])
    cols = la.transpose(ell + ell_bar)

    # conormal covectors at the point: dv1 and a*du1 + b*du2
    xi1 = [zero, one, zero, zero]
    xi2 = [one * a, zero, one * b, zero]
    rhs = la.transpose([[zero] * 4 + xi for xi in (xi1, xi2)])
    coeffs = la.solve_multi(cols, rhs)
    if coeffs is None:
        return False, "graph frame is degenerate at the sample point"

    applied = []
    for j in range(2):
        acc = [zero] * 8
        for mu in range(4):
            fa = i_val * coeffs[mu][j]
            fb = -(i_val * coeffs[4 + mu][j])
            acc = [x + fa * y + fb * z for x, y, z in zip(acc, ell[mu], ell_bar[mu])]
        if any((x - x.conj()) for x in acc):
            return False, "anti-involution image is not real"
        applied.append(acc)

    tangent_rows = [
        [zero, zero, zero, one],
        [one * b, zero, -(one * a), zero],
    ]
    lhs = []
    for y in tangent_rows:
        contraction = [
            sum((y[mu] * Mb[mu][nu] for mu in range(4)), zero) for nu in range(4)
        ]
        lhs.append(list(y) + [-x for x in contraction])
    lhs.append([zero] * 4 + xi1)
    lhs.append([zero] * 4 + xi2)
    rhs_rows = applied + [[zero] * 4 + xi1, [zero] * 4 + xi2]

    span_l = la.Span(lhs)
    span_r = la.Span(rhs_rows)
    if span_l.dim != 4 or span_r.dim != 4:
        return False, f"degenerate spans: {span_l.dim}, {span_r.dim}"
    if not all(span_l.contains(r) for r in rhs_rows):
        return False, "anti-involution description leaves the gauge span"
    if not all(span_r.contains(r) for r in lhs):
        return False, "gauge description leaves the anti-involution span"
    return True, None


SAMPLE_POINTS = ((1, 1), (1, 2), (2, 1))


def verify_brane_family(c):
    """All exact checks for the two-sphere brane at radius parameter c:
    the first log coordinate is locked on the brane, the conormal
    direction wedges the gauge form to zero, both descriptions of the
    generalized tangent space agree at the fixed sample points, and the
    constraint family is stable under coordinate doubling."""
    c = Fraction(c)
    if c <= 0:
        raise PreconditionError("the brane radius parameter must be positive")
    checks = []
    restr = restrict_form_to_brane(d_w1(), c)
    checks.append(
        _check(
            "w1-locked-on-brane",
            ok=not restr,
            witness=_brane_first_nonzero(restr),
        )
    )
    coiso = d_w1().wedge(build_C() + build_B())
    checks.append(_check("conormal-wedge", residual_form=coiso))
    for a, b in SAMPLE_POINTS:
        ok, detail = _tau_match_at(c, a, b)
        checks.append(
            _check(f"tau-match@({a},{b})", ok=ok, witness=detail)
        )
    doubling_ok = (
        HopfScalar.r2().zsub() == HopfScalar.r2() * 4
        and (HopfScalar.coord(0) - HopfScalar.coord(1)).zsub()
        == (HopfScalar.coord(0) - HopfScalar.coord(1)) * 2
    )
    checks.append(_check("doubling-family", ok=doubling_ok))
    return _finish(checks)


def verify_all(cs=(Fraction(1), Fraction(2), Fraction(1, 2))):
    """Run every verifier; the report maps check-group names to their
    individual reports and carries a single top-level flag."""
    reports = {
        "dC": verify_dC(),
        "w_gauge": verify_w_gauge(),
        "pi_inverse": verify_pi_inverse(),
    }
    for c in cs:
        reports[f"brane_c={Fraction(c)}"] = verify_brane_family(c)
    return {"ok": all(r["ok"] for r in reports.values()), "reports": reports}
