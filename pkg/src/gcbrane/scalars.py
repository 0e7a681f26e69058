"""Gaussian rational scalars.

Jet coefficients live in Q(i).  We keep real and imaginary parts as
`fractions.Fraction` so that every ring operation stays exact and
hashable.  The "size" of a scalar, used by majorant norms, is
|re| + |im|; it is submultiplicative, which is all the norm estimates
need.
"""

from __future__ import annotations

from fractions import Fraction

_FracLike = (int, Fraction)


class QI:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            if im != 0:
                raise TypeError("cannot combine QI real part with an imaginary part")
            self.re = re.re
            self.im = re.im
            return
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- ring structure -------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QI(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero in QI")
        return QI(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    # -- comparisons and hashing ----------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    # -- helpers ---------------------------------------------------------

    def conj(self):
        return QI(self.re, -self.im)

    def one_norm(self) -> Fraction:
        """|re| + |im|.  Submultiplicative and exact."""
        return abs(self.re) + abs(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        if self.im == 0:
            return f"QI({self.re})"
        return f"QI({self.re}, {self.im})"


def _coerce(x):
    if isinstance(x, QI):
        return x
    if isinstance(x, _FracLike):
        return QI(x)
    return NotImplemented


QI_ZERO = QI(0)
QI_ONE = QI(1)
QI_I = QI(0, 1)


def frac_str(x: Fraction) -> str:
    """Serialize a Fraction as "p/q" (always with denominator)."""
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))
