"""Exact scalar arithmetic over Q and Q(i).

Rational scalars are plain ``fractions.Fraction``; Gaussian rationals are
``GaussianRational`` pairs of Fractions.  Every algebra carries a runtime
field tag (``"Q"`` or ``"Qi"``) and all scalars inside it are normalised to
the matching type.  No floating point is used anywhere.

Text forms:
  Q   : ``p/q`` with optional sign, ``p`` when the denominator is 1.
  Q(i): ``<re>+<im>i`` with both parts always present, e.g. ``1/2-3/4i``,
        ``0+1i``, ``2+0i``.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

FIELD_Q = "Q"
FIELD_QI = "Qi"
FIELDS = (FIELD_Q, FIELD_QI)


class FieldError(ValueError):
    """Raised on unknown field tags or cross-field operations."""


class GaussianRational:
    """a + b*i with exact rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GaussianRational is immutable")

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Field norm a^2 + b^2 (a rational)."""
        return self.re * self.re + self.im * self.im

    # comparison / hashing -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            # zero imaginary part compares equal to the embedded rational
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_scalar(self, FIELD_QI)


I = GaussianRational(0, 1)


def as_scalar(value, field: str):
    """Coerce ints/Fractions/GaussianRationals into the field's scalar type."""
    if field == FIELD_Q:
        if isinstance(value, GaussianRational):
            if value.im != 0:
                raise FieldError("imaginary scalar in a Q context")
            return value.re
        return Fraction(value)
    if field == FIELD_QI:
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(Fraction(value), 0)
    raise FieldError(f"unknown field tag {field!r}")


def zero(field: str):
    return as_scalar(0, field)


def one(field: str):
    return as_scalar(1, field)


def is_zero(value) -> bool:
    if isinstance(value, GaussianRational):
        return not value
    return value == 0


def format_scalar(value, field: str | None = None) -> str:
    """Canonical text form; round-trips through parse_scalar."""
    if isinstance(value, GaussianRational) or field == FIELD_QI:
        v = value if isinstance(value, GaussianRational) else GaussianRational(value)
        re_s = _format_fraction(v.re)
        im_abs = _format_fraction(abs(v.im))
        sign = "-" if v.im < 0 else "+"
        return f"{re_s}{sign}{im_abs}i"
    return _format_fraction(Fraction(value))


def _format_fraction(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_scalar(text: str, field: str):
    """Parse the canonical text form back into a scalar of the field."""
    text = text.strip()
    if field == FIELD_Q:
        if text.endswith("i"):
            raise FieldError(f"Gaussian literal {text!r} in a Q context")
        return Fraction(text)
    if field == FIELD_QI:
        if not text.endswith("i"):
            # plain rational embeds with zero imaginary part
            return GaussianRational(Fraction(text), 0)
        body = text[:-1]
        # split at the sign of the imaginary part: last +/- not at position 0
        # and not inside a fraction (fractions contain no signs after index 0)
        idx = max(body.rfind("+"), body.rfind("-"))
        if idx <= 0:
            # pure imaginary like "1/2i" or "-i" style is not canonical but
            # accepted for convenience
            imag = body if body not in ("", "-") else body + "1"
            return GaussianRational(0, Fraction(imag))
        re_part = body[:idx]
        im_part = body[idx:]
        if im_part in ("+", "-"):
            im_part += "1"
        return GaussianRational(Fraction(re_part), Fraction(im_part))
    raise FieldError(f"unknown field tag {field!r}")


def _fraction_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None."""
    if f < 0:
        return None
    n, d = f.numerator, f.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def sqrt_exact(value, field: str):
    """Exact square root in the field, or None when no such element exists.

    For Q(i), x+yi = (a+bi)^2 is solvable exactly when the norm x^2+y^2 is a
    rational square q^2 and (x+q)/2 is a rational square.
    """
    if field == FIELD_Q:
        return _fraction_sqrt(Fraction(value))
    v = as_scalar(value, FIELD_QI)
    x, y = v.re, v.im
    q = _fraction_sqrt(x * x + y * y)
    if q is None:
        return None
    a = _fraction_sqrt((x + q) / 2)
    if a is None:
        return None
    if a == 0:
        b = _fraction_sqrt(-x)
        if b is None:
            return None
        return GaussianRational(0, b)
    b = y / (2 * a)
    return GaussianRational(a, b)


def is_square(value, field: str) -> bool:
    return sqrt_exact(value, field) is not None
