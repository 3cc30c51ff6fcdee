"""Scalar arithmetic for the two coefficient backends.

The exact backend stores complex numbers with Fraction real and imaginary
parts (RationalComplex), so all ring operations and divisions are exact.
The float backend uses plain Python complex. Polynomials and everything
built on them carry a backend tag and refuse to mix the two.
"""

from __future__ import annotations

import cmath
import math
import re as _re
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"


class BackendMismatchError(TypeError):
    """Raised when exact and float operands meet in one operation."""


class RationalComplex:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("RationalComplex is immutable")

    # -- ring operations ------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalComplex(other)
        if isinstance(other, (float, complex)):
            raise BackendMismatchError(
                "cannot mix float scalar %r with exact backend" % (other,)
            )
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalComplex(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero scalar")
        return RationalComplex(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__truediv__(self)

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalComplex(other)
        if isinstance(other, RationalComplex):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return RationalComplex(self.re, -self.im)

    def __repr__(self):
        return "RationalComplex(%s, %s)" % (self.re, self.im)

    def __str__(self):
        return format_scalar(self)


def _fraction_sqrt(value: Fraction):
    """Exact square root of a nonnegative Fraction, or None."""
    if value < 0:
        raise ValueError("negative fraction")
    num, den = value.numerator, value.denominator
    sn, sd = math.isqrt(num), math.isqrt(den)
    if sn * sn == num and sd * sd == den:
        return Fraction(sn, sd)
    return None


def sqrt_exact(value: RationalComplex):
    """Principal square root of a RationalComplex, or None if it leaves
    the Gaussian-rational field.

    Solves (x+iy)^2 = a+ib: needs |a+ib| rational and (a+|a+ib|)/2 a
    rational square. Principal branch: x > 0, or x == 0 and y >= 0.
    """
    a, b = value.re, value.im
    if b == 0:
        if a >= 0:
            x = _fraction_sqrt(a)
            return None if x is None else RationalComplex(x, 0)
        y = _fraction_sqrt(-a)
        return None if y is None else RationalComplex(0, y)
    r = _fraction_sqrt(a * a + b * b)
    if r is None:
        return None
    x = _fraction_sqrt((a + r) / 2)
    if x is None or x == 0:
        return None
    y = b / (2 * x)
    if x < 0 or (x == 0 and y < 0):  # pragma: no cover - x>0 by construction
        x, y = -x, -y
    return RationalComplex(x, y)


# -- backend helpers -----------------------------------------------------


def backend_of(value):
    if isinstance(value, RationalComplex):
        return EXACT
    if isinstance(value, (complex, float)):
        return FLOAT
    raise TypeError("no backend for %r (int/Fraction are neutral)" % (value,))


def as_scalar(value, backend):
    """Coerce a number into the given backend's scalar type."""
    if backend == EXACT:
        if isinstance(value, RationalComplex):
            return value
        if isinstance(value, (int, Fraction)):
            return RationalComplex(value)
        raise BackendMismatchError("cannot coerce %r to exact backend" % (value,))
    if backend == FLOAT:
        if isinstance(value, RationalComplex):
            return complex(value)
        return complex(value)
    raise ValueError("unknown backend %r" % (backend,))


def infer_backend(values, default=FLOAT):
    """Backend implied by a mixed bag of numbers, EXACT only if some
    value is RationalComplex and none is float/complex."""
    seen_exact = seen_float = False
    for v in values:
        if isinstance(v, RationalComplex):
            seen_exact = True
        elif isinstance(v, (float, complex)):
            seen_float = True
        elif not isinstance(v, (int, Fraction)):
            raise TypeError("not a scalar: %r" % (v,))
    if seen_exact and seen_float:
        raise BackendMismatchError("exact and float scalars in one collection")
    if seen_exact:
        return EXACT
    if seen_float:
        return FLOAT
    return default


def to_complex(value) -> complex:
    return complex(value)


def scalar_sqrt(value, backend):
    """Principal square root in the given backend.

    Exact mode raises ValueError when the root leaves the
    Gaussian-rational field.
    """
    if backend == EXACT:
        root = sqrt_exact(as_scalar(value, EXACT))
        if root is None:
            raise ValueError("square root is not Gaussian-rational: %s" % (value,))
        return root
    return cmath.sqrt(complex(value))


# -- text format ----------------------------------------------------------
#
# Numbers appear in CLI input/output as rationals p/q, decimals, or complex
# a+bi combinations of those, e.g. "3", "-2/5", "1.5", "2+3i", "1/2-1/3i".

_FLOAT_RE = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_NUM_RE = r"(?:%s(?:/\d+)?)" % _FLOAT_RE
_TERM_RE = _re.compile(
    r"^(?P<sign>[+-]?)(?:(?P<num>%s)\s*(?P<imag>[ij]?)|(?P<lone>[ij]))$" % _NUM_RE
)


def _split_terms(text):
    """Split 'a+bi' style sums at top-level +/- (not after e/E exponents)."""
    terms, start = [], 0
    for k, ch in enumerate(text):
        if ch in "+-" and k > start and text[k - 1] not in "eE+-":
            terms.append(text[start:k])
            start = k
    terms.append(text[start:])
    return [t for t in terms if t.strip()]


def _parse_part(part: str):
    """One additive term -> (real_str_or_None, is_imag). Returns the
    numeric literal with sign attached."""
    m = _TERM_RE.match(part.strip().replace(" ", ""))
    if not m:
        raise ValueError("bad numeric literal %r" % (part,))
    sign = -1 if m.group("sign") == "-" else 1
    if m.group("lone"):
        return sign, "1", True
    return sign, m.group("num"), bool(m.group("imag"))


def _literal_to_fraction(lit: str) -> Fraction:
    return Fraction(lit)


def parse_scalar(text: str, backend: str):
    """Parse a scalar literal ('3', '-2/5', '1.5', '2+3i', '1/2-1/3i')."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if not text:
        raise ValueError("empty numeric literal")
    re_part, im_part = Fraction(0), Fraction(0)
    for part in _split_terms(text):
        sign, lit, is_imag = _parse_part(part)
        value = sign * _literal_to_fraction(lit)
        if is_imag:
            im_part += value
        else:
            re_part += value
    if backend == EXACT:
        return RationalComplex(re_part, im_part)
    return complex(float(re_part), float(im_part))


def _format_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else "%d/%d" % (f.numerator, f.denominator)


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_scalar(value) -> str:
    """Inverse of parse_scalar; exact values round-trip bit for bit."""
    if isinstance(value, RationalComplex):
        re_s, im_s = _format_fraction(value.re), _format_fraction(value.im)
        re_v, im_v = value.re, value.im
    else:
        c = complex(value)
        re_s, im_s = _format_real(c.real), _format_real(c.imag)
        re_v, im_v = c.real, c.imag
    if im_v == 0:
        return re_s
    if re_v == 0:
        return im_s + "i"
    sign = "+" if not im_s.startswith("-") else ""
    return re_s + sign + im_s + "i"
