"""Dense univariate polynomial kernel over the two scalar backends.

Coefficients are stored low order first. A polynomial is canonical when
its top coefficient is nonzero; trailing junk is trimmed exactly in the
exact backend and below a relative threshold of TRIM_REL * max|coeff|
in the float backend. The zero polynomial has degree -1.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .scalars import (
    EXACT,
    FLOAT,
    BackendMismatchError,
    RationalComplex,
    as_scalar,
    backend_of,
    format_scalar,
    infer_backend,
    parse_scalar,
    scalar_sqrt,
)

TRIM_REL = 1e-13


class Poly:
    """Immutable dense polynomial, low-order coefficients first."""

    __slots__ = ("coeffs", "backend")

    def __init__(self, coeffs, backend=None):
        coeffs = list(coeffs)
        if backend is None:
            backend = infer_backend(coeffs)
        coeffs = [as_scalar(c, backend) for c in coeffs]
        coeffs = _trim(coeffs, backend)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, backend):
        return cls([], backend)

    @classmethod
    def one(cls, backend):
        return cls([1], backend)

    @classmethod
    def x(cls, backend):
        return cls([0, 1], backend)

    @classmethod
    def constant(cls, value, backend=None):
        if backend is None:
            backend = backend_of(value)
        return cls([value], backend)

    # -- structure -------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        """Coefficient of z^k (zero scalar beyond the stored degree)."""
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return as_scalar(0, self.backend)

    def leading(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def _check_backend(self, other):
        if self.backend != other.backend:
            raise BackendMismatchError(
                "mixed backends %s and %s" % (self.backend, other.backend)
            )

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_backend(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            [self.coeff(k) + other.coeff(k) for k in range(n)], self.backend
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.backend)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                scalar = as_scalar(other, self.backend)
            except (BackendMismatchError, TypeError):
                return NotImplemented
            return Poly([c * scalar for c in self.coeffs], self.backend)
        self._check_backend(other)
        if self.is_zero or other.is_zero:
            return Poly.zero(self.backend)
        out = [as_scalar(0, self.backend)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.backend)

    __rmul__ = __mul__

    def _as_poly(self, other):
        if isinstance(other, Poly):
            return other
        try:
            return Poly.constant(as_scalar(other, self.backend), self.backend)
        except (BackendMismatchError, TypeError):
            return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.backend == other.backend and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.backend, self.coeffs))

    # -- calculus and evaluation -------------------------------------------

    def derivative(self) -> "Poly":
        return Poly(
            [k * c for k, c in enumerate(self.coeffs)][1:], self.backend
        )

    def __call__(self, z):
        """Horner evaluation. Exact polynomials evaluated at exact points
        stay exact; any other point is evaluated in complex floats."""
        if self.backend == EXACT and isinstance(z, (int, Fraction, RationalComplex)):
            acc = as_scalar(0, EXACT)
            zz = as_scalar(z, EXACT)
            for c in reversed(self.coeffs):
                acc = acc * zz + c
            return acc
        zz = complex(z)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * zz + complex(c)
        return acc

    # -- division -----------------------------------------------------------

    def divrem(self, divisor: "Poly"):
        """Long division, (quotient, remainder) with deg r < deg divisor.

        Arithmetic is exact in both backends (no rounding decisions here);
        callers decide when a float remainder counts as zero.
        """
        self._check_backend(divisor)
        if divisor.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        if self.degree < divisor.degree:
            return Poly.zero(self.backend), self
        rem = list(self.coeffs)
        lead = divisor.leading()
        dd = divisor.degree
        qlen = len(rem) - dd
        quot = [as_scalar(0, self.backend)] * qlen
        for k in range(qlen - 1, -1, -1):
            factor = rem[k + dd] / lead
            quot[k] = factor
            if factor:
                for j, c in enumerate(divisor.coeffs):
                    rem[k + j] = rem[k + j] - factor * c
        return Poly(quot, self.backend), Poly(rem[:dd], self.backend)

    def monic(self) -> "Poly":
        if self.is_zero:
            raise ValueError("cannot normalize the zero polynomial")
        lead = self.leading()
        return Poly([c / lead for c in self.coeffs], self.backend)

    # -- square-root head -----------------------------------------------------

    def sqrt_head(self):
        """Split an even-degree polynomial d as d = s^2 + r with
        deg s = deg d / 2 and deg r < deg d / 2 + 1.

        s is built top-down: its leading coefficient is the principal
        square root of d's leading coefficient, and each lower coefficient
        cancels one coefficient of d - s^2 from the top. d is a perfect
        square exactly when r vanishes. Odd degree raises ValueError;
        in the exact backend a leading coefficient without a
        Gaussian-rational root also raises.
        """
        if self.is_zero:
            z = Poly.zero(self.backend)
            return z, z
        if self.degree % 2 != 0:
            raise ValueError("sqrt_head needs even degree, got %d" % self.degree)
        m = self.degree // 2
        lead_root = scalar_sqrt(self.leading(), self.backend)
        s = [as_scalar(0, self.backend)] * (m + 1)
        s[m] = lead_root
        two_lead = lead_root + lead_root
        # residual r = d - s^2, updated as coefficients of s fill in
        for k in range(m - 1, -1, -1):
            # coefficient of z^(m+k) in d - s^2 so far
            acc = self.coeff(m + k)
            for i in range(k + 1, m + 1):
                j = m + k - i
                if 0 <= j <= m:
                    acc = acc - s[i] * s[j]
            s[k] = acc / two_lead
        s_poly = Poly(s, self.backend)
        r_poly = self - s_poly * s_poly
        return s_poly, r_poly

    # -- roots ------------------------------------------------------------------

    def roots(self):
        """All complex roots with multiplicity, as a list of Python
        complex, from the eigenvalues of the companion matrix.

        Root finding always happens in floating point; exact polynomials
        are converted first.
        """
        if self.is_zero:
            raise ValueError("the zero polynomial has no root set")
        c = [complex(v) for v in self.coeffs]
        if len(c) == 1:
            return []
        lead = c[-1]
        body = [v / lead for v in c[:-1]]
        n = len(body)
        if n == 1:
            return [-body[0]]
        comp = np.zeros((n, n), dtype=complex)
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = [-v for v in body]
        return [complex(v) for v in np.linalg.eigvals(comp)]

    # -- conversions and composition ------------------------------------------

    def to_float(self) -> "Poly":
        if self.backend == FLOAT:
            return self
        return Poly([complex(c) for c in self.coeffs], FLOAT)

    def shift(self, z0) -> "Poly":
        """Taylor shift: returns p(z + z0), by repeated synthetic division
        by (z - z0). The k-th remainder is the k-th Taylor coefficient."""
        z0 = as_scalar(z0, self.backend)
        work = list(self.coeffs)
        out = []
        while work:
            quot = []
            acc = work[-1]
            for k in range(len(work) - 2, -1, -1):
                quot.append(acc)
                acc = work[k] + z0 * acc
            out.append(acc)
            quot.reverse()
            work = quot
        return Poly(out, self.backend)

    # -- text format ----------------------------------------------------------

    def __repr__(self):
        return "Poly(%r, %s)" % (list(self.coeffs), self.backend)

    def __str__(self):
        return format_poly(self)


def _trim(coeffs, backend):
    if backend == EXACT:
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        return coeffs
    top = max((abs(c) for c in coeffs), default=0.0)
    if top == 0.0:
        return []
    floor = TRIM_REL * top
    while coeffs and abs(coeffs[-1]) <= floor:
        coeffs.pop()
    return coeffs


# -- parse / format -------------------------------------------------------------
#
# Text shape: "c0 + c1*z + c2*z^2". Coefficients use the scalar literal
# syntax; complex coefficients with two parts are parenthesized, e.g.
# "(1+2i)*z^2 - 1/3".

def _split_top_level(text):
    terms, start, depth = [], 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and k > start and text[k - 1] not in "eE(*^":
            terms.append(text[start:k])
            start = k
    terms.append(text[start:])
    return [t.strip() for t in terms if t.strip()]


def parse_poly(text: str, backend: str) -> Poly:
    """Parse 'c0 + c1*z + c2*z^2' into a Poly for the given backend."""
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial text")
    if text == "0":
        return Poly.zero(backend)
    coeffs = {}
    for term in _split_top_level(text.replace(" ", "")):
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ValueError("dangling sign in polynomial text")
        if "z" in term:
            head, _, tail = term.partition("z")
            head = head.rstrip("*")
            if tail.startswith("^"):
                if not tail[1:].isdigit():
                    raise ValueError("bad exponent in %r" % (term,))
                power = int(tail[1:])
            elif tail:
                raise ValueError("unexpected text after z in %r" % (term,))
            else:
                power = 1
            coeff = parse_scalar(head, backend) if head else as_scalar(1, backend)
        else:
            power = 0
            coeff = parse_scalar(term, backend)
        if sign < 0:
            coeff = -coeff
        coeffs[power] = coeffs.get(power, as_scalar(0, backend)) + coeff
    top = max(coeffs)
    return Poly([coeffs.get(k, 0) for k in range(top + 1)], backend)


def _coeff_text(c) -> str:
    s = format_scalar(c)
    needs_parens = ("+" in s[1:]) or ("-" in s[1:].replace("e-", "").replace("E-", ""))
    return "(%s)" % s if needs_parens else s


def format_poly(p: Poly) -> str:
    """Inverse of parse_poly: 'c0 + c1*z + c2*z^2' with zero terms dropped."""
    if p.is_zero:
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if not _nonzero(c):
            continue
        if k == 0:
            parts.append(_coeff_text(c))
        else:
            zk = "z" if k == 1 else "z^%d" % k
            parts.append("%s*%s" % (_coeff_text(c), zk))
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


def _nonzero(c) -> bool:
    return bool(c) if isinstance(c, RationalComplex) else c != 0
