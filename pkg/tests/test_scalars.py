"""Gaussian-rational scalar kernel: arithmetic, square roots, parsing."""

from fractions import Fraction

import pytest

from heunforge.scalars import (
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
    sqrt_exact,
    to_complex,
)


def rc(re, im=0):
    return RationalComplex(Fraction(re), Fraction(im))


def test_field_arithmetic():
    a = rc(Fraction(2, 3), Fraction(-1, 5))
    b = rc(Fraction(1, 7), Fraction(4, 3))
    assert a + b == rc(Fraction(17, 21), Fraction(17, 15))
    assert a - b == rc(Fraction(11, 21), Fraction(-23, 15))
    prod = a * b
    # (2/3 - i/5)(1/7 + 4i/3) = 2/21 + 4/15 + i(8/9 - 1/35)
    assert prod == rc(Fraction(2, 21) + Fraction(4, 15),
                      Fraction(8, 9) - Fraction(1, 35))
    assert (a * b) / b == a
    assert a / a == rc(1)
    assert -a + a == rc(0)
    assert bool(rc(0, 0)) is False and bool(rc(0, 1)) is True


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        rc(1) / rc(0)


def test_conjugate_and_abs():
    a = rc(3, -4)
    assert a.conjugate() == rc(3, 4)
    assert abs(a) == 5.0
    assert complex(a) == 3 - 4j


def test_mixed_int_fraction_operands():
    a = rc(Fraction(1, 2))
    assert a + 1 == rc(Fraction(3, 2))
    assert 2 * a == rc(1)
    assert 1 - a == rc(Fraction(1, 2))
    assert a / 2 == rc(Fraction(1, 4))
    assert 1 / rc(0, 1) == rc(0, -1)


def test_float_operands_rejected():
    with pytest.raises((BackendMismatchError, TypeError)):
        rc(1) + 0.5


def test_sqrt_exact_known_values():
    assert sqrt_exact(rc(Fraction(9, 4))) == rc(Fraction(3, 2))
    assert sqrt_exact(rc(-4)) == rc(0, 2)
    # (1+2i)^2 = -3+4i
    assert sqrt_exact(rc(-3, 4)) == rc(1, 2)
    assert sqrt_exact(rc(0, 2)) == rc(1, 1)


def test_sqrt_exact_rejects_irrational():
    # sqrt_exact reports failure with None; scalar_sqrt is the raising wrapper
    assert sqrt_exact(rc(2)) is None
    assert sqrt_exact(rc(0, 1)) is None
    with pytest.raises(ValueError):
        scalar_sqrt(rc(2), EXACT)


def test_scalar_sqrt_backends():
    assert scalar_sqrt(rc(Fraction(1, 4)), EXACT) == rc(Fraction(1, 2))
    v = scalar_sqrt(-1.0 + 0j, FLOAT)
    assert abs(v - 1j) < 1e-15
    # principal branch: nonnegative real part
    w = scalar_sqrt(complex(-3, 4), FLOAT)
    assert w.real >= 0 and abs(w * w - complex(-3, 4)) < 1e-12


def test_backend_helpers():
    assert backend_of(rc(1)) == EXACT
    assert backend_of(1.5) == FLOAT
    assert infer_backend([rc(1), rc(2)]) == EXACT
    assert infer_backend([1, 2]) == FLOAT
    # mixing exact and float scalars is an error, never a silent coercion
    with pytest.raises(BackendMismatchError):
        infer_backend([rc(1), 2.0])
    assert as_scalar(3, EXACT) == rc(3)
    assert as_scalar(Fraction(1, 3), EXACT) == rc(Fraction(1, 3))
    assert as_scalar(rc(2), FLOAT) == 2.0 + 0j
    assert to_complex(rc(1, -2)) == 1 - 2j


def test_parse_format_roundtrip_exact():
    cases = ["3", "-2/5", "1/2-1/3i", "2+3i", "i", "-i", "0", "7/3i"]
    for text in cases:
        v = parse_scalar(text, EXACT)
        again = parse_scalar(format_scalar(v), EXACT)
        assert again == v, text


def test_parse_float_backend():
    assert parse_scalar("1.5", FLOAT) == 1.5 + 0j
    assert parse_scalar("2e-3", FLOAT) == 0.002 + 0j
    assert parse_scalar("1+2i", FLOAT) == 1 + 2j
    with pytest.raises(ValueError):
        parse_scalar("banana", FLOAT)
    with pytest.raises(ValueError):
        parse_scalar("", EXACT)


def test_hash_consistency():
    assert hash(rc(2)) == hash(rc(2))
    d = {rc(1, 1): "a"}
    assert d[rc(1, 1)] == "a"
