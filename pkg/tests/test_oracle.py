"""Frobenius-series oracle: recurrences, termination conditions, residuals."""

import math
from fractions import Fraction

import pytest

from heunforge.oracle import (
    OdeFamily,
    OdeForm,
    frobenius_recurrence,
    ode_residual,
    residual_contour,
    series_coeffs,
    termination_polynomial,
    termination_solve,
)
from heunforge.poly import Poly
from heunforge.scalars import EXACT, FLOAT, RationalComplex


def rc(re, im=0):
    return RationalComplex(Fraction(re), Fraction(im))


def heun_ode(a, g, d, e, ab, q, backend=EXACT):
    """sigma y'' + tau~ y' + (ab z - q) y = 0 with the three-singular sigma."""
    z = Poly.x(backend)
    one = Poly.one(backend)
    ac = Poly.constant(a, backend)
    sig = z * (z - one) * (z - ac)
    tt = (z - one) * (z - ac) * g + z * (z - ac) * d + z * (z - one) * e
    return OdeForm(sig, tt, z * ab - Poly.constant(q, backend))


def test_odeform_validation():
    with pytest.raises(ValueError):
        OdeForm(Poly.zero(EXACT), Poly.one(EXACT), Poly.one(EXACT))
    with pytest.raises(ValueError):
        OdeForm(Poly.one(EXACT), Poly.one(FLOAT), Poly.one(EXACT))


def test_sinh_series():
    # w'' - w = 0 about 0, exponent 1 picks out sinh: z + z^3/6 + z^5/120
    ode = OdeForm(Poly([rc(1)], EXACT), Poly.zero(EXACT), Poly([rc(-1)], EXACT))
    rec = frobenius_recurrence(ode, 0, 1)
    cs = series_coeffs(rec, 1, 6)
    assert cs[2] == rc(Fraction(1, 6))
    assert cs[4] == rc(Fraction(1, 120))
    assert not cs[1] and not cs[3]


def test_indicial_collision_raises():
    # exponents 0 and 1 differ by an integer: the exponent-0 series breaks
    ode = OdeForm(Poly([rc(1)], EXACT), Poly.zero(EXACT), Poly([rc(-1)], EXACT))
    rec = frobenius_recurrence(ode, 0, 0)
    with pytest.raises(ValueError, match="indicial collision"):
        series_coeffs(rec, 1, 6)


def test_wrong_exponent_rejected():
    # indicial roots at 0 are 0 and 1 - gamma = 1/3; 1/5 is neither
    ode = heun_ode(rc(3), rc(Fraction(2, 3)), rc(Fraction(1, 2)),
                   rc(Fraction(3, 4)), rc(Fraction(5, 7)), rc(Fraction(1, 5)))
    frobenius_recurrence(ode, 0, rc(Fraction(1, 3)))
    with pytest.raises(ValueError, match="not an indicial root"):
        frobenius_recurrence(ode, 0, rc(Fraction(1, 5)))


def test_irregular_point_rejected():
    # z^3 y'' + y = 0 has an irregular singular point at 0
    z = Poly.x(EXACT)
    ode = OdeForm(z * z * z, Poly.zero(EXACT), Poly.one(EXACT))
    with pytest.raises(ValueError, match="irregular"):
        frobenius_recurrence(ode, 0, 0)


def test_three_singular_recurrence_bands():
    # the first band at (0, exponent 0) starts G_1(s) = a s(s - 1 + gamma),
    # so c_1 = q / (a gamma)
    a, g = rc(3), rc(Fraction(2, 3))
    ode = heun_ode(a, g, rc(Fraction(1, 2)), rc(Fraction(3, 4)),
                   rc(Fraction(5, 7)), rc(Fraction(1, 5)))
    rec = frobenius_recurrence(ode, 0, 0)
    assert rec.bands[0](rc(1)) == a * g
    cs = series_coeffs(rec, 1, 3)
    assert cs[1] == rc(Fraction(1, 5)) / (a * g)


def test_termination_polynomial_exact_quadratic():
    # two-singular base with an affine accessory direction; the degree-1
    # truncation condition is a monic quadratic with frozen coefficients
    al, be, ga = rc(Fraction(3, 2)), rc(Fraction(1, 3)), rc(Fraction(2, 5))
    z = Poly.x(EXACT)
    one = Poly.one(EXACT)
    sig = z * (z - one)
    tt = sig * al + (z - one) * (be + rc(1)) + z * (ga + rc(1))
    base = OdeForm(sig, tt, z * (-al))
    fam = OdeFamily(base, Poly.constant(rc(-1), EXACT))
    mon = termination_polynomial(fam, 1).monic()
    want = Poly([-al * (rc(1) + be), -(rc(2) + ga + be - al), rc(1)], EXACT)
    assert mon == want


def test_termination_solve_float_roots():
    al, be, ga = 1.5, 1 / 3, 0.4
    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    sig = z * (z - one)
    tt = sig * al + (z - one) * (be + 1) + z * (ga + 1)
    fam = OdeFamily(OdeForm(sig, tt, z * (-al)), Poly.constant(-1.0, FLOAT))
    roots = termination_solve(fam, 1)
    want = sorted([37 / 60 + math.sqrt(8569) / 60,
                   37 / 60 - math.sqrt(8569) / 60])
    got = sorted(r.real for r in roots)
    assert len(roots) == 2
    for x, y in zip(got, want):
        assert abs(x - y) < 1e-10


def test_termination_solve_validates_roots():
    # every returned root must actually truncate the series: c_{n+1} and
    # c_{n+2} vanish when the recurrence is re-run at that value
    al, be, ga = 1.5, 1 / 3, 0.4
    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    sig = z * (z - one)
    tt = sig * al + (z - one) * (be + 1) + z * (ga + 1)
    base = OdeForm(sig, tt, z * (-2 * al))
    fam = OdeFamily(base, Poly.constant(-1.0, FLOAT))
    for root in termination_solve(fam, 2):
        ode = OdeForm(sig, tt, z * (-2 * al) + Poly.constant(-root, FLOAT))
        rec = frobenius_recurrence(ode, 0, 0)
        cs = series_coeffs(rec, 1, 5)
        scale = max(abs(c) for c in cs)
        assert abs(cs[3]) < 1e-8 * scale and abs(cs[4]) < 1e-8 * scale


def test_termination_point_independence():
    # expanding about 0 or 1 must produce the same truncation values when
    # both points admit a series (root sets are a property of the equation)
    al, be, ga = 1.5, 0.45, -0.5
    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    sig = z * (z - one)
    tt = sig * al + (z - one) * (be + 1) + z * (ga + 1)
    fam = OdeFamily(OdeForm(sig, tt, z * (-al)), Poly.constant(-1.0, FLOAT))
    r0 = sorted(termination_solve(fam, 1), key=lambda v: v.real)
    r1 = sorted(termination_solve(fam, 1, point=1), key=lambda v: v.real)
    assert len(r0) == len(r1) == 2
    for x, y in zip(r0, r1):
        assert abs(x - y) < 1e-8


def test_termination_rejects_unknown_in_leading_band():
    # sigma = z^2 pushes the leading band up to row 2, and a constant
    # accessory direction lands exactly there: c_j would turn rational
    # in the unknown, so the builder must refuse
    z = Poly.x(EXACT)
    base = OdeForm(z * z, Poly.zero(EXACT), Poly.zero(EXACT))
    with pytest.raises(ValueError, match="leading"):
        termination_polynomial(OdeFamily(base, Poly.one(EXACT)), 1)


def test_residual_contour_avoids_singularities():
    # points within clearance of a root get pushed out radially; a point
    # that cannot escape is dropped, so the count may shrink slightly
    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    sig = z * (z - one) * (z - Poly.constant(1.9, FLOAT))
    pts = residual_contour(sig, 64)
    assert 56 <= len(pts) <= 64
    for p in pts:
        assert min(abs(p), abs(p - 1), abs(p - 1.9)) > 0.1 - 1e-9
        assert abs(complex(sig(p))) > 1e-6


def test_ode_residual_on_known_solution():
    # y = z^2 - 1/2 solves y'' - 2z y' + 4y = 0 (Hermite, n = 2)
    z = Poly.x(FLOAT)
    ode = OdeForm(Poly.one(FLOAT), z * (-2.0), Poly.constant(4.0, FLOAT))
    y = Poly([-0.5, 0.0, 1.0], FLOAT)
    assert ode_residual(y, ode) < 1e-12
    bad = Poly([-0.4, 0.0, 1.0], FLOAT)
    assert ode_residual(bad, ode) > 1e-3
