"""Branch engine: enumeration, reduction, quantization, eigenfunctions."""

from fractions import Fraction

import numpy as np
import pytest

from heunforge.engine import (
    CLASSIC,
    EXTENDED,
    NoBranchError,
    NuEquation,
    branch_from_pi,
    enumerate_branches,
    phi_factor,
    polynomial_solution,
    quantization,
    radicand,
    reduce_branch,
)
from heunforge.oracle import OdeForm, ode_residual
from heunforge.poly import Poly
from heunforge.scalars import EXACT, FLOAT, RationalComplex

F = Fraction


def rc(re, im=0):
    return RationalComplex(F(re), F(im))


def heun_nu(a, g, d, e, ab, q, backend=FLOAT):
    """Three-finite-singular equation in raw form, accessory already fixed."""
    z = Poly.x(backend)
    one = Poly.one(backend)
    ac = Poly.constant(a, backend)
    sig = z * (z - one) * (z - ac)
    tt = (z - one) * (z - ac) * g + z * (z - ac) * d + z * (z - one) * e
    st = (z * ab - Poly.constant(q, backend)) * sig
    return NuEquation(tt, sig, st, EXTENDED)


def test_mode_and_degree_validation():
    z = Poly.x(FLOAT)
    with pytest.raises(ValueError, match="mode"):
        NuEquation(Poly.zero(FLOAT), Poly.one(FLOAT), Poly.one(FLOAT), "bogus")
    with pytest.raises(ValueError, match="sigma must be nonzero"):
        NuEquation(Poly.zero(FLOAT), Poly.zero(FLOAT), Poly.one(FLOAT),
                   EXTENDED)
    # classic bounds are (1, 2, 2): a cubic sigma~ must be rejected
    with pytest.raises(ValueError, match="degree bounds"):
        NuEquation(Poly.zero(FLOAT), Poly.one(FLOAT), z * z * z, CLASSIC)
    # extended bounds are (2, 3, 4)
    with pytest.raises(ValueError, match="degree bounds"):
        NuEquation(z * z * z, Poly.one(FLOAT), Poly.one(FLOAT), EXTENDED)


def test_radicand_identity():
    eq = heun_nu(2.3, 0.7, 1.2, 0.9, 1.37, 0.41)
    for b in enumerate_branches(eq):
        rad = radicand(eq, b.g)
        diff = rad - b.s * b.s
        assert diff.max_abs() < 1e-8 * max(rad.max_abs(), 1.0)


def test_eight_branches_four_g_lines():
    av, gv, dv, ev = 2.3, 0.7, 1.2, 0.9
    abv, qv = 1.37, 0.41
    eq = heun_nu(av, gv, dv, ev, abv, qv)
    branches = enumerate_branches(eq)
    assert len(branches) == 8
    # the four affine g's, each carrying a +/- pair of branches
    g1 = (abv, -qv)
    g2 = (abv - (1 - gv) * ((1 - dv) + (1 - ev)),
          -qv - (1 - gv) * ((1 - dv) * (-av) + (1 - ev) * (-1)))
    g3 = (abv - (1 - ev) * ((1 - gv) + (1 - dv)), -qv + (1 - ev) * (1 - gv))
    g4 = (abv - (1 - dv) * ((1 - gv) + (1 - ev)),
          -qv + av * (1 - dv) * (1 - gv))
    found = []
    for b in branches:
        gf = b.g.to_float()
        found.append((complex(gf.coeff(1)), complex(gf.coeff(0))))
    for want in (g1, g2, g3, g4):
        hits = [f for f in found
                if abs(f[0] - want[0]) < 1e-8 and abs(f[1] - want[1]) < 1e-8]
        assert len(hits) == 2, (want, found)


def test_reduction_h_equals_g_plus_pi_prime():
    eq = heun_nu(2.3, 0.7, 1.2, 0.9, 1.37, 0.41)
    for b in enumerate_branches(eq):
        rf = reduce_branch(eq, b)
        diff = rf.h - b.g - b.pi.derivative()
        assert diff.max_abs() < 1e-8
        assert (rf.tau - eq.tau_tilde - b.pi - b.pi).max_abs() < 1e-12


def test_branch_from_pi_exact_roundtrip():
    ae, ge, de, ee = rc(2), rc(F(3, 4)), rc(F(5, 6)), rc(F(7, 8))
    abe, qe = rc(F(5, 7)), rc(F(1, 5))
    eq = heun_nu(ae, ge, de, ee, abe, qe, EXACT)
    z = Poly.x(EXACT)
    one = Poly.one(EXACT)
    ap = Poly.constant(ae, EXACT)
    pi = ((z - one) * (z - ap) * (rc(1) - ge)
          + z * (z - ap) * (rc(1) - de)
          + z * (z - one) * (rc(1) - ee))
    b = branch_from_pi(eq, pi)
    assert b.backend == EXACT
    assert b.g.coeff(1) == abe and b.g.coeff(0) == -qe
    rf = reduce_branch(eq, b)
    assert rf.h == b.g + b.pi.derivative()


def test_branch_from_pi_rejects_non_branch():
    eq = heun_nu(rc(2), rc(F(3, 4)), rc(F(5, 6)), rc(F(7, 8)),
                 rc(F(5, 7)), rc(F(1, 5)), EXACT)
    with pytest.raises(NoBranchError):
        branch_from_pi(eq, Poly([rc(1), rc(1)], EXACT))
    z = Poly.x(EXACT)
    with pytest.raises(ValueError, match="degree"):
        branch_from_pi(eq, z * z * z)


def test_quantization_zero_branch_frozen():
    # on the pi = 0 branch, slope residual at n = 1 is ab + (e + g + d)
    # and the constant offset is -q + tau~[1]/2
    ae, ge, de, ee = rc(2), rc(F(3, 4)), rc(F(5, 6)), rc(F(7, 8))
    abe, qe = rc(F(5, 7)), rc(F(1, 5))
    eq = heun_nu(ae, ge, de, ee, abe, qe, EXACT)
    b = branch_from_pi(eq, Poly.zero(EXACT))
    qr = quantization(eq, b, 1)
    assert qr.mode == EXTENDED
    assert qr.slope_residual == abe + (ee + ge + de)
    z = Poly.x(EXACT)
    one = Poly.one(EXACT)
    ap = Poly.constant(ae, EXACT)
    tt = (z - one) * (z - ap) * ge + z * (z - ap) * de + z * (z - one) * ee
    assert qr.constant_offset == -qe + tt.coeff(1) * rc(F(1, 2))


def test_polynomial_solution_with_residual():
    # fix the coupling so degree 1 terminates on the pi = 0 branch, then
    # resolve the accessory numerically and check the assembled solution
    gv, dv, ev = 0.6, 0.8, 0.7
    abv = -(ev + gv + dv)
    av = 1.9
    from heunforge.oracle import OdeFamily, termination_solve

    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    ac = Poly.constant(av, FLOAT)
    sig = z * (z - one) * (z - ac)
    tt = (z - one) * (z - ac) * gv + z * (z - ac) * dv + z * (z - one) * ev
    fam = OdeFamily(OdeForm(sig, tt, z * abv), Poly.constant(-1.0, FLOAT))
    roots = termination_solve(fam, 1)
    assert len(roots) == 2
    q0 = roots[0]
    eq = heun_nu(av, gv, dv, ev, abv, q0)
    b = branch_from_pi(eq, Poly.zero(FLOAT))
    assert abs(complex(quantization(eq, b, 1).slope_residual)) < 1e-10
    y = polynomial_solution(eq, b, 1)
    assert y.degree == 1
    assert abs(complex(y.leading()) - 1) < 1e-12
    ode = OdeForm(sig, tt, z * abv - Poly.constant(q0, FLOAT))
    assert ode_residual(y, ode) < 1e-11


def test_phi_factor_power_prefactor():
    # pi = (1-gamma)(z-1)(z-a) gives phi = z^(1-gamma), no exponential part
    ae, ge = rc(2), rc(F(3, 4))
    eq = heun_nu(ae, ge, rc(F(5, 6)), rc(F(7, 8)), rc(F(5, 7)), rc(F(1, 5)),
                 EXACT)
    z = Poly.x(EXACT)
    one = Poly.one(EXACT)
    pi = (z - one) * (z - Poly.constant(ae, EXACT)) * (rc(1) - ge)
    b = branch_from_pi(eq, pi)
    ph = phi_factor(eq, b)
    assert ph.exp_part.to_float().max_abs() < 1e-14
    by_root = sorted(ph.powers, key=lambda t: abs(t[0]))
    assert abs(by_root[0][0]) < 1e-12 and abs(by_root[0][1] - 0.25) < 1e-10
    assert all(abs(e) < 1e-12 for _, e in by_root[1:])
    # phi'/phi must equal pi/sigma pointwise
    zz = 0.37 + 0.21j
    lhs = ph.log_deriv(zz)
    rhs = complex(b.pi.to_float()(zz)) / complex(eq.sigma.to_float()(zz))
    assert abs(lhs - rhs) < 1e-12


def test_phi_factor_rejects_repeated_sigma_root():
    z = Poly.x(FLOAT)
    sig = z * z * (z - Poly.constant(1.0, FLOAT))
    eq = NuEquation(Poly.zero(FLOAT), sig, Poly.zero(FLOAT), EXTENDED)
    b = branch_from_pi(eq, Poly.zero(FLOAT))
    with pytest.raises(ValueError, match="repeated root"):
        phi_factor(eq, b)


def test_degenerate_radicand_collapses():
    # sigma~ chosen so the radicand vanishes identically at g = 0: the
    # enumeration must report the sign-0 degenerate branch
    z = Poly.x(FLOAT)
    one = Poly.one(FLOAT)
    ac = Poly.constant(1.9, FLOAT)
    sig = z * (z - one) * (z - ac)
    tt = (z - one) * (z - ac) * 0.6 + z * (z - ac) * 0.8 + z * (z - one) * 0.7
    half = (sig.derivative() - tt) * 0.5
    eq = NuEquation(tt, sig, half * half, EXTENDED)
    degen = [b for b in enumerate_branches(eq) if b.sign == 0]
    assert degen
    assert degen[0].g.to_float().max_abs() < 1e-9


def test_classic_mode_hermite():
    # psi'' + (lam - z^2) psi = 0 at lam = 5 admits the degree-2 solution
    # z^2 - 1/2 on the pi = -z branch
    lam = 5.0
    eq = NuEquation(Poly.zero(FLOAT), Poly.one(FLOAT),
                    Poly([lam, 0.0, -1.0], FLOAT), CLASSIC)
    branches = enumerate_branches(eq)
    assert len(branches) >= 2
    good = [b for b in branches
            if abs(complex(quantization(eq, b, 2).slope_residual)) < 1e-9]
    assert good
    qr = quantization(eq, good[0], 2)
    assert qr.mode == CLASSIC
    assert abs(complex(qr.lambda_n) - 4.0) < 1e-9
    y = polynomial_solution(eq, good[0], 2)
    assert abs(complex(y.coeff(0)) + 0.5) < 1e-10
    assert abs(complex(y.coeff(1))) < 1e-10


def test_accessory_shift_moves_h_only():
    eq = heun_nu(2.3, 0.7, 1.2, 0.9, 1.37, 0.41)
    shifted = eq.with_accessory_shift(0.25)
    b = branch_from_pi(eq, Poly.zero(FLOAT))
    bs = branch_from_pi(shifted, Poly.zero(FLOAT))
    h0 = reduce_branch(eq, b).h
    h1 = reduce_branch(shifted, bs).h
    diff = h0 - h1
    assert abs(complex(diff.coeff(0)) - 0.25) < 1e-12
    assert abs(complex(diff.coeff(1))) < 1e-12


def test_random_equations_branch_structure():
    # random Fuchsian-consistent draws: 8 branches, all validated by the
    # divisibility reduction, radicand identity everywhere
    rng = np.random.default_rng(8121311)
    for _ in range(25):
        av = 1.5 + rng.uniform(0.2, 1.5)
        gv, dv, ev = rng.uniform(0.3, 1.7, size=3)
        alv, bev = rng.uniform(0.3, 1.5, size=2)
        ev = alv + bev - gv - dv + 1
        if abs(ev) < 0.05 or min(abs(1 - gv), abs(1 - dv), abs(1 - ev)) < 0.05:
            continue
        qv = rng.uniform(-1.0, 1.0)
        eq = heun_nu(av, gv, dv, ev, alv * bev, qv)
        branches = enumerate_branches(eq)
        assert len(branches) == 8
        for b in branches:
            rad = radicand(eq, b.g)
            assert (rad - b.s * b.s).max_abs() <= 1e-7 * max(
                rad.max_abs(), 1.0)
            reduce_branch(eq, b)
