"""Reduction engine for equations of hypergeometric type.

An input equation psi'' + (tau~/sigma) psi' + (sigma~/sigma^2) psi = 0 is
reduced by the substitution psi = phi(z) y(z), phi'/phi = pi/sigma, where
pi = (sigma' - tau~)/2 +- sqrt(((sigma' - tau~)/2)^2 - sigma~ + g sigma)

and the polynomial g (a constant k in classic mode, affine in extended
mode) is chosen so the radicand is a perfect square. Each admissible g
yields up to two branches; reduction gives sigma y'' + tau y' + h y = 0
with h = sigma_bar / sigma dividing exactly. Degree bounds:

    classic   deg tau~ <= 1, deg sigma <= 2, deg sigma~ <= 2, g scalar
    extended  deg tau~ <= 2, deg sigma <= 3, deg sigma~ <= 4, g affine
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .oracle import OdeForm
from .poly import Poly
from .scalars import EXACT, FLOAT, RationalComplex, as_scalar, sqrt_exact

CLASSIC = "classic"
EXTENDED = "extended"

DEDUPE_TOL = 1e-8
DIVIDE_REL_TOL = 1e-10
NEWTON_RESIDUAL_TOL = 1e-11
NEWTON_MAX_ITER = 100
NEWTON_DAMPING = 0.5
GRID_SLOPES = (0.5, -0.5, 1.5, -1.5, 2.7, -2.7, 3.9, -3.9)
GRID_OFFSETS = (0.4, -0.4, 1.3, -1.3)

_DEGREE_BOUNDS = {CLASSIC: (1, 2, 2), EXTENDED: (2, 3, 4)}


class NoBranchError(ValueError):
    """No admissible branch (or accessory value) exists for the input."""


@dataclass(frozen=True)
class NuEquation:
    """Equation psi'' + (tau~/sigma) psi' + (sigma~/sigma^2) psi = 0."""

    tau_tilde: Poly
    sigma: Poly
    sigma_tilde: Poly
    mode: str = EXTENDED

    def __post_init__(self):
        if self.mode not in _DEGREE_BOUNDS:
            raise ValueError("mode must be %r or %r" % (CLASSIC, EXTENDED))
        if not (
            self.tau_tilde.backend == self.sigma.backend == self.sigma_tilde.backend
        ):
            raise ValueError("equation polynomials must share one backend")
        if self.sigma.is_zero:
            raise ValueError("sigma must be nonzero")
        b1, b2, b3 = _DEGREE_BOUNDS[self.mode]
        if self.tau_tilde.degree > b1 or self.sigma.degree > b2 or self.sigma_tilde.degree > b3:
            raise ValueError(
                "degree bounds for %s mode are (%d, %d, %d); got (%d, %d, %d)"
                % (
                    self.mode,
                    b1,
                    b2,
                    b3,
                    self.tau_tilde.degree,
                    self.sigma.degree,
                    self.sigma_tilde.degree,
                )
            )

    @property
    def backend(self):
        return self.sigma.backend

    def to_float(self) -> "NuEquation":
        return NuEquation(
            self.tau_tilde.to_float(),
            self.sigma.to_float(),
            self.sigma_tilde.to_float(),
            self.mode,
        )

    def half_gap(self) -> Poly:
        """(sigma' - tau~)/2, the fixed part of every pi branch."""
        diff = self.sigma.derivative() - self.tau_tilde
        half = as_scalar(Fraction(1, 2), self.backend)
        return diff * half

    def with_accessory_shift(self, amount) -> "NuEquation":
        """Shift sigma~ by -amount * sigma (how the accessory parameter
        enters both equation families); branches are unaffected except
        for h, which drops by the same amount."""
        amount = as_scalar(amount, self.backend)
        return NuEquation(
            self.tau_tilde,
            self.sigma,
            self.sigma_tilde - self.sigma * amount,
            self.mode,
        )

    def psi_ode(self) -> OdeForm:
        """The equation as polynomial ODE: sigma^2 psi'' + sigma tau~ psi'
        + sigma~ psi = 0."""
        return OdeForm(
            self.sigma * self.sigma, self.sigma * self.tau_tilde, self.sigma_tilde
        )


def radicand(eq: NuEquation, g: Poly) -> Poly:
    """((sigma' - tau~)/2)^2 - sigma~ + g sigma for a candidate g."""
    half = eq.half_gap()
    return half * half - eq.sigma_tilde + g * eq.sigma


@dataclass(frozen=True)
class PiBranch:
    """One admissible branch: pi = (sigma' - tau~)/2 + sign * s with
    radicand(g) = s^2. sign 0 marks the degenerate collapse (radicand
    identically zero)."""

    g: Poly
    s: Poly
    pi: Poly
    sign: int

    @property
    def backend(self):
        return self.pi.backend


@dataclass(frozen=True)
class ReducedForm:
    """Coefficients of the reduced equation sigma y'' + tau y' + h y = 0.
    In classic mode h is the constant eigenvalue term."""

    tau: Poly
    h: Poly

    def ode(self, eq: NuEquation) -> OdeForm:
        return OdeForm(eq.sigma, self.tau, self.h)


@dataclass(frozen=True)
class QuantizationRelation:
    """Degree-n termination constraints read off h = h_n.

    Extended mode: slope_residual is the z-coefficient mismatch
    h[1] + n tau[2] + n(n-1) sigma[3] (zero exactly when a degree-n
    polynomial solution is possible) and constant_offset is the implied
    integration constant C_n. Classic mode: lambda_n is the eigenvalue
    -n tau' - n(n-1)/2 sigma'' and slope_residual is h - lambda_n.
    """

    n: int
    mode: str
    slope_residual: object
    constant_offset: object = None
    lambda_n: object = None


@dataclass(frozen=True)
class PhiFactor:
    """Prefactor phi = exp(exp_part) * prod (z - root)^exponent with
    phi'/phi = pi/sigma."""

    exp_part: Poly
    powers: tuple

    def log_deriv(self, z) -> complex:
        val = complex(self.exp_part.to_float().derivative()(z))
        for root, expo in self.powers:
            val += complex(expo) / (z - complex(root))
        return val

    def __call__(self, z) -> complex:
        import cmath

        val = cmath.exp(complex(self.exp_part.to_float()(z)))
        for root, expo in self.powers:
            val *= (z - complex(root)) ** complex(expo)
        return val


@dataclass(frozen=True)
class Eigenstate:
    """A degree-n polynomial solution with its prefactor and checks."""

    n: int
    accessory: object
    quantization: QuantizationRelation
    phi: PhiFactor
    poly: Poly
    residual: float = None


# -- branch enumeration -------------------------------------------------------


def _is_negligible(p: Poly, scale: float, tol: float) -> bool:
    if p.backend == EXACT:
        return p.is_zero
    return p.max_abs() <= tol * max(scale, 1.0)


def _try_branches(eq: NuEquation, g: Poly, scale: float, s_hint=None):
    """Branches for a candidate g, or [] when the radicand is not a
    perfect square. Funnel for every enumeration path.

    A caller that already knows the square root passes it as s_hint;
    sqrt_head would divide by the radicand's leading coefficient, which
    amplifies noise badly when that coefficient is nearly zero."""
    d = radicand(eq, g)
    half = eq.half_gap()
    if _is_negligible(d, scale, 1e-9):
        return [PiBranch(g, Poly.zero(eq.backend), half, 0)]
    if d.degree % 2 != 0:
        return []
    s = None
    if s_hint is not None and _is_negligible(
        d - s_hint * s_hint, max(scale, d.max_abs()), 1e-8
    ):
        s = s_hint
    if s is None:
        try:
            s, rem = d.sqrt_head()
        except ValueError:
            return []
        if not _is_negligible(rem, max(scale, d.max_abs()), 1e-8):
            return []
    out = []
    for sign in (1, -1):
        pi = half + s if sign == 1 else half - s
        if pi.degree > 2:
            continue
        out.append(PiBranch(g, s, pi, sign))
    return out


def _validated(eq: NuEquation, branches):
    """Keep branches whose sigma_bar divides by sigma (drops spurious
    Newton roots)."""
    good = []
    for b in branches:
        try:
            reduce_branch(eq, b)
        except ValueError:
            continue
        good.append(b)
    return good


def _dedupe(branches):
    seen = []
    out = []
    for b in branches:
        gf = b.g.to_float()
        key = (complex(gf.coeff(1)), complex(gf.coeff(0)), b.sign)
        norm = max(1.0, abs(key[0]), abs(key[1]))
        dup = False
        for k in seen:
            if (
                k[2] == key[2]
                and abs(k[0] - key[0]) <= DEDUPE_TOL * norm
                and abs(k[1] - key[1]) <= DEDUPE_TOL * norm
            ):
                dup = True
                break
        if not dup:
            seen.append(key)
            out.append(b)
    return out


def _rationalize(value: complex, tol=1e-9):
    """Nearest Gaussian rational, preferring small denominators so that
    float noise does not shadow an exact value like 5/7."""
    parts = []
    for part in (value.real, value.imag):
        frac = None
        for den in (1, 6, 60, 2520, 10**4, 10**6, 10**9, 10**12):
            cand = Fraction(part).limit_denominator(den)
            if abs(cand - part) <= tol * max(1.0, abs(part)):
                frac = cand
                break
        if frac is None:
            frac = Fraction(part).limit_denominator(10**12)
        parts.append(frac)
    return RationalComplex(*parts)


def _exactify_candidates(eq: NuEquation, branches, scale):
    """For an exact equation, swap in exact branches when the Newton g
    rounds to Gaussian rationals that verify exactly."""
    if eq.backend != EXACT:
        return branches
    out = []
    for b in branches:
        if b.backend == EXACT:
            out.append(b)
            continue
        gf = b.g
        g_exact = Poly(
            [_rationalize(complex(gf.coeff(0))), _rationalize(complex(gf.coeff(1)))],
            EXACT,
        )
        replaced = False
        for cand in _try_branches(eq, g_exact, scale):
            # match on pi, not on the square-root sign: different paths
            # may pick opposite global signs for the same branch pair
            if cand.backend == EXACT:
                gap = (cand.pi.to_float() - b.pi).max_abs()
                if gap <= 1e-6 * max(1.0, b.pi.max_abs()):
                    out.append(cand)
                    replaced = True
                    break
            if cand.sign == 0 and b.sign == 0:
                out.append(cand)
                replaced = True
                break
        if not replaced:
            out.append(b)
    return out


def _affine_radicand_data(eq: NuEquation):
    """Coefficients of the radicand as affine functions of the unknown
    g = u1 z + u0: d_i = base_i + u1 A_i + u0 B_i."""
    half = eq.half_gap().to_float()
    base = half * half - eq.sigma_tilde.to_float()
    sig = eq.sigma.to_float()
    top = 4 if eq.mode == EXTENDED else 2
    bases = [complex(base.coeff(i)) for i in range(top + 1)]
    a_vec = [complex(sig.coeff(i - 1)) if i >= 1 else 0j for i in range(top + 1)]
    b_vec = [complex(sig.coeff(i)) for i in range(top + 1)]
    return bases, a_vec, b_vec


def _quartic_remainder(u, bases, a_vec, b_vec):
    """The two perfect-square obstructions of the quartic radicand, in
    sqrt-free rational form (invariant under the root branch)."""
    u1, u0 = u
    d = [bases[i] + u1 * a_vec[i] + u0 * b_vec[i] for i in range(5)]
    d4, d3, d2, d1, d0 = d[4], d[3], d[2], d[1], d[0]
    if abs(d4) < 1e-30:
        return None
    s0_num = d2 - d3 * d3 / (4 * d4)  # 2 sqrt(d4) * s0
    r1 = d1 - d3 * s0_num / (2 * d4)
    r0 = d0 - s0_num * s0_num / (4 * d4)
    return np.array([r1, r0])


def _newton_quartic(eq: NuEquation, bases, a_vec, b_vec, scale):
    """Damped Newton for the two remainder equations from a fixed grid
    of 32 deterministic starting points."""
    roots = []
    starts = []
    for idx, (sa, sb) in enumerate(product(GRID_SLOPES, GRID_OFFSETS)):
        u1 = sa * scale
        u0 = sb * scale
        if idx % 2:
            u1 += 0.31j * scale
            u0 -= 0.17j * scale
        starts.append((u1, u0))
    fd = 1e-7 * scale
    for u1, u0 in starts:
        u = np.array([u1, u0], dtype=complex)
        r = _quartic_remainder(u, bases, a_vec, b_vec)
        if r is None:
            continue
        for _ in range(NEWTON_MAX_ITER):
            if np.max(np.abs(r)) <= NEWTON_RESIDUAL_TOL * scale * scale:
                break
            jac = np.zeros((2, 2), dtype=complex)
            ok = True
            for j in range(2):
                up = u.copy()
                up[j] += fd
                um = u.copy()
                um[j] -= fd
                rp = _quartic_remainder(up, bases, a_vec, b_vec)
                rm = _quartic_remainder(um, bases, a_vec, b_vec)
                if rp is None or rm is None:
                    ok = False
                    break
                jac[:, j] = (rp - rm) / (2 * fd)
            if not ok:
                break
            try:
                step = np.linalg.solve(jac, -r)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            improved = False
            for _ in range(25):
                trial = u + lam * step
                rt = _quartic_remainder(trial, bases, a_vec, b_vec)
                if rt is not None and np.max(np.abs(rt)) < np.max(np.abs(r)):
                    u, r = trial, rt
                    improved = True
                    break
                lam *= NEWTON_DAMPING
            if not improved:
                break
        if r is not None and np.max(np.abs(r)) <= NEWTON_RESIDUAL_TOL * scale * scale:
            roots.append((complex(u[0]), complex(u[1])))
    return roots


def _interp_candidates(eq_f: NuEquation, scale):
    """Closed-form candidates when sigma has distinct roots z_i.

    g sigma = s^2 - B with B = ((sigma' - tau~)/2)^2 - sigma~, so any
    branch square root obeys s(z_i)^2 = B(z_i). Conversely, for cubic
    sigma the quadratic interpolant of any sign choice (+-sqrt(B(z_i)))
    works, and for quadratic sigma one more degree of freedom is pinned
    by s^2 matching B at degree 4. This enumerates every branch. Returns
    None when the shape does not apply (repeated roots, deg sigma < 2).
    """
    sig = eq_f.sigma
    m = sig.degree
    if m not in (2, 3):
        return None
    roots = sig.roots()
    span = max([1.0] + [abs(r) for r in roots])
    for i, r1 in enumerate(roots):
        for r2 in roots[i + 1 :]:
            if abs(r1 - r2) <= 1e-7 * span:
                return None
    half = eq_f.half_gap()
    bpoly = half * half - eq_f.sigma_tilde
    vals = [cmath.sqrt(complex(bpoly(r))) for r in roots]
    candidates = []
    if m == 3:
        sign_sets = [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]
    else:
        lead4 = complex(bpoly.coeff(4))
        if abs(lead4) <= 1e-13 * max(scale, 1.0):
            return None
        s2 = cmath.sqrt(lead4)
        sign_sets = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    for signs in sign_sets:
        pts = [e * v for e, v in zip(signs, vals)]
        if m == 3:
            s = Poly.zero(FLOAT)
            for i, r in enumerate(roots):
                term = Poly.one(FLOAT)
                for j, rj in enumerate(roots):
                    if j != i:
                        term = term * Poly([-rj, 1.0], FLOAT)
                        term = term * (1.0 / (r - rj))
                s = s + term * pts[i]
        else:
            z1, z2 = roots
            s = Poly([z1 * z2, -(z1 + z2), 1.0], FLOAT) * s2
            s = s + Poly([-z2, 1.0], FLOAT) * (pts[0] / (z1 - z2))
            s = s + Poly([-z1, 1.0], FLOAT) * (pts[1] / (z2 - z1))
        g, rem = (s * s - bpoly).divrem(sig)
        if rem.max_abs() > 1e-7 * max(scale, 1.0, (s * s).max_abs()):
            continue
        if g.degree > 1:
            continue
        candidates.append((complex(g.coeff(1)), complex(g.coeff(0)), s))
    return candidates


def _zero_radicand_candidate(eq: NuEquation, bases, a_vec, b_vec, scale):
    """The unique g with radicand identically zero, if the overdetermined
    affine system is consistent."""
    mat = np.array([[a_vec[i], b_vec[i]] for i in range(len(bases))], dtype=complex)
    rhs = np.array([-b for b in bases], dtype=complex)
    if np.linalg.matrix_rank(mat, tol=1e-12 * max(scale, 1.0)) < 2:
        return None
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    resid = mat @ sol - rhs
    if np.max(np.abs(resid)) > 1e-9 * max(scale, 1.0):
        return None
    return complex(sol[0]), complex(sol[1])


def _disc_roots_1d(c2, c1, c0):
    """Roots of the discriminant c1^2 - 4 c2 c0 where each c is an
    affine pair (const, slope) in the remaining unknown."""
    conv = [0j, 0j, 0j]
    for i in range(2):
        for j in range(2):
            conv[i + j] += c1[i] * c1[j] - 4 * c2[i] * c0[j]
    disc = Poly(conv, FLOAT)
    if disc.is_zero:
        raise NoBranchError("perfect-square set is not finite")
    if disc.degree == 0:
        return []
    return disc.roots()


def enumerate_branches(eq: NuEquation):
    """All admissible (g, pi) branches of the equation.

    Extended mode runs damped Newton on the two perfect-square remainder
    conditions from a deterministic 32-point grid (plus closed-form
    handling of degree-degenerate radicands); classic mode solves the
    scalar discriminant condition as a quadratic in k. Results are
    deduplicated at 1e-8 and validated by exact division of sigma_bar;
    exact equations get exact branches whenever the Newton root
    rationalizes and re-verifies exactly.
    """
    if eq.mode == CLASSIC:
        return _enumerate_classic(eq)
    bases, a_vec, b_vec = _affine_radicand_data(eq)
    scale = max([1.0] + [abs(b) for b in bases])
    candidates = []

    hints = {}
    quartic_active = abs(a_vec[4]) > 1e-14 * scale or abs(bases[4]) > 1e-14 * scale
    if quartic_active:
        interp = _interp_candidates(eq.to_float(), scale)
        if interp is not None:
            for u1, u0, s in interp:
                candidates.append((u1, u0))
                hints[(u1, u0)] = s
        else:
            candidates.extend(_newton_quartic(eq, bases, a_vec, b_vec, scale))
            if abs(a_vec[4]) > 1e-14 * scale:
                # degree-drop manifold: d4 = d3 = 0 has one affine solution
                mat = np.array(
                    [[a_vec[4], b_vec[4]], [a_vec[3], b_vec[3]]], dtype=complex
                )
                rhs = np.array([-bases[4], -bases[3]], dtype=complex)
                try:
                    sol = np.linalg.solve(mat, rhs)
                    candidates.append((complex(sol[0]), complex(sol[1])))
                except np.linalg.LinAlgError:
                    pass
    else:
        # cubic band must vanish identically; then a quadratic-in-z square
        if abs(a_vec[3]) > 1e-14 * scale:
            # u1 = -(bases[3] + u0 b_vec[3]) / a_vec[3], one unknown left
            def affine(i):
                const = bases[i] - a_vec[i] * bases[3] / a_vec[3]
                slope = b_vec[i] - a_vec[i] * b_vec[3] / a_vec[3]
                return (const, slope)

            for u0 in _disc_roots_1d(affine(2), affine(1), affine(0)):
                u1 = -(bases[3] + u0 * b_vec[3]) / a_vec[3]
                candidates.append((complex(u1), complex(u0)))
        elif abs(bases[3]) > 1e-14 * scale:
            candidates = []
        else:
            raise NoBranchError(
                "perfect-square set is not finite (sigma too degenerate "
                "for extended-mode enumeration)"
            )
    zero_cand = _zero_radicand_candidate(eq, bases, a_vec, b_vec, scale)
    if zero_cand is not None:
        candidates.append(zero_cand)

    eq_f = eq.to_float()
    branches = []
    for u1, u0 in candidates:
        g = Poly([u0, u1], FLOAT)
        branches.extend(
            _try_branches(eq_f, g, scale, s_hint=hints.get((u1, u0)))
        )
    branches = _dedupe(_validated(eq_f, branches))
    branches = _exactify_candidates(eq, branches, scale)
    return branches


def _enumerate_classic(eq: NuEquation):
    bases, _, b_vec = _affine_radicand_data(eq)
    scale = max([1.0] + [abs(b) for b in bases])
    pairs = [(bases[i], b_vec[i]) for i in range(3)]
    k_values = _disc_roots_1d(pairs[2], pairs[1], pairs[0])
    # radicand identically zero for some k: only if sigma ~ radicand direction
    mat = np.array([[b_vec[i]] for i in range(3)], dtype=complex)
    rhs = np.array([-b for b in bases[:3]], dtype=complex)
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    if np.max(np.abs(mat @ sol - rhs)) <= 1e-9 * max(scale, 1.0):
        k_values.append(complex(sol[0]))
    eq_f = eq.to_float()
    branches = []
    for k in k_values:
        g = Poly([k], FLOAT)
        branches.extend(_try_branches(eq_f, g, scale))
    branches = _dedupe(_validated(eq_f, branches))
    return _exactify_classic(eq, branches, scale)


def _exactify_classic(eq: NuEquation, branches, scale):
    if eq.backend != EXACT:
        return branches
    out = []
    for b in branches:
        if b.backend == EXACT:
            out.append(b)
            continue
        k_exact = _rationalize(complex(b.g.coeff(0)))
        g_exact = Poly([k_exact], EXACT)
        replaced = False
        for cand in _try_branches(eq, g_exact, scale):
            if cand.backend != EXACT:
                continue
            if cand.sign == b.sign or (cand.sign == 0 and b.sign == 0):
                sf = cand.s.to_float()
                if (sf - b.s).max_abs() <= 1e-6 * max(1.0, b.s.max_abs()):
                    out.append(cand)
                    replaced = True
                    break
        if not replaced:
            out.append(b)
    return out


def branch_from_pi(eq: NuEquation, pi: Poly) -> PiBranch:
    """Branch with a prescribed pi (used when the class catalog already
    names it). g is recovered from the defining identity
    pi^2 + pi (tau~ - sigma') + sigma~ = g sigma."""
    if pi.backend != eq.backend:
        raise ValueError("pi backend differs from equation backend")
    if pi.degree > 2:
        raise ValueError("pi must have degree <= 2")
    num = pi * pi + pi * (eq.tau_tilde - eq.sigma.derivative()) + eq.sigma_tilde
    g, rem = num.divrem(eq.sigma)
    if not _is_negligible(rem, num.max_abs(), DIVIDE_REL_TOL):
        raise NoBranchError("prescribed pi does not divide: not a branch")
    max_deg = 1 if eq.mode == EXTENDED else 0
    if g.degree > max_deg:
        raise NoBranchError("recovered g exceeds the mode's degree bound")
    s = pi - eq.half_gap()
    d = radicand(eq, g)
    if _is_negligible(d, d.max_abs(), 1e-14) and _is_negligible(
        s, s.max_abs(), 1e-14
    ):
        return PiBranch(g, Poly.zero(eq.backend), eq.half_gap(), 0)
    sign = 1
    try:
        s_hat, rem_hat = d.sqrt_head()
    except ValueError:
        s_hat, rem_hat = None, None
    if s_hat is not None:
        if (s_hat - s).to_float().max_abs() <= 1e-8 * max(1.0, s.to_float().max_abs()):
            sign = 1
        elif (s_hat + s).to_float().max_abs() <= 1e-8 * max(
            1.0, s.to_float().max_abs()
        ):
            sign = -1
    return PiBranch(g, s if sign == 1 else -s, pi, sign)


# -- reduction, quantization, prefactor --------------------------------------


def reduce_branch(eq: NuEquation, b: PiBranch) -> ReducedForm:
    """tau = tau~ + 2 pi and h = sigma_bar / sigma, where
    sigma_bar = sigma~ + pi^2 + pi (tau~ - sigma') + pi' sigma.
    A nonzero division remainder marks an inadmissible branch."""
    if b.backend != eq.backend:
        eq = eq.to_float()
    pi = b.pi
    sigma_bar = (
        eq.sigma_tilde
        + pi * pi
        + pi * (eq.tau_tilde - eq.sigma.derivative())
        + pi.derivative() * eq.sigma
    )
    h, rem = sigma_bar.divrem(eq.sigma)
    if not _is_negligible(rem, max(sigma_bar.max_abs(), 1.0), DIVIDE_REL_TOL):
        raise NoBranchError(
            "sigma_bar is not divisible by sigma: inadmissible branch"
        )
    tau = eq.tau_tilde + pi + pi
    max_h = 1 if eq.mode == EXTENDED else 0
    if h.degree > max_h:
        raise NoBranchError("reduced h exceeds the mode's degree bound")
    return ReducedForm(tau, h)


def quantization(eq: NuEquation, b: PiBranch, n: int) -> QuantizationRelation:
    """Degree-n termination constraints for the reduced equation.

    Extended mode matches h against
    h_n = -(n/2) tau' - (n(n-1)/6) sigma'' + C_n, whose z-slope is
    -n tau[2] - n(n-1) sigma[3]; the constant equation only fixes C_n
    (reported as constant_offset, with the sigma'' term dropped when
    deg sigma <= 2). Classic mode reports lambda_n = -n tau' -
    (n(n-1)/2) sigma'' and the residual h - lambda_n.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    rf = reduce_branch(eq, b)
    backend = rf.h.backend
    eqb = eq if eq.backend == backend else eq.to_float()
    if eq.mode == CLASSIC:
        lam_n = (
            -n * rf.tau.coeff(1)
            - as_scalar(n * (n - 1), backend) * eqb.sigma.coeff(2)
        )
        resid = rf.h.coeff(0) - lam_n
        return QuantizationRelation(
            n, CLASSIC, slope_residual=resid, lambda_n=lam_n
        )
    slope = (
        rf.h.coeff(1)
        + as_scalar(n, backend) * rf.tau.coeff(2)
        + as_scalar(n * (n - 1), backend) * eqb.sigma.coeff(3)
    )
    c_n = rf.h.coeff(0) + as_scalar(Fraction(n, 2), backend) * rf.tau.coeff(1)
    if eqb.sigma.degree == 3:
        c_n = c_n + as_scalar(Fraction(n * (n - 1), 3), backend) * eqb.sigma.coeff(2)
    return QuantizationRelation(
        n, EXTENDED, slope_residual=slope, constant_offset=c_n
    )


def phi_factor(eq: NuEquation, b: PiBranch) -> PhiFactor:
    """Prefactor phi with phi'/phi = pi/sigma, as exp of a polynomial
    times powers of (z - root) over the simple roots of sigma."""
    eqb = eq if eq.backend == b.backend else eq.to_float()
    quot, _ = b.pi.divrem(eqb.sigma)
    backend = quot.backend
    exp_part = Poly(
        [as_scalar(0, backend)]
        + [
            c * as_scalar(Fraction(1, k + 1), backend)
            if backend == EXACT
            else c / (k + 1)
            for k, c in enumerate(quot.coeffs)
        ],
        backend,
    )
    roots = eqb.sigma.to_float().roots()
    for i, r1 in enumerate(roots):
        for r2 in roots[i + 1 :]:
            if abs(r1 - r2) < 1e-8 * max(1.0, abs(r1), abs(r2)):
                raise ValueError(
                    "sigma has a repeated root; prefactor shape out of scope"
                )
    sig_der = eqb.sigma.to_float().derivative()
    pi_f = b.pi.to_float()
    powers = tuple(
        (r, pi_f(r) / sig_der(r)) for r in roots
    )
    return PhiFactor(exp_part, powers)


# -- polynomial solutions -----------------------------------------------------


def _nullspace_exact(rows):
    """Kernel basis of a small exact matrix (list of RationalComplex
    rows) by Gauss-Jordan elimination."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = as_scalar(1, EXACT) / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                factor = mat[i][c]
                mat[i] = [a - factor * bv for a, bv in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [as_scalar(0, EXACT)] * ncols
        vec[fc] = as_scalar(1, EXACT)
        for pr, pc in enumerate(pivots):
            vec[pc] = -mat[pr][fc]
        basis.append(vec)
    return basis


def polynomial_solution(eq: NuEquation, b: PiBranch, n: int, accessory=None) -> Poly:
    """Degree-n polynomial solution of sigma y'' + tau y' + h y = 0.

    Assembles the (n+2) x (n+1) coefficient map and extracts its null
    space, which must be one-dimensional with a nonzero top coefficient;
    the monic representative is returned. If `accessory` is given it is
    applied as the standard shift (sigma~ -> sigma~ - accessory * sigma,
    h -> h - accessory) before solving.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    rf = reduce_branch(eq, b)
    backend = rf.h.backend
    eqb = eq if eq.backend == backend else eq.to_float()
    h = rf.h
    if accessory is not None:
        h = h - Poly.constant(as_scalar(accessory, backend), backend)
    sigma, tau = eqb.sigma, rf.tau
    columns = []
    for j in range(n + 1):
        mono = Poly([0] * j + [1], backend)
        image = (
            sigma * mono.derivative().derivative()
            + tau * mono.derivative()
            + h * mono
        )
        columns.append([image.coeff(k) for k in range(n + 2)])
    if backend == EXACT:
        rows = [
            [columns[j][k] for j in range(n + 1)] for k in range(n + 2)
        ]
        kernel = _nullspace_exact(rows)
        if len(kernel) != 1:
            raise NoBranchError(
                "null space dimension is %d, not 1 (wrong accessory value "
                "or degenerate parameters)" % len(kernel)
            )
        vec = kernel[0]
        if not vec[n]:
            raise NoBranchError(
                "polynomial solution has degree below %d (wrong accessory "
                "value)" % n
            )
        lead = vec[n]
        return Poly([v / lead for v in vec], EXACT)
    mat = np.array(
        [[complex(columns[j][k]) for j in range(n + 1)] for k in range(n + 2)],
        dtype=complex,
    )
    _, svals, vh = np.linalg.svd(mat)
    smax = svals[0] if len(svals) else 0.0
    if smax == 0.0:
        raise NoBranchError("coefficient map vanishes; parameters degenerate")
    small = [s for s in svals if s <= 1e-7 * smax]
    if len(svals) < n + 1 or len(small) != 1:
        raise NoBranchError(
            "null space dimension is %d, not 1 (wrong accessory value or "
            "degenerate parameters)" % len(small)
        )
    vec = np.conj(vh[-1])
    if abs(vec[n]) <= 1e-7 * np.max(np.abs(vec)):
        raise NoBranchError(
            "polynomial solution has degree below %d (wrong accessory value)" % n
        )
    vec = vec / vec[n]
    return Poly([complex(v) for v in vec], FLOAT)
