"""General Heun equation: polynomial-solution classes and accessory values.

The equation in polynomial form is

    sigma y'' + tau~ y' + (alpha beta z - q) y = 0,
    sigma = z(z-1)(z-a),
    tau~  = gamma (z-1)(z-a) + delta z(z-a) + epsilon z(z-1),

with regular singular points 0, 1, a, infinity, the exponent-sum
constraint epsilon = alpha + beta - gamma - delta + 1, and free
accessory parameter q. Polynomial solutions come in eight classes,
indexed by which of the three finite singular points contributes its
shifted local exponent (1-gamma at 0, 1-delta at 1, 1-epsilon at a) to
the eigenfunction prefactor. Each class fixes the product alpha*beta as
a function of the degree n, and admits finitely many q, the roots of a
degree n+1 truncation condition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from types import SimpleNamespace

from .engine import (
    EXTENDED,
    Eigenstate,
    NoBranchError,
    NuEquation,
    PiBranch,
    branch_from_pi,
    phi_factor,
    polynomial_solution,
    quantization,
    reduce_branch,
)
from .oracle import OdeFamily, TERMINATION_TOL, ode_residual, termination_solve
from .poly import Poly
from .scalars import EXACT, as_scalar, infer_backend, scalar_sqrt

RELATION_TOL = 1e-8


@dataclass(frozen=True)
class HeunParams:
    """Parameters (a; q; alpha, beta, gamma, delta, epsilon)."""

    a: object
    q: object
    alpha: object
    beta: object
    gamma: object
    delta: object
    epsilon: object

    def __post_init__(self):
        values = [self.a, self.q, self.alpha, self.beta, self.gamma,
                  self.delta, self.epsilon]
        backend = infer_backend(values)
        for name in ("a", "q", "alpha", "beta", "gamma", "delta", "epsilon"):
            object.__setattr__(self, name, as_scalar(getattr(self, name), backend))
        object.__setattr__(self, "_backend", backend)
        if abs(self.a) <= 1e-12 or abs(self.a - as_scalar(1, backend)) <= 1e-12:
            raise ValueError("the third singular point a must differ from 0 and 1")
        gap = self.epsilon - (
            self.alpha + self.beta - self.gamma - self.delta + as_scalar(1, backend)
        )
        ok = (not gap) if backend == EXACT else abs(gap) <= 1e-10 * max(
            1.0, abs(self.epsilon)
        )
        if not ok:
            raise ValueError(
                "exponent-sum constraint violated: epsilon must equal "
                "alpha + beta - gamma - delta + 1 (gap %s)" % (gap,)
            )

    @property
    def backend(self):
        return self._backend

    @property
    def product(self):
        return self.alpha * self.beta


@dataclass(frozen=True)
class HeunClass:
    """One polynomial-solution class. flags mark which finite singular
    points (0, 1, a) use their shifted exponent in the prefactor."""

    label: str
    flags: tuple

    def pi(self, p: HeunParams) -> Poly:
        backend = p.backend
        z = Poly.x(backend)
        one = Poly.one(backend)
        ac = Poly.constant(p.a, backend)
        unit = as_scalar(1, backend)
        parts = (
            (z - one) * (z - ac) * (unit - p.gamma),
            z * (z - ac) * (unit - p.delta),
            z * (z - one) * (unit - p.epsilon),
        )
        out = Poly.zero(backend)
        for flag, part in zip(self.flags, parts):
            if flag:
                out = out + part
        return out

    def exponents(self, p: HeunParams) -> tuple:
        """Local prefactor exponents at (0, 1, a)."""
        unit = as_scalar(1, p.backend)
        zero = as_scalar(0, p.backend)
        vals = (unit - p.gamma, unit - p.delta, unit - p.epsilon)
        return tuple(v if f else zero for f, v in zip(self.flags, vals))

    def product_value(self, n: int, gamma, delta, epsilon):
        """The value of alpha*beta admitting degree-n solutions."""
        if n < 0:
            raise ValueError("degree must be nonnegative")
        trio = (gamma, delta, epsilon)
        inside = [v for f, v in zip(self.flags, trio) if f]
        outside = [v for f, v in zip(self.flags, trio) if not f]
        if len(inside) == 0:
            return -n * (gamma + delta + epsilon + (n - 1))
        if len(inside) == 1:
            return (inside[0] - (n + 1)) * (outside[0] + outside[1] + n)
        if len(inside) == 2:
            return (inside[0] + inside[1] - (n + 2)) * (outside[0] + (n + 1))
        return (n + 2) * (gamma + delta + epsilon - (n + 3))


HEUN_CLASSES = (
    HeunClass("I", (0, 0, 0)),
    HeunClass("II", (1, 0, 0)),
    HeunClass("III", (0, 1, 0)),
    HeunClass("IV", (1, 1, 0)),
    HeunClass("V", (0, 0, 1)),
    HeunClass("VI", (1, 0, 1)),
    HeunClass("VII", (0, 1, 1)),
    HeunClass("VIII", (1, 1, 1)),
)

_BY_LABEL = {c.label: c for c in HEUN_CLASSES}


def heun_class(label: str) -> HeunClass:
    try:
        return _BY_LABEL[label.upper()]
    except KeyError:
        raise ValueError(
            "unknown class %r; expected one of %s"
            % (label, ", ".join(c.label for c in HEUN_CLASSES))
        ) from None


def heun_nu_from_product(a, q, product, gamma, delta, epsilon) -> NuEquation:
    """Equation built from alpha*beta directly (the split into alpha and
    beta never enters the polynomial form)."""
    backend = infer_backend([a, q, product, gamma, delta, epsilon])
    a = as_scalar(a, backend)
    q = as_scalar(q, backend)
    product = as_scalar(product, backend)
    z = Poly.x(backend)
    one = Poly.one(backend)
    ac = Poly.constant(a, backend)
    sigma = z * (z - one) * (z - ac)
    tau_tilde = (
        (z - one) * (z - ac) * as_scalar(gamma, backend)
        + z * (z - ac) * as_scalar(delta, backend)
        + z * (z - one) * as_scalar(epsilon, backend)
    )
    sigma_tilde = (z * product - Poly.constant(q, backend)) * sigma
    return NuEquation(tau_tilde, sigma, sigma_tilde, EXTENDED)


def heun_to_nu(p: HeunParams) -> NuEquation:
    return heun_nu_from_product(
        p.a, p.q, p.product, p.gamma, p.delta, p.epsilon
    )


def heun_params_for_class(
    label: str, n: int, a, gamma, delta, epsilon, q=0
) -> HeunParams:
    """Parameters of the given class at degree n: alpha*beta is set from
    the class closed form and split using the exponent-sum constraint
    alpha + beta = gamma + delta + epsilon - 1."""
    cls = heun_class(label)
    backend = infer_backend([a, gamma, delta, epsilon, q])
    gamma = as_scalar(gamma, backend)
    delta = as_scalar(delta, backend)
    epsilon = as_scalar(epsilon, backend)
    product = cls.product_value(n, gamma, delta, epsilon)
    total = gamma + delta + epsilon - as_scalar(1, backend)
    disc = total * total - 4 * product
    root = scalar_sqrt(disc, backend)
    half = as_scalar(Fraction(1, 2), backend)
    alpha = (total + root) * half
    beta = (total - root) * half
    return HeunParams(a, q, alpha, beta, gamma, delta, epsilon)


def heun_branch(p: HeunParams, label: str) -> PiBranch:
    cls = heun_class(label)
    return branch_from_pi(heun_to_nu(p), cls.pi(p))


def heun_class_relation(p: HeunParams, label: str, n: int):
    """Residual of the class condition on alpha*beta at degree n; zero
    exactly when degree-n polynomial solutions are admissible."""
    cls = heun_class(label)
    return p.product - cls.product_value(n, p.gamma, p.delta, p.epsilon)


def _check_relation(p, label, n):
    gap = heun_class_relation(p, label, n)
    scale = max(1.0, abs(p.product))
    ok = (not gap) if p.backend == EXACT else abs(gap) <= RELATION_TOL * scale
    if not ok:
        raise NoBranchError(
            "class %s does not admit degree-%d solutions at these "
            "parameters (alpha*beta off by %s)" % (label, n, gap)
        )


def heun_accessory(p: HeunParams, label: str, n: int, tol=TERMINATION_TOL):
    """Accessory values q admitting a degree-n class solution (the q
    stored in p is ignored). Roots of the degree n+1 truncation
    condition, validated against the series oracle."""
    _check_relation(p, label, n)
    cls = heun_class(label)
    p0 = replace(p, q=as_scalar(0, p.backend))
    eq0 = heun_to_nu(p0)
    branch = branch_from_pi(eq0, cls.pi(p0))
    rf = reduce_branch(eq0, branch)
    direction = Poly.constant(as_scalar(-1, p.backend), p.backend)
    family = OdeFamily(rf.ode(eq0), direction)
    return termination_solve(family, n, tol=tol)


def heun_eigenstate(p: HeunParams, label: str, n: int) -> Eigenstate:
    """Assembled degree-n eigenfunction of the given class at the
    accessory value carried by p.q, with its contour residual."""
    _check_relation(p, label, n)
    cls = heun_class(label)
    eq = heun_to_nu(p)
    branch = branch_from_pi(eq, cls.pi(p))
    qr = quantization(eq, branch, n)
    poly = polynomial_solution(eq, branch, n)
    phi = phi_factor(eq, branch)
    res = ode_residual(SimpleNamespace(poly=poly, phi=phi), eq.psi_ode())
    return Eigenstate(
        n=n, accessory=p.q, quantization=qr, phi=phi, poly=poly, residual=res
    )
