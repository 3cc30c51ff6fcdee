"""Confluent Heun equation: polynomial-solution classes and accessory values.

The equation in polynomial form is

    sigma y'' + tau~ y' + ((mu + nu) z - mu) y = 0,
    sigma = z(z-1),
    tau~  = alpha z(z-1) + (beta + 1)(z-1) + (gamma + 1) z,

with regular singular points 0 and 1 and an irregular point at
infinity. Polynomial solutions come in eight classes, one per subset of
the three elementary prefactor pieces exp(-alpha z), z^(-beta), and
(z-1)^(-gamma). Each class fixes mu + nu as alpha times a linear
function of the degree n; the split between mu and nu is the accessory
freedom, resolved by a degree n+1 truncation condition.
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
from .scalars import EXACT, as_scalar, infer_backend

RELATION_TOL = 1e-8


@dataclass(frozen=True)
class CheParams:
    """Parameters (alpha, beta, gamma; mu, nu)."""

    alpha: object
    beta: object
    gamma: object
    mu: object
    nu: object

    def __post_init__(self):
        values = [self.alpha, self.beta, self.gamma, self.mu, self.nu]
        backend = infer_backend(values)
        for name in ("alpha", "beta", "gamma", "mu", "nu"):
            object.__setattr__(self, name, as_scalar(getattr(self, name), backend))
        object.__setattr__(self, "_backend", backend)

    @property
    def backend(self):
        return self._backend

    @property
    def coupling(self):
        return self.mu + self.nu


def che_auxiliary(p: CheParams):
    """The alternate accessory pair (delta_aux, eta_aux) used by the
    other common normal form of the equation:

        delta_aux = mu + nu - (alpha/2)(beta + gamma + 2)
        eta_aux   = (alpha/2)(beta + 1) - mu - (beta + gamma + beta*gamma)/2
    """
    backend = p.backend
    half = as_scalar(Fraction(1, 2), backend)
    two = as_scalar(2, backend)
    delta_aux = p.mu + p.nu - p.alpha * half * (p.beta + p.gamma + two)
    eta_aux = (
        p.alpha * half * (p.beta + as_scalar(1, backend))
        - p.mu
        - (p.beta + p.gamma + p.beta * p.gamma) * half
    )
    return delta_aux, eta_aux


@dataclass(frozen=True)
class CheClass:
    """One polynomial-solution class. flags mark which prefactor pieces
    (exp(-alpha z), z^(-beta), (z-1)^(-gamma)) the eigenfunction uses;
    coupling_value gives the class condition on mu + nu."""

    label: str
    flags: tuple
    _shift: tuple  # (const, beta coeff, gamma coeff, n coeff) of (mu+nu)/alpha

    def pi(self, p: CheParams) -> Poly:
        backend = p.backend
        z = Poly.x(backend)
        one = Poly.one(backend)
        parts = (
            z * (z - one) * (-p.alpha),
            (z - one) * (-p.beta),
            z * (-p.gamma),
        )
        out = Poly.zero(backend)
        for flag, part in zip(self.flags, parts):
            if flag:
                out = out + part
        return out

    def coupling_value(self, n: int, alpha, beta, gamma):
        """The value of mu + nu admitting degree-n solutions."""
        if n < 0:
            raise ValueError("degree must be nonnegative")
        c0, cb, cg, cn = self._shift
        return alpha * (beta * cb + gamma * cg + (c0 + cn * n))

    def prefactor_exponents(self, p: CheParams):
        """(coefficient of z in exp part, power at 0, power at 1)."""
        zero = as_scalar(0, p.backend)
        return (
            -p.alpha if self.flags[0] else zero,
            -p.beta if self.flags[1] else zero,
            -p.gamma if self.flags[2] else zero,
        )


CHE_CLASSES = (
    CheClass("1", (1, 1, 1), (2, 0, 0, 1)),
    CheClass("2", (0, 0, 0), (0, 0, 0, -1)),
    CheClass("3", (0, 0, 1), (0, 0, 1, -1)),
    CheClass("4", (1, 1, 0), (2, 0, 1, 1)),
    CheClass("5", (0, 1, 1), (0, 1, 1, -1)),
    CheClass("6", (1, 0, 0), (2, 1, 1, 1)),
    CheClass("7", (0, 1, 0), (0, 1, 0, -1)),
    CheClass("8", (1, 0, 1), (2, 1, 0, 1)),
)

_BY_LABEL = {c.label: c for c in CHE_CLASSES}


def che_class(label) -> CheClass:
    key = str(label)
    try:
        return _BY_LABEL[key]
    except KeyError:
        raise ValueError(
            "unknown class %r; expected one of %s"
            % (label, ", ".join(c.label for c in CHE_CLASSES))
        ) from None


def che_to_nu(p: CheParams) -> NuEquation:
    backend = p.backend
    z = Poly.x(backend)
    one = Poly.one(backend)
    unit = as_scalar(1, backend)
    sigma = z * (z - one)
    tau_tilde = (
        sigma * p.alpha + (z - one) * (p.beta + unit) + z * (p.gamma + unit)
    )
    sigma_tilde = (z * (p.mu + p.nu) - Poly.constant(p.mu, backend)) * sigma
    return NuEquation(tau_tilde, sigma, sigma_tilde, EXTENDED)


def che_params_for_class(label, n: int, alpha, beta, gamma, mu=0) -> CheParams:
    """Parameters of the given class at degree n: mu + nu is set from
    the class closed form; mu is the remaining accessory freedom."""
    cls = che_class(label)
    backend = infer_backend([alpha, beta, gamma, mu])
    alpha = as_scalar(alpha, backend)
    beta = as_scalar(beta, backend)
    gamma = as_scalar(gamma, backend)
    mu = as_scalar(mu, backend)
    coupling = cls.coupling_value(n, alpha, beta, gamma)
    return CheParams(alpha, beta, gamma, mu, coupling - mu)


def che_branch(p: CheParams, label) -> PiBranch:
    cls = che_class(label)
    return branch_from_pi(che_to_nu(p), cls.pi(p))


def che_class_relation(p: CheParams, label, n: int):
    """Residual of the class condition on mu + nu at degree n; zero
    exactly when degree-n polynomial solutions are admissible."""
    cls = che_class(label)
    return p.coupling - cls.coupling_value(n, p.alpha, p.beta, p.gamma)


def _check_relation(p, label, n):
    gap = che_class_relation(p, label, n)
    scale = max(1.0, abs(p.coupling), abs(p.alpha))
    ok = (not gap) if p.backend == EXACT else abs(gap) <= RELATION_TOL * scale
    if not ok:
        raise NoBranchError(
            "class %s does not admit degree-%d solutions at these "
            "parameters (mu + nu off by %s)" % (label, n, gap)
        )


def che_accessory(p: CheParams, label, n: int, tol=TERMINATION_TOL, point=0):
    """Accessory values mu admitting a degree-n class solution (the mu
    stored in p is ignored; mu + nu is held at the class value). Roots
    of the degree n+1 truncation condition, validated against the
    series oracle.

    The expansion point may be moved to z=1 when the exponent gap at
    z=0 is a positive integer (the truncation roots do not depend on
    the expansion point)."""
    _check_relation(p, label, n)
    cls = che_class(label)
    zero = as_scalar(0, p.backend)
    p0 = replace(p, mu=zero, nu=p.coupling)
    eq0 = che_to_nu(p0)
    branch = branch_from_pi(eq0, cls.pi(p0))
    rf = reduce_branch(eq0, branch)
    direction = Poly.constant(as_scalar(-1, p.backend), p.backend)
    family = OdeFamily(rf.ode(eq0), direction)
    return termination_solve(family, n, point=point, tol=tol)


def che_eigenstate(p: CheParams, label, n: int) -> Eigenstate:
    """Assembled degree-n eigenfunction of the given class at the
    accessory value carried by p.mu, with its contour residual."""
    _check_relation(p, label, n)
    cls = che_class(label)
    eq = che_to_nu(p)
    branch = branch_from_pi(eq, cls.pi(p))
    qr = quantization(eq, branch, n)
    poly = polynomial_solution(eq, branch, n)
    phi = phi_factor(eq, branch)
    res = ode_residual(SimpleNamespace(poly=poly, phi=phi), eq.psi_ode())
    return Eigenstate(
        n=n, accessory=p.mu, quantization=qr, phi=phi, poly=poly, residual=res
    )
