"""Command-line front end.

Three subcommands: `classify` enumerates the polynomial-reduction
branches of an equation given by its three coefficient polynomials and
labels the ones matching a known family class; `solve` resolves the
accessory parameter for a (family, class, degree) request and assembles
the eigenfunctions with their contour residuals; `app` runs one of the
bundled model problems and reports closed-form values next to their
verification residuals.

Exit codes: 0 all checks passed, 2 usage or parse error, 3 no solution
exists (no branch / no accessory root / class relation violated),
4 a verification residual exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from types import SimpleNamespace

from .apps import (
    ANTISYMMETRIC,
    SYMMETRIC,
    coulomb3s_verify,
    doublewell_verify,
    electrons_sphere_state,
)
from .che import (
    CHE_CLASSES,
    CheParams,
    che_accessory,
    che_eigenstate,
    che_params_for_class,
    che_to_nu,
)
from .engine import (
    CLASSIC,
    EXTENDED,
    NoBranchError,
    NuEquation,
    enumerate_branches,
    reduce_branch,
)
from .heun import (
    HEUN_CLASSES,
    HeunParams,
    heun_accessory,
    heun_eigenstate,
    heun_params_for_class,
    heun_to_nu,
)
from .oracle import ode_residual
from .poly import Poly, format_poly, parse_poly
from .scalars import (
    EXACT,
    FLOAT,
    RationalComplex,
    format_scalar,
    parse_scalar,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_SOLUTION = 3
EXIT_VERIFICATION = 4

DEFAULT_TOLERANCES = {
    "residual": 1e-8,
    "relation": 1e-9,
    "termination": 1e-8,
    "bethe": 1e-8,
}

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Run-wide settings shared by all subcommands."""

    backend: str = FLOAT
    tolerances: dict = None
    fmt: str = "table"
    samples: int = 50

    def __post_init__(self):
        tols = dict(DEFAULT_TOLERANCES)
        tols.update(self.tolerances or {})
        if any(v <= 0 for v in tols.values()):
            raise ValueError("tolerances must be positive")
        if self.samples < 8:
            raise ValueError("sample count must be at least 8")
        object.__setattr__(self, "tolerances", tols)


# -- serialization ------------------------------------------------------------


def _real_json(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, float) and value == int(value) and abs(value) < 1e15:
        return value
    return value


def _scalar_json(value):
    if isinstance(value, RationalComplex):
        return {"re": _real_json(value.re), "im": _real_json(value.im)}
    if isinstance(value, complex):
        if value.imag == 0:
            return value.real
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Fraction):
        return _real_json(value)
    return value


def _poly_json(p: Poly):
    return {
        "coeffs": [_scalar_json(c) for c in p.coeffs],
        "text": format_poly(p),
    }


def _check(name: str, value: float, tolerance: float):
    return {
        "name": name,
        "value": value,
        "tolerance": tolerance,
        "passed": bool(value <= tolerance),
    }


def _emit_json(payload: dict):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _emit_csv(rows):
    """Rows are dicts with a common key set; header from the first."""
    rows = list(rows)
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)


def _cell(value) -> str:
    if isinstance(value, Poly):
        return format_poly(value)
    if isinstance(value, (RationalComplex, complex)):
        return format_scalar(value)
    return str(value)


def _emit_table(lines):
    for line in lines:
        print(line)


def _checks_exit(checks) -> int:
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_VERIFICATION


# -- family detection ---------------------------------------------------------


def _accessory_quotient(eq: NuEquation):
    """sigma~ / sigma when the division is exact and affine, else None."""
    quot, rem = eq.sigma_tilde.divrem(eq.sigma)
    scale = max(eq.sigma_tilde.max_abs(), 1.0)
    if rem.to_float().max_abs() > 1e-10 * scale or quot.degree > 1:
        return None
    return quot


def _match_heun(eq: NuEquation):
    """Exponent parameters when sigma = z(z-1)(z-a) and sigma~ factors
    through sigma, else None. The alpha/beta split is never needed for
    branch labeling, so the product is carried unsplit."""
    sig = eq.sigma
    if eq.mode != EXTENDED or sig.degree != 3:
        return None
    if abs(complex(sig.coeff(3)) - 1) > 1e-12 or abs(complex(sig.coeff(0))) > 1e-12:
        return None
    a = sig.coeff(1)
    if abs(complex(sig.coeff(2)) + complex(a) + 1) > 1e-10 * max(
        1.0, abs(complex(a))
    ):
        return None
    if min(abs(complex(a)), abs(complex(a) - 1)) < 1e-12:
        return None
    quot = _accessory_quotient(eq)
    if quot is None:
        return None
    tt = eq.tau_tilde
    return SimpleNamespace(
        a=a,
        gamma=tt(0) / a,
        delta=tt(1) / (1 - a),
        epsilon=tt(a) / (a * (a - 1)),
        q=-quot.coeff(0),
        product=quot.coeff(1),
        backend=eq.backend,
    )


def _match_che(eq: NuEquation):
    """CheParams when sigma = z(z-1) and sigma~ factors through sigma,
    else None."""
    sig = eq.sigma
    if eq.mode != EXTENDED or sig.degree != 2:
        return None
    shape = Poly([0, -1, 1], eq.backend) - sig
    if shape.to_float().max_abs() > 1e-12:
        return None
    quot = _accessory_quotient(eq)
    if quot is None:
        return None
    tt = eq.tau_tilde
    alpha = tt.coeff(2)
    beta = -1 - tt(0)
    gamma = tt(1) - 1
    mu = -quot.coeff(0)
    nu = quot.coeff(1) - mu
    return CheParams(alpha, beta, gamma, mu, nu)


def _branch_label(branch, heun_p, che_p) -> str:
    """Class label whose catalog pi matches the branch, or ''."""
    scale = max(branch.pi.to_float().max_abs(), 1.0)
    if heun_p is not None:
        for cls in HEUN_CLASSES:
            gap = (branch.pi - cls.pi(heun_p)).to_float().max_abs()
            if gap <= 1e-8 * scale:
                return cls.label
    if che_p is not None:
        for cls in CHE_CLASSES:
            gap = (branch.pi - cls.pi(che_p)).to_float().max_abs()
            if gap <= 1e-8 * scale:
                return cls.label
    return ""


# -- classify -----------------------------------------------------------------


def cmd_classify(args, config: RunConfig) -> int:
    backend = config.backend
    eq = NuEquation(
        parse_poly(args.tau, backend),
        parse_poly(args.sigma, backend),
        parse_poly(args.sigma_tilde, backend),
        mode=args.mode,
    )
    branches = enumerate_branches(eq)
    heun_p = _match_heun(eq) if args.mode == EXTENDED else None
    che_p = _match_che(eq) if args.mode == EXTENDED else None
    family = "heun" if heun_p is not None else "che" if che_p is not None else ""
    entries = []
    for branch in branches:
        reduced = reduce_branch(eq, branch)
        entries.append(
            {
                "sign": branch.sign,
                "class": _branch_label(branch, heun_p, che_p),
                "g": branch.g,
                "pi": branch.pi,
                "tau": reduced.tau,
                "h": reduced.h,
            }
        )
    if config.fmt == "json":
        _emit_json(
            {
                "schema": SCHEMA_VERSION,
                "command": "classify",
                "backend": backend,
                "mode": args.mode,
                "family": family,
                "branches": [
                    {
                        "sign": e["sign"],
                        "class": e["class"],
                        "g": _poly_json(e["g"]),
                        "pi": _poly_json(e["pi"]),
                        "tau": _poly_json(e["tau"]),
                        "h": _poly_json(e["h"]),
                    }
                    for e in entries
                ],
            }
        )
    elif config.fmt == "csv":
        _emit_csv(
            {
                "index": k,
                "class": e["class"],
                "sign": e["sign"],
                "g": _cell(e["g"]),
                "pi": _cell(e["pi"]),
                "tau": _cell(e["tau"]),
                "h": _cell(e["h"]),
            }
            for k, e in enumerate(entries)
        )
    else:
        lines = ["%d branches (%s mode)%s" % (
            len(entries), args.mode, " family: " + family if family else "")]
        for k, e in enumerate(entries):
            tag = " class %s" % e["class"] if e["class"] else ""
            lines.append("branch %d  sign %+d%s" % (k, e["sign"], tag))
            for key in ("g", "pi", "tau", "h"):
                lines.append("  %-4s %s" % (key, _cell(e[key])))
        _emit_table(lines)
    return EXIT_OK


# -- solve --------------------------------------------------------------------


def _scalar_arg(text: str, backend: str):
    try:
        return parse_scalar(text, backend)
    except ValueError as exc:
        raise UsageError(str(exc))


class UsageError(Exception):
    pass


def _float_heun(p: HeunParams) -> HeunParams:
    return HeunParams(*(complex(getattr(p, f)) for f in (
        "a", "q", "alpha", "beta", "gamma", "delta", "epsilon")))


def _float_che(p: CheParams) -> CheParams:
    return CheParams(*(complex(getattr(p, f)) for f in (
        "alpha", "beta", "gamma", "mu", "nu")))


def _solve_states(args, config: RunConfig):
    """Family params plus one assembled eigenstate per accessory value.

    Resolved accessory roots are always floats, so exact-backend runs
    assemble the eigenstates on the float copy of the parameters."""
    backend = config.backend
    n = args.n
    if args.family == "heun":
        p = heun_params_for_class(
            args.label,
            n,
            _scalar_arg(args.a, backend),
            _scalar_arg(args.gamma, backend),
            _scalar_arg(args.delta, backend),
            _scalar_arg(args.epsilon, backend),
        )
        if args.accessory is not None:
            values = [_scalar_arg(args.accessory, backend)]
        else:
            values = heun_accessory(p, args.label, n)
        states = []
        for v in values:
            pv = p if isinstance(v, RationalComplex) else _float_heun(p)
            states.append(heun_eigenstate(replace(pv, q=v), args.label, n))
        return p, states
    p = che_params_for_class(
        args.label,
        n,
        _scalar_arg(args.alpha, backend),
        _scalar_arg(args.beta, backend),
        _scalar_arg(args.gamma, backend),
    )
    if args.accessory is not None:
        values = [_scalar_arg(args.accessory, backend)]
    else:
        values = che_accessory(p, args.label, n)
    states = []
    for v in values:
        if isinstance(v, RationalComplex):
            states.append(
                che_eigenstate(
                    replace(p, mu=v, nu=p.coupling - v), args.label, n
                )
            )
        else:
            pf = _float_che(p)
            nu = complex(p.coupling) - complex(v)
            states.append(
                che_eigenstate(replace(pf, mu=v, nu=nu), args.label, n)
            )
    return p, states


def cmd_solve(args, config: RunConfig) -> int:
    needed = ("a", "delta", "epsilon") if args.family == "heun" else ("alpha", "beta")
    missing = [f for f in needed if getattr(args, f) is None]
    if missing:
        raise UsageError(
            "%s solve requires %s"
            % (args.family, ", ".join("--" + f for f in missing))
        )
    p, states = _solve_states(args, config)
    if not states:
        raise NoBranchError("no accessory value admits a terminating solution")
    tol = config.tolerances["residual"]
    checks = []
    entries = []
    for state in states:
        residual = state.residual
        if config.samples != 50:
            v = state.accessory
            if args.family == "heun":
                pv = p if isinstance(v, RationalComplex) else _float_heun(p)
                eq = heun_to_nu(replace(pv, q=v))
            else:
                if isinstance(v, RationalComplex):
                    eq = che_to_nu(replace(p, mu=v, nu=p.coupling - v))
                else:
                    pf = _float_che(p)
                    eq = che_to_nu(
                        replace(pf, mu=v, nu=complex(p.coupling) - complex(v))
                    )
            residual = ode_residual(state, eq.psi_ode(), config.samples)
        check = _check("residual", residual, tol)
        checks.append(check)
        entries.append((state, residual, check))
    if config.fmt == "json":
        _emit_json(
            {
                "schema": SCHEMA_VERSION,
                "command": "solve",
                "backend": config.backend,
                "family": args.family,
                "class": args.label,
                "n": args.n,
                "states": [
                    {
                        "accessory": _scalar_json(s.accessory),
                        "slope_residual": _scalar_json(
                            s.quantization.slope_residual
                        ),
                        "constant_offset": _scalar_json(
                            s.quantization.constant_offset
                        ),
                        "poly": _poly_json(s.poly),
                        "phi_exp": _poly_json(s.phi.exp_part),
                        "phi_powers": [
                            {"root": _scalar_json(r), "exponent": _scalar_json(e)}
                            for r, e in s.phi.powers
                        ],
                        "residual": res,
                        "check": chk,
                    }
                    for s, res, chk in entries
                ],
            }
        )
    elif config.fmt == "csv":
        _emit_csv(
            {
                "accessory": _cell(s.accessory),
                "residual": res,
                "slope_residual": _cell(s.quantization.slope_residual),
                "poly": _cell(s.poly),
                "passed": chk["passed"],
            }
            for s, res, chk in entries
        )
    else:
        lines = [
            "%s class %s, degree %d: %d state(s)"
            % (args.family, args.label, args.n, len(entries))
        ]
        for s, res, chk in entries:
            verdict = "PASS" if chk["passed"] else "FAIL"
            lines.append("accessory %s" % _cell(s.accessory))
            lines.append("  poly     %s" % _cell(s.poly))
            lines.append("  phi exp  %s" % _cell(s.phi.exp_part))
            for root, expo in s.phi.powers:
                lines.append(
                    "  phi power (z - %s)^%s" % (_cell(root), _cell(expo))
                )
            lines.append(
                "  residual %.3e  [%s <= %g]" % (res, verdict, tol)
            )
        _emit_table(lines)
    return _checks_exit(checks)


# -- app ----------------------------------------------------------------------


def _app_coulomb(args, config: RunConfig):
    for name in ("n", "m", "gamma"):
        if getattr(args, name) is None:
            raise UsageError("coulomb3s requires --n, --m, --gamma")
    report = coulomb3s_verify(args.n, args.m, float(args.gamma))
    tol = config.tolerances["relation"]
    checks = [
        _check("relation_direct", report.residual_direct, tol),
        _check("relation_flipped", report.residual_flipped, tol),
    ]
    payload = {
        "n": report.n,
        "m": report.m,
        "gamma": report.gamma,
        "energy": _scalar_json(report.energy),
        "s_plus": _scalar_json(report.s_plus),
        "s_minus": _scalar_json(report.s_minus),
        "residual_direct": report.residual_direct,
        "residual_flipped": report.residual_flipped,
    }
    return payload, checks


def _app_electrons(args, config: RunConfig):
    for name in ("n", "gamma", "delta"):
        if getattr(args, name) is None:
            raise UsageError("electrons-sphere requires --n, --gamma, --delta")
    state = electrons_sphere_state(args.n, float(args.gamma), float(args.delta))
    checks = [_check("bethe", state.bethe, config.tolerances["bethe"])]
    payload = {
        "n": state.n,
        "gamma": state.gamma_param,
        "delta": state.delta_param,
        "radius": state.radius,
        "energy": state.energy,
        "accessory": _scalar_json(state.accessory),
        "roots": [_scalar_json(r) for r in state.roots],
        "bethe": state.bethe,
    }
    return payload, checks


def _app_doublewell(args, config: RunConfig):
    for name in ("n", "d", "u0"):
        if getattr(args, name) is None:
            raise UsageError("double-well requires --n, --d, --u0")
    parity = {"symmetric": SYMMETRIC, "antisymmetric": ANTISYMMETRIC}[
        args.parity
    ]
    report = doublewell_verify(args.n, float(args.d), float(args.u0), parity)
    checks = [
        _check(
            "relation", report.relation_residual, config.tolerances["relation"]
        ),
        _check(
            "termination",
            report.termination_residual,
            config.tolerances["termination"],
        ),
    ]
    payload = {
        "N": report.N,
        "parity": report.parity,
        "d": args.d,
        "u0": args.u0,
        "epsilon": report.epsilon,
        "matched_class": report.matched_class,
        "relation_residual": report.relation_residual,
        "resolved_mu": [_scalar_json(v) for v in report.resolved_mu],
        "termination_residual": report.termination_residual,
    }
    return payload, checks


_APPS = {
    "coulomb3s": _app_coulomb,
    "electrons-sphere": _app_electrons,
    "double-well": _app_doublewell,
}


def cmd_app(args, config: RunConfig) -> int:
    payload, checks = _APPS[args.name](args, config)
    if config.fmt == "json":
        _emit_json(
            {
                "schema": SCHEMA_VERSION,
                "command": "app",
                "app": args.name,
                "backend": config.backend,
                "report": payload,
                "checks": checks,
            }
        )
    elif config.fmt == "csv":
        row = {
            k: _cell(v) if not isinstance(v, (list, dict)) else json.dumps(v)
            for k, v in payload.items()
        }
        for chk in checks:
            row[chk["name"] + "_passed"] = chk["passed"]
        _emit_csv([row])
    else:
        lines = ["%s report" % args.name]
        for key, value in payload.items():
            if isinstance(value, list):
                value = ", ".join(str(v) for v in value)
            lines.append("  %-20s %s" % (key, value))
        for chk in checks:
            verdict = "PASS" if chk["passed"] else "FAIL"
            lines.append(
                "  check %-14s %.3e  [%s <= %g]"
                % (chk["name"], chk["value"], verdict, chk["tolerance"])
            )
        _emit_table(lines)
    return _checks_exit(checks)


# -- parser -------------------------------------------------------------------


def _parse_tolerances(pairs):
    out = {}
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep or name not in DEFAULT_TOLERANCES:
            raise UsageError(
                "tolerance must be name=value with name in %s"
                % sorted(DEFAULT_TOLERANCES)
            )
        out[name] = float(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--backend",
        choices=(EXACT, FLOAT),
        default=os.environ.get("HEUNFORGE_BACKEND", FLOAT),
        help="scalar arithmetic backend (env HEUNFORGE_BACKEND)",
    )
    common.add_argument(
        "--format",
        dest="fmt",
        choices=("json", "csv", "table"),
        default="table",
    )
    common.add_argument(
        "--tol",
        action="append",
        metavar="NAME=VALUE",
        help="override a named tolerance (%s)" % ", ".join(DEFAULT_TOLERANCES),
    )
    common.add_argument(
        "--samples", type=int, default=50, help="residual contour sample count"
    )
    parser = argparse.ArgumentParser(
        prog="heunforge",
        description="Polynomial-solution branches, eigenvalue relations, "
        "and model problems for equations with up to four singular points.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cls = sub.add_parser(
        "classify", parents=[common], help="enumerate reduction branches"
    )
    cls.add_argument("--sigma", required=True, help="leading polynomial")
    cls.add_argument("--tau", required=True, help="first-order polynomial")
    cls.add_argument(
        "--sigma-tilde", dest="sigma_tilde", required=True,
        help="zeroth-order polynomial (times sigma)",
    )
    cls.add_argument("--mode", choices=(CLASSIC, EXTENDED), default=EXTENDED)
    cls.set_defaults(func=cmd_classify)

    slv = sub.add_parser(
        "solve", parents=[common], help="resolve accessory values and "
        "assemble eigenfunctions"
    )
    slv.add_argument("family", choices=("heun", "che"))
    slv.add_argument("--class", dest="label", required=True)
    slv.add_argument("-n", type=int, required=True, help="polynomial degree")
    slv.add_argument("--a", help="third finite singular point (heun)")
    slv.add_argument("--alpha", help="exponential scale (che)")
    slv.add_argument("--beta", help="exponent parameter at 0 (che)")
    slv.add_argument("--gamma", required=True)
    slv.add_argument("--delta", help="exponent parameter at 1 (heun)")
    slv.add_argument("--epsilon", help="exponent parameter at a (heun)")
    slv.add_argument(
        "--accessory", help="explicit accessory value (skips resolution)"
    )
    slv.set_defaults(func=cmd_solve)

    app = sub.add_parser(
        "app", parents=[common], help="run a bundled model problem"
    )
    app.add_argument("name", choices=sorted(_APPS))
    app.add_argument("--n", type=int, help="level / degree")
    app.add_argument("--m", type=int, help="angular index (coulomb3s)")
    app.add_argument("--gamma", type=float, help="coupling")
    app.add_argument("--delta", type=float, help="exponent parameter")
    app.add_argument("--d", type=float, help="well width (double-well)")
    app.add_argument("--u0", type=float, help="well depth (double-well)")
    app.add_argument(
        "--parity",
        choices=("symmetric", "antisymmetric"),
        default="symmetric",
    )
    app.set_defaults(func=cmd_app)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else EXIT_OK
    try:
        config = RunConfig(
            backend=args.backend,
            tolerances=_parse_tolerances(args.tol),
            fmt=args.fmt,
            samples=args.samples,
        )
        return args.func(args, config)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except NoBranchError as exc:
        print("no solution: %s" % exc, file=sys.stderr)
        return EXIT_NO_SOLUTION
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ZeroDivisionError as exc:
        print("error: division by zero (%s)" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
