"""Polynomial solutions of Heun-type equations via extended
Nikiforov-Uvarov reduction, verified by an independent Frobenius-series
oracle."""

from .scalars import EXACT, FLOAT, BackendMismatchError, RationalComplex
from .poly import Poly, parse_poly, format_poly
from .engine import (
    CLASSIC,
    EXTENDED,
    Eigenstate,
    NoBranchError,
    NuEquation,
    PhiFactor,
    PiBranch,
    QuantizationRelation,
    ReducedForm,
    branch_from_pi,
    enumerate_branches,
    phi_factor,
    polynomial_solution,
    quantization,
    radicand,
    reduce_branch,
)
from .oracle import (
    OdeFamily,
    OdeForm,
    Recurrence,
    frobenius_recurrence,
    ode_residual,
    series_coeffs,
    termination_polynomial,
    termination_solve,
)
from .heun import (
    HEUN_CLASSES,
    HeunClass,
    HeunParams,
    heun_accessory,
    heun_branch,
    heun_class,
    heun_class_relation,
    heun_eigenstate,
    heun_nu_from_product,
    heun_params_for_class,
    heun_to_nu,
)
from .che import (
    CHE_CLASSES,
    CheClass,
    CheParams,
    che_accessory,
    che_auxiliary,
    che_branch,
    che_class,
    che_class_relation,
    che_eigenstate,
    che_params_for_class,
    che_to_nu,
)
from .apps import (
    ANTISYMMETRIC,
    SYMMETRIC,
    Coulomb3SReport,
    DoubleWellReport,
    ElectronsSphereState,
    bethe_residual,
    coulomb3s_energy,
    coulomb3s_verify,
    doublewell_level_solve,
    doublewell_spectrum,
    doublewell_verify,
    electrons_sphere_state,
)

__all__ = [
    "EXACT",
    "FLOAT",
    "BackendMismatchError",
    "RationalComplex",
    "Poly",
    "parse_poly",
    "format_poly",
    "CLASSIC",
    "EXTENDED",
    "Eigenstate",
    "NoBranchError",
    "NuEquation",
    "PhiFactor",
    "PiBranch",
    "QuantizationRelation",
    "ReducedForm",
    "branch_from_pi",
    "enumerate_branches",
    "phi_factor",
    "polynomial_solution",
    "quantization",
    "radicand",
    "reduce_branch",
    "OdeFamily",
    "OdeForm",
    "Recurrence",
    "frobenius_recurrence",
    "ode_residual",
    "series_coeffs",
    "termination_polynomial",
    "termination_solve",
    "HEUN_CLASSES",
    "HeunClass",
    "HeunParams",
    "heun_accessory",
    "heun_branch",
    "heun_class",
    "heun_class_relation",
    "heun_eigenstate",
    "heun_nu_from_product",
    "heun_params_for_class",
    "heun_to_nu",
    "CHE_CLASSES",
    "CheClass",
    "CheParams",
    "che_accessory",
    "che_auxiliary",
    "che_branch",
    "che_class",
    "che_class_relation",
    "che_eigenstate",
    "che_params_for_class",
    "che_to_nu",
    "ANTISYMMETRIC",
    "SYMMETRIC",
    "Coulomb3SReport",
    "DoubleWellReport",
    "ElectronsSphereState",
    "bethe_residual",
    "coulomb3s_energy",
    "coulomb3s_verify",
    "doublewell_level_solve",
    "doublewell_spectrum",
    "doublewell_verify",
    "electrons_sphere_state",
]

__version__ = "0.1.0"
