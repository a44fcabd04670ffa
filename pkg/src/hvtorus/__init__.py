"""
hvtorus - weight modules of the rank-two Heisenberg-Virasoro algebra

Exact structure constants, truncated graded modules with rational linear
algebra, the standard module constructions and window-sweep experiments.

Example:
    from hvtorus import E, T, bracket, fock, dimension_table

    bracket(T(1, 0), E(0, 1))          # -1*t[1,1]
    dimension_table(fock("+", 1, depth=5)).level_dims(5, axis=1)
    # [1, 1, 2, 3, 5, 7]
"""

__version__ = "0.1.0"

from hvtorus.constructions import (
    build,
    classify_T_rho,
    extend_to_L0,
    fock,
    generic_verma_H,
    hat_V,
    highest_weight_V_rho,
    induce,
    induced_laurent,
    induced_verma,
    irreducible_quotient,
    laurent_T,
    levels_from_c,
    tensor_M_rho,
    trivial_module,
    verma_H,
    verma_V_rho,
)
from hvtorus.config import ConstructionDescriptor, RunConfig, load_config
from hvtorus.errors import (
    CaseMismatchError,
    DimensionMismatchError,
    ElementParseError,
    HvtorusError,
    UnknownGeneratorError,
)
from hvtorus.exactla import SparseMatrix, Subspace, kernel_basis, rank, rref
from hvtorus.experiments import (
    SweepReport,
    decomposition_check,
    ghw_scan,
    growth_experiment,
    heisenberg_irreducibility_probe,
    stabilization_experiment,
    support_properties_check,
    witness_family_rank,
)
from hvtorus.exppoly import (
    ExpPolynomial,
    Recurrence,
    RhoSpec,
    characteristic_recurrence,
    is_exp_polynomial_over_H,
)
from hvtorus.gradmod import (
    DimensionTable,
    TruncatedModule,
    Truncation,
    dimension_table,
    quotient_dims,
    radical,
)
from hvtorus.hvr2 import (
    D,
    E,
    K,
    T,
    LieElement,
    bracket,
    format_element,
    jacobi_defect,
    parse_element,
)
from hvtorus.lattice import STANDARD_BASIS, BasisPair, LatticeVector, coords, is_zbasis
from hvtorus.runtime import ComputeContext, configure, get_context

__all__ = [
    # Algebra
    "LieElement",
    "E",
    "T",
    "K",
    "D",
    "bracket",
    "jacobi_defect",
    "parse_element",
    "format_element",
    # Lattice
    "LatticeVector",
    "BasisPair",
    "STANDARD_BASIS",
    "coords",
    "is_zbasis",
    # Linear algebra
    "SparseMatrix",
    "Subspace",
    "rref",
    "rank",
    "kernel_basis",
    # Exp-polynomials
    "ExpPolynomial",
    "Recurrence",
    "RhoSpec",
    "characteristic_recurrence",
    "is_exp_polynomial_over_H",
    # Modules
    "TruncatedModule",
    "Truncation",
    "DimensionTable",
    "dimension_table",
    "quotient_dims",
    "radical",
    # Constructions
    "trivial_module",
    "laurent_T",
    "classify_T_rho",
    "fock",
    "verma_H",
    "generic_verma_H",
    "tensor_M_rho",
    "extend_to_L0",
    "induce",
    "irreducible_quotient",
    "verma_V_rho",
    "highest_weight_V_rho",
    "hat_V",
    "induced_laurent",
    "induced_verma",
    "levels_from_c",
    "build",
    # Experiments
    "SweepReport",
    "stabilization_experiment",
    "growth_experiment",
    "witness_family_rank",
    "heisenberg_irreducibility_probe",
    "support_properties_check",
    "decomposition_check",
    "ghw_scan",
    # Configuration
    "ConstructionDescriptor",
    "RunConfig",
    "load_config",
    "ComputeContext",
    "get_context",
    "configure",
    # Errors
    "HvtorusError",
    "DimensionMismatchError",
    "ElementParseError",
    "CaseMismatchError",
    "UnknownGeneratorError",
]
