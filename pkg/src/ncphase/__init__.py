"""Exact computations for noncommutative spaces realized in the Heisenberg algebra."""

from .exact import ExactComplex, I, Q
from .exceptions import DomainError, StructuralError
from .heisenberg import PhaseSpaceOperator, fock_apply, op_exponential_apply, op_multiply, polynomial
from .lie import (StructureConstants, bernoulli_psi, check_jacobi, generic_structure_constants,
                  psi_of_matrix)
from .models import (ModelSpec, canonical_theta, extended_tensorial, kappa_minkowski, snyder_family,
                     snyder_symmetric, verify_model)
from .qdeform import (LaurentQ, QuadraticStructure, dilation_realization, generalized_weyl_first_order,
                      q_multinomial, q_word_normal_order, quadratic_jacobi_check)
from .realization import Realization, k_function, verify_commutators, weyl_realization
from .report import Report
from .series import TruncatedSeries, VariableTable
from .star import (DFunction, StarProduct, check_associativity, d_function_diffop, d_function_ode,
                   d_function_oracle, star_product)
from .twist import (Coproduct, TwistOperator, check_coassociativity, check_leibniz, coproduct_from_d,
                    ln_twist, ln_twist_check, twist_apply)

__version__ = "0.1.0"

__all__ = [
    "ExactComplex",
    "I",
    "Q",
    "DomainError",
    "StructuralError",
    "PhaseSpaceOperator",
    "fock_apply",
    "op_exponential_apply",
    "op_multiply",
    "polynomial",
    "StructureConstants",
    "bernoulli_psi",
    "check_jacobi",
    "generic_structure_constants",
    "psi_of_matrix",
    "ModelSpec",
    "canonical_theta",
    "extended_tensorial",
    "kappa_minkowski",
    "snyder_family",
    "snyder_symmetric",
    "verify_model",
    "LaurentQ",
    "QuadraticStructure",
    "dilation_realization",
    "generalized_weyl_first_order",
    "q_multinomial",
    "q_word_normal_order",
    "quadratic_jacobi_check",
    "Realization",
    "k_function",
    "verify_commutators",
    "weyl_realization",
    "Report",
    "TruncatedSeries",
    "VariableTable",
    "DFunction",
    "StarProduct",
    "check_associativity",
    "d_function_diffop",
    "d_function_ode",
    "d_function_oracle",
    "star_product",
    "Coproduct",
    "TwistOperator",
    "check_coassociativity",
    "check_leibniz",
    "coproduct_from_d",
    "ln_twist",
    "ln_twist_check",
    "twist_apply",
]
