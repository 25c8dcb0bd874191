"""Invariant theory workbench for finite reflection groups.

Exact sparse polynomials over Q and Q(sqrt d), reflection groups of types
A, B, D, I2 and H3, Chevalley maps and their algebra, the intersection
lattice with isotropy data, and Whitney-jet utilities with a probe for the
loss of differentiability of F o P.
"""

from .chevalley import (
    ChevalleyMap,
    basic_invariants,
    discriminant,
    gradient_system,
    jacobian_factorization,
    orbit_separation_check,
    reynolds,
    rewrite_invariant,
    weighted_derivative_orders,
)
from .coxeter import CoxeterTypeSpec, ReflectionGroup, build_group, classify
from .fields import QuadExt
from .polyalg import Flat, SparsePoly, compose, divide_exact, vanishing_order
from .strata import intersection_lattice, isotropy, minor_flatness_check, monotonicity_check
from .whitney import (
    JetField,
    counterexample_probe,
    faa_di_bruno,
    lemma1_product_check,
    lemma2_division_check,
    regularity_exponent,
    remainder,
    seminorm,
    taylor_field,
)

__version__ = "0.1.0"

__all__ = [
    "ChevalleyMap",
    "CoxeterTypeSpec",
    "Flat",
    "JetField",
    "QuadExt",
    "ReflectionGroup",
    "SparsePoly",
    "basic_invariants",
    "build_group",
    "classify",
    "compose",
    "counterexample_probe",
    "discriminant",
    "divide_exact",
    "faa_di_bruno",
    "gradient_system",
    "intersection_lattice",
    "isotropy",
    "jacobian_factorization",
    "lemma1_product_check",
    "lemma2_division_check",
    "minor_flatness_check",
    "monotonicity_check",
    "orbit_separation_check",
    "regularity_exponent",
    "remainder",
    "reynolds",
    "rewrite_invariant",
    "seminorm",
    "taylor_field",
    "vanishing_order",
    "weighted_derivative_orders",
]
