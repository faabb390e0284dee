"""Bound-state counts of central potentials and semiclassical limits on them."""

from .bounds import (BoundReport, Limit, Window, assemble_report, chadan_asymptotic_ratio,
                     chadan_window, lower_limit, upper_limit)
from .exceptions import (DomainError, ExpressionError, IntegrationError, NoAttractiveRegion,
                         NonIntegrableError, NumericalError, SemiboundError, StageError)
from .expression import compile_expression, parse_expression
from .nodes import NodeCountResult, PruferTrace, count_analytic, count_nodes_prufer, count_nodes_shooting
from .potentials import (FAMILIES, Custom, EffectivePotential, ExpFamily, InversePower, LennardJones,
                         Morse, PoschlTeller, PotentialModel, SquareWell, Tabulated, effective_potential,
                         evaluate, load_tabulated, make_family, negative_part, read_table)
from .semiclassical import SemiclassicalEstimate, closed_form_semiclassical, semiclassical_integral
from .shape import ShapeCertificate, ZeroStructure, certify_sign, evaluate_F, find_zero_structure, shape_function
from .special import gamma_function

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "Limit", "Window", "assemble_report", "chadan_asymptotic_ratio", "chadan_window",
    "lower_limit", "upper_limit",
    "DomainError", "ExpressionError", "IntegrationError", "NoAttractiveRegion", "NonIntegrableError",
    "NumericalError", "SemiboundError", "StageError",
    "compile_expression", "parse_expression",
    "NodeCountResult", "PruferTrace", "count_analytic", "count_nodes_prufer", "count_nodes_shooting",
    "FAMILIES", "Custom", "EffectivePotential", "ExpFamily", "InversePower", "LennardJones", "Morse",
    "PoschlTeller", "PotentialModel", "SquareWell", "Tabulated", "effective_potential", "evaluate",
    "load_tabulated", "make_family", "negative_part", "read_table",
    "SemiclassicalEstimate", "closed_form_semiclassical", "semiclassical_integral",
    "ShapeCertificate", "ZeroStructure", "certify_sign", "evaluate_F", "find_zero_structure", "shape_function",
    "gamma_function",
]
