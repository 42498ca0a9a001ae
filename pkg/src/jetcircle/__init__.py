"""Exact arithmetic for the circle method over truncated jet rings F_q[s]/(s^{m+1})."""

from .arcs import AlphaRep, ArcParams, arc_measure_count, arc_member, circle_integral, dirichlet_layer, layer_report, layer_table
from .counting import (
    asymptotic_scan,
    check_diagonal_implication,
    check_jet_dimension_bound,
    check_minor_arc_vanishing,
    count_direct_Nm,
    count_jet_variety,
    count_projective_jets,
    count_via_characters,
    exponent_analysis,
    exponent_grid_check,
    threshold_n,
)
from .errors import (
    BudgetExceeded,
    CoverageViolation,
    DeskScaleOverflow,
    FieldMismatch,
    InsufficientPrecision,
    JetCircleError,
    NonIntegralResult,
)
from .expsums import SumJob, check_shrinking, check_weyl_lemma, exp_sum_S, shrink_count_K, weyl_count_M
from .field import FieldElem, FiniteField, RootSum, parse_field
from .forms import FormSpec, dimensions, parse_form, smoothness_check
from .harmonic import verify_box_orthogonality, verify_integral_orthogonality
from .jets import JetLaurent, JetPoly, mul_poly_laurent, norm_abs, norm_dist, parse_jetlaurent, parse_jetpoly, psi_m

__version__ = "0.1.0"

__all__ = [
    "AlphaRep",
    "ArcParams",
    "BudgetExceeded",
    "CoverageViolation",
    "DeskScaleOverflow",
    "FieldElem",
    "FieldMismatch",
    "FiniteField",
    "FormSpec",
    "InsufficientPrecision",
    "JetCircleError",
    "JetLaurent",
    "JetPoly",
    "NonIntegralResult",
    "RootSum",
    "SumJob",
    "arc_measure_count",
    "arc_member",
    "asymptotic_scan",
    "check_diagonal_implication",
    "check_jet_dimension_bound",
    "check_minor_arc_vanishing",
    "check_shrinking",
    "check_weyl_lemma",
    "circle_integral",
    "count_direct_Nm",
    "count_jet_variety",
    "count_projective_jets",
    "count_via_characters",
    "dimensions",
    "dirichlet_layer",
    "exp_sum_S",
    "exponent_analysis",
    "exponent_grid_check",
    "layer_report",
    "layer_table",
    "mul_poly_laurent",
    "norm_abs",
    "norm_dist",
    "parse_field",
    "parse_form",
    "parse_jetlaurent",
    "parse_jetpoly",
    "psi_m",
    "shrink_count_K",
    "smoothness_check",
    "threshold_n",
    "verify_box_orthogonality",
    "verify_integral_orthogonality",
    "weyl_count_M",
]
