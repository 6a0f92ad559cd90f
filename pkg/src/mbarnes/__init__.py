"""Symbolic and numerical Barnes-lemma reduction of Mellin-Barnes integrals."""

from .engine import (
    ContourSpec,
    PoleFamily,
    absorb_prefactors,
    apply_barnes_first,
    apply_barnes_second,
    check_contour,
    choose_contour,
    classify_poles,
    reduce_identity_lhs,
    take_right_residue,
)
from .errors import (
    BudgetExceeded,
    DivergentTailError,
    DivisionByZero,
    HigherOrderPole,
    MBError,
    NotAdmissible,
    NotARightPole,
    ParseError,
    PatternMismatch,
    PoleError,
)
from .expr import (
    ExprSum,
    Gamma,
    GammaProduct,
    LinearForm,
    evaluate,
    expr_equal_numeric,
    lf,
    normalize,
    partial_fraction_split,
    poly,
    reflect_offset,
    reflect_variable,
    relabel,
    substitute,
)
from .gamma import decay_rate, gamma, gamma_residue, log_gamma
from .quad import QuadConfig, QuadResult, integrate_one, integrate_two, tail_bound
from .text import format_expr, parse_expr, parse_linear_form
from .trace import ProofTrace, Step, replay
from .ud import DParams, RegTriple, build_D, build_D_short, build_J, build_lhs_integrand, build_rhs_terms

__version__ = "0.1.0"
