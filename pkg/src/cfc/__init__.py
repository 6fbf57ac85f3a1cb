"""A core calculus for constrained type families: checker, rewriter, evaluator
and surface elaborator."""

from .diagnostics import CheckError, Diagnostic, PreconditionError, Span
from .evaluator import CoercedValue, Evaluator, FuelExhausted, Stepped, Stuck, Value
from .module import Module, load_file, load_program, load_source
from .parser import ParseError, parse_coercion, parse_expr, parse_program, parse_type
from .printer import show, show_program
from .rewrite import Rewriter
from .signature import check_all, check_good_signature, check_signature, compat, no_conflict
from .syntax import Context, Signature, alpha_eq, fam_count
from .typecheck import check_coercion, check_type, infer_expr, well_typed
from .unify import apart, match, unify

__all__ = [
    "CheckError", "Diagnostic", "PreconditionError", "Span",
    "CoercedValue", "Evaluator", "FuelExhausted", "Stepped", "Stuck", "Value",
    "Module", "load_file", "load_program", "load_source",
    "ParseError", "parse_coercion", "parse_expr", "parse_program", "parse_type",
    "show", "show_program", "Rewriter",
    "check_all", "check_good_signature", "check_signature", "compat", "no_conflict",
    "Context", "Signature", "alpha_eq", "fam_count",
    "check_coercion", "check_type", "infer_expr", "well_typed",
    "apart", "match", "unify",
]
