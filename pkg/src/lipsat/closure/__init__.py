from .curves import Curve, CurveFamily, CurveMembership, curve_membership, curve_pullback, diagonal_family_curve
from .engine import DEFAULT_JET_ORDER, closure_test_ideal, closure_test_module
from .membership import SpanEngine, ideal_membership, module_membership
from .newton import monomial_closure, newton_test
from .verdict import Kind, Verdict

__all__ = [
    "Curve",
    "CurveFamily",
    "CurveMembership",
    "DEFAULT_JET_ORDER",
    "Kind",
    "SpanEngine",
    "Verdict",
    "closure_test_ideal",
    "closure_test_module",
    "curve_membership",
    "curve_pullback",
    "diagonal_family_curve",
    "ideal_membership",
    "module_membership",
    "monomial_closure",
    "newton_test",
]
