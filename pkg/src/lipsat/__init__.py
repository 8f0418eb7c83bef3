"""Exact computations with Lipschitz saturations of modules over polynomial rings.

The library works over ``Q[z, z']``: a germ at the origin of ``C^n`` is
represented by polynomial data in the space variables ``z`` and its double
on ``X x X`` uses the primed copy ``z'``.  Membership in an integral closure
or a Lipschitz saturation is reported as a replayable :class:`Verdict`.
"""

from .algebra import (
    Functional,
    GenModule,
    Ideal,
    KIndex,
    apply_functional,
    augment,
    cofactor_functional,
    coordinate_functional,
    det,
    functional_image,
    generic_rank,
    iter_minors,
    minor,
    minor_ideal,
)
from .closure import (
    Curve,
    CurveFamily,
    Kind,
    Verdict,
    closure_test_ideal,
    closure_test_module,
    curve_membership,
    curve_pullback,
    ideal_membership,
    module_membership,
    monomial_closure,
    newton_test,
)
from .double import (
    DoubledModule,
    determinant_product,
    diagonal_ideal,
    double_ideal,
    double_module,
    double_vector,
    script_I_2k,
    tilde_matrix,
)
from .polycore import ParseError, Polynomial, RationalFunction, VarRegistry, parse, parse_vector
from .saturation import (
    SatReport,
    ideal_sat_test,
    inclusion_lemma_check,
    prop417_check,
    sat1_test,
    sat2_test,
    sat3_test,
    sat_report,
)
from .suite import SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
