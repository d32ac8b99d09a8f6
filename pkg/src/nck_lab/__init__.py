"""Numerical laboratory for non-commutative Khintchine-type inequalities
on matrix models of semifinite L_p spaces, 0 < p < 1 included.
"""

__version__ = "0.1.0"

from .core import (ConstantReport, Density, Element, MatrixTuple, TraceSpace,
                   chi, inner, polar, power, quasi_norm, random_density,
                   random_element, trace)
from .errors import (ConfigInvalid, DegenerateInstance, EnumerationTooLarge,
                     NckLabError, NegativePowerOfSingular, NonCommuting,
                     NotInRange, NotPositiveSemidefinite,
                     QuadratureNotConverged)
from .extrapolation import (CqResult, JordanMap, cq_upper, jordan_apply,
                            jordan_invert, schur_multiplier_norm_estimate,
                            steps_diagnostic, substitution_pair)
from .holder import (AnalyticFamily, ExponentProfile, MatrixPolynomial,
                     holder_ratio, kernel_quadrature, make_profile,
                     scan_constant, three_lines_check,
                     uniform_convexity_probe)
from .maurey import (DensityMeasure, LinearMapIntoLp, d_value, maurey_fit,
                     worst_case_d)
from .mazur import holder_exponent_estimate, mazur_map
from .systems import (MixedNormEstimate, OrthonormalSystem,
                      mixed_norm_exact_rademacher, mixed_norm_mc)
from .triple import (Decomposition, TripleNormResult, certified_upper_bound,
                     row_column_value, triple_norm_upper)

__all__ = [
    "__version__",
    "TraceSpace", "Element", "MatrixTuple", "Density", "ConstantReport",
    "trace", "inner", "quasi_norm", "power", "polar", "chi",
    "random_element", "random_density",
    "NckLabError", "NegativePowerOfSingular", "NotPositiveSemidefinite",
    "EnumerationTooLarge", "NotInRange", "NonCommuting",
    "DegenerateInstance", "QuadratureNotConverged", "ConfigInvalid",
    "OrthonormalSystem", "MixedNormEstimate",
    "mixed_norm_exact_rademacher", "mixed_norm_mc",
    "Decomposition", "TripleNormResult", "row_column_value",
    "triple_norm_upper", "certified_upper_bound",
    "JordanMap", "CqResult", "jordan_apply", "jordan_invert", "cq_upper",
    "schur_multiplier_norm_estimate", "substitution_pair", "steps_diagnostic",
    "ExponentProfile", "make_profile", "kernel_quadrature",
    "AnalyticFamily", "three_lines_check", "MatrixPolynomial",
    "uniform_convexity_probe", "holder_ratio", "scan_constant",
    "LinearMapIntoLp", "DensityMeasure", "d_value", "worst_case_d",
    "maurey_fit",
    "mazur_map", "holder_exponent_estimate",
]
