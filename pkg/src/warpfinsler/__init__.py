"""Warped product Finsler metrics F = |ybar| sqrt(phi(z, r)): closed-form
tensors, curvature and an independent finite-difference oracle."""

__version__ = "0.1.0"

from .errors import (ConvexityError, DegenerateMetricError, DomainError, ExpansionPointMismatch,
                     JetDomainError, NumericError, SingularJetError, WarpFinslerError)
from .jets import Jet, jet_const, jet_var_r, jet_var_z
from .functions import Constant, DoubleIntegral, JetFunction, ScalarFunction1D, as_function
from .expr import parse_function
from .engine import (DerivedScalars, EvalPoint, FundamentalTensor, derived_scalars,
                     determinant_formula, fundamental_tensor, spray, spray_divergence)
from .families import (MetricFamily, convexity_check, custom_family, flat_family, g_family,
                       gc_family, preset, randers_family, rotation_invariance_check)
from .curvature import (berwald_tensor, douglas_ode_residuals, douglas_tensor,
                        landsberg_from_berwald, landsberg_tensor, projective_flat_residual,
                        ricci_flat_residuals, scaled_norm)
from .oracle import (FDConfig, berwald_fd, douglas_fd, hessian_fd, ricci_fd, spray_divergence_fd,
                     spray_fd)

__all__ = [
    "__version__",
    "WarpFinslerError", "ExpansionPointMismatch", "SingularJetError", "JetDomainError",
    "DomainError", "ConvexityError", "DegenerateMetricError", "NumericError",
    "Jet", "jet_const", "jet_var_z", "jet_var_r",
    "ScalarFunction1D", "JetFunction", "Constant", "DoubleIntegral", "as_function",
    "parse_function",
    "EvalPoint", "DerivedScalars", "FundamentalTensor", "derived_scalars", "fundamental_tensor",
    "determinant_formula", "spray", "spray_divergence",
    "MetricFamily", "g_family", "randers_family", "gc_family", "flat_family", "custom_family",
    "preset", "convexity_check", "rotation_invariance_check",
    "douglas_tensor", "berwald_tensor", "landsberg_tensor", "landsberg_from_berwald",
    "douglas_ode_residuals", "ricci_flat_residuals", "projective_flat_residual", "scaled_norm",
    "FDConfig", "hessian_fd", "spray_fd", "spray_divergence_fd", "berwald_fd", "douglas_fd",
    "ricci_fd",
]
