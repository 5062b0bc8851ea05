"""Gradient almost Ricci solitons on multiply warped products over an interval."""

from .errors import (ArityError, CriticalPointError, DomainError, ParamError, ParseError,
                     PositivityError, StencilError, WarpsolError)
from .expr import differentiate, evaluate, parse, simplify, to_string
from .geometry import (FiberSpec, ProductSpec, eigenvalue_clusters, ricci_base, ricci_fiber,
                       scalar_curvature)
from .numerics import Closed, Grid, Sampled, SampledFunction, derivative
from .soliton import (ResidualReport, SolitonSpec, harmonic_weyl_residuals, lambda_good_check,
                      soliton_residuals, xi_quadratic_residuals)

__version__ = "0.1.0"

__all__ = [
    "ArityError", "CriticalPointError", "DomainError", "ParamError", "ParseError",
    "PositivityError", "StencilError", "WarpsolError",
    "differentiate", "evaluate", "parse", "simplify", "to_string",
    "FiberSpec", "ProductSpec", "eigenvalue_clusters", "ricci_base", "ricci_fiber",
    "scalar_curvature", "Closed", "Grid", "Sampled", "SampledFunction", "derivative",
    "ResidualReport", "SolitonSpec", "harmonic_weyl_residuals", "lambda_good_check",
    "soliton_residuals", "xi_quadratic_residuals",
]
