"""Sparse precision-matrix estimation for Gaussian graphical models."""

from .estimators import (METHODS, EstimatorConfig, PrecisionEstimate, adaptive_glasso, clime,
                         elastic_net, fit, glasso, mcp, ridge, scad, tiger, weighted_glasso)
from .exceptions import (DegenerateColumn, DegenerateGrid, InputValidationError, NotPositiveDefinite,
                         NumericalError, PrecisError, SolverFailure)

__version__ = "0.1.0"

__all__ = [
    "METHODS", "EstimatorConfig", "PrecisionEstimate", "adaptive_glasso", "clime", "elastic_net", "fit",
    "glasso", "mcp", "ridge", "scad", "tiger", "weighted_glasso",
    "DegenerateColumn", "DegenerateGrid", "InputValidationError", "NotPositiveDefinite", "NumericalError",
    "PrecisError", "SolverFailure",
]
