from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exceptions import InputValidationError

METHODS = ("glasso", "ridge", "elnet", "adapt", "scad", "mcp", "clime", "tiger")

# methods whose estimate maximizes a penalized likelihood and is PD
LIKELIHOOD_METHODS = ("glasso", "ridge", "elnet", "adapt", "scad", "mcp")

WEIGHT_SOURCES = ("inv-abs-cov", "inv-glasso-pow", "inv-sample-precision", "inv-lw-linear")

DEFAULT_GAMMA = {"adapt": 0.5, "scad": 3.7, "mcp": 3.0}


@dataclass
class EstimatorConfig:
    """Solver settings shared by the estimators.

    ``gamma`` of ``None`` means the method default (0.5 adaptive,
    3.7 SCAD, 3 MCP). ``weight_source`` of ``None`` lets adaptive glasso
    pick sample precision when S is PD and Ledoit-Wolf otherwise.
    """

    tol: float = 1e-4
    max_iter: int = 200
    lla_iters: int = 3
    penalize_diagonal: bool = True
    gamma: Optional[float] = None
    weight_source: Optional[str] = None

    def __post_init__(self):
        if not self.tol > 0:
            raise InputValidationError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InputValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.lla_iters < 1:
            raise InputValidationError(f"lla_iters must be >= 1, got {self.lla_iters}")
        if self.weight_source is not None and self.weight_source not in WEIGHT_SOURCES:
            raise InputValidationError(f"unknown weight source {self.weight_source!r}")


@dataclass
class PrecisionEstimate:
    omega: np.ndarray
    method: str
    lambda_used: float
    gamma_used: Optional[float] = None
    converged: bool = True
    iterations: int = 0
    objective: float = float("nan")
    # per-step objective values (LLA outer steps, Newton steps)
    trace: list = field(default_factory=list)


def check_lambda(lam):
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise InputValidationError(f"lambda must be a finite nonnegative number, got {lam}")
    return lam


def symmetrize_min_magnitude(M):
    """Symmetrize by keeping, for each pair, the entry of smaller magnitude.

    Ties keep the upper-triangle entry ``M[i, j]`` (``i < j``). The
    diagonal is left untouched.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputValidationError(f"matrix must be square, got shape {M.shape}")
    upper = np.triu(M, 1)
    lower_t = np.triu(M.T, 1)
    keep = np.where(np.abs(upper) <= np.abs(lower_t), upper, lower_t)
    return keep + keep.T + np.diag(np.diag(M))
