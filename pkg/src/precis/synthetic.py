"""Ground-truth precision matrices, Gaussian sampling and the replicated
simulation harness."""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional, Tuple

import numpy as np

from . import io as pio
from .estimators import METHODS, EstimatorConfig, fit
from .exceptions import InputValidationError, PrecisError
from .linalg import as_symmetric, cholesky_pd, invert_pd, sample_covariance
from .metrics import MetricsReport, evaluate
from .tuning import CvConfig, GridSpec, cross_validate, method_grid

TRUTH_KINDS = ("banded", "random-sparse", "from-file")

REPLICATE_COLUMNS = ["method", "replicate", "f_norm", "kl_div", "f1", "sparsity", "lambda", "gamma", "valid"]
TIMING_COLUMNS = ["method", "replicate", "cv_time_sec", "fit_time_sec", "time_sec"]
AGGREGATE_COLUMNS = ["method", "f_norm", "kl_div", "f1", "sparsity", "time_sec", "n_valid", "replicates"]


@dataclass
class GroundTruthSpec:
    kind: str = "banded"
    p: int = 50
    band_width: int = 1
    band_value: float = 0.4
    edge_prob: float = 0.05
    edge_magnitude: Tuple[float, float] = (0.2, 0.6)
    pd_margin: float = 0.05
    file: Optional[str] = None

    def __post_init__(self):
        if self.kind not in TRUTH_KINDS:
            raise InputValidationError(f"truth.kind must be one of {TRUTH_KINDS}, got {self.kind!r}")
        if self.kind != "from-file" and self.p < 2:
            raise InputValidationError(f"truth.p must be >= 2, got {self.p}")
        if not 0 < self.edge_prob < 1:
            raise InputValidationError(f"truth.edge_prob must lie in (0, 1), got {self.edge_prob}")
        if not self.pd_margin > 0:
            raise InputValidationError(f"truth.pd_margin must be positive, got {self.pd_margin}")
        if self.band_width < 1:
            raise InputValidationError(f"truth.band_width must be >= 1, got {self.band_width}")
        lo, hi = self.edge_magnitude
        if not 0 <= lo <= hi:
            raise InputValidationError(f"truth.edge_magnitude must be an ordered range, got {self.edge_magnitude}")
        self.edge_magnitude = (float(lo), float(hi))
        if self.kind == "from-file" and not self.file:
            raise InputValidationError("truth.file is required for kind 'from-file'")


@dataclass
class SimConfig:
    truth: GroundTruthSpec = field(default_factory=GroundTruthSpec)
    n: int = 180
    replicates: int = 100
    methods: List[str] = field(default_factory=lambda: list(METHODS))
    cv: CvConfig = field(default_factory=CvConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    seed: int = 0
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)

    def __post_init__(self):
        if self.replicates < 1:
            raise InputValidationError(f"replicates must be >= 1, got {self.replicates}")
        if self.n < 2:
            raise InputValidationError(f"n must be >= 2, got {self.n}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise InputValidationError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        if self.cv.k > self.n:
            raise InputValidationError(f"cv.k = {self.cv.k} exceeds n = {self.n}")

    @classmethod
    def from_dict(cls, data):
        """Build from a JSON-style dict; unknown or invalid fields raise
        :class:`InputValidationError` naming the field."""
        if not isinstance(data, dict):
            raise InputValidationError("config must be a JSON object")
        nested = {"truth": GroundTruthSpec, "cv": CvConfig, "grid": GridSpec, "estimator": EstimatorConfig}
        kwargs = {}
        known = {f.name for f in fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise InputValidationError(f"unknown config field {key!r}")
            if key in nested:
                kwargs[key] = _build(nested[key], value, key)
            else:
                kwargs[key] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InputValidationError(f"invalid config: {exc}") from None

    def to_dict(self):
        return asdict(self)


def _build(kind, value, prefix):
    if not isinstance(value, dict):
        raise InputValidationError(f"config field {prefix!r} must be an object")
    known = {f.name for f in fields(kind)}
    for key in value:
        if key not in known:
            raise InputValidationError(f"unknown config field {prefix + '.' + key!r}")
    try:
        return kind(**value)
    except TypeError as exc:
        raise InputValidationError(f"invalid config field {prefix!r}: {exc}") from None


@dataclass
class ReplicateResult:
    method: str
    replicate: int
    metrics: MetricsReport
    lambda_selected: float
    gamma_selected: Optional[float]
    cv_time_sec: float
    fit_time_sec: float

    @property
    def wall_time_sec(self):
        return self.cv_time_sec + self.fit_time_sec

    def row(self):
        m = self.metrics
        return {
            "method": self.method,
            "replicate": self.replicate,
            "f_norm": m.f_norm,
            "kl_div": m.kl_div,
            "f1": m.f1,
            "sparsity": m.sparsity,
            "lambda": self.lambda_selected,
            "gamma": self.gamma_selected,
            "valid": m.valid,
        }

    def timing_row(self):
        return {
            "method": self.method,
            "replicate": self.replicate,
            "cv_time_sec": self.cv_time_sec,
            "fit_time_sec": self.fit_time_sec,
            "time_sec": self.wall_time_sec,
        }


def _repair_pd(omega, margin):
    lam_min = float(np.linalg.eigvalsh(omega)[0])
    if lam_min <= 0:
        omega = omega + (abs(lam_min) + margin) * np.eye(omega.shape[0])
    return omega


def generate_precision(spec, seed=0):
    """Sparse PD ground-truth precision matrix.

    ``banded``: unit diagonal and ``band_value`` on the first ``band_width``
    off-diagonals. ``random-sparse``: Erdos-Renyi support with uniform
    magnitudes in ``edge_magnitude`` and random signs on a unit diagonal.
    If the smallest eigenvalue is not positive the matrix is shifted by
    ``|lambda_min| + pd_margin``. ``from-file`` reads a CSV matrix that
    must already be PD.
    """
    if spec.kind == "from-file":
        omega = as_symmetric(pio.read_matrix_csv(spec.file), "truth")
        cholesky_pd(omega)
        return omega
    p = spec.p
    if spec.kind == "banded":
        omega = np.eye(p)
        for b in range(1, min(spec.band_width, p - 1) + 1):
            idx = np.arange(p - b)
            omega[idx, idx + b] = spec.band_value
            omega[idx + b, idx] = spec.band_value
    else:
        rng = np.random.default_rng(seed)
        iu = np.triu_indices(p, 1)
        m = iu[0].size
        present = rng.random(m) < spec.edge_prob
        lo, hi = spec.edge_magnitude
        vals = rng.uniform(lo, hi, m) * rng.choice([-1.0, 1.0], m)
        upper = np.zeros((p, p))
        upper[iu] = np.where(present, vals, 0.0)
        omega = upper + upper.T + np.eye(p)
    return _repair_pd(omega, spec.pd_margin)


def sample_mvn(omega, n, seed=0):
    """``n`` draws from ``N(0, inv(omega))`` as ``Z @ L.T`` with
    ``inv(omega) = L L'``."""
    sigma = invert_pd(omega)
    L = cholesky_pd(sigma)
    Z = np.random.default_rng(seed).standard_normal((int(n), L.shape[0]))
    return Z @ L.T


def child_seed(master_seed, replicate):
    """64-bit seed for one replicate, derived by spawn key."""
    state = np.random.SeedSequence(int(master_seed), spawn_key=(int(replicate),)).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def _truth_seed(master_seed):
    return child_seed(master_seed, 2**32 - 1)


def run_method(X, method, truth, sigma_truth, cv, grid, cfg, replicate=0):
    """Cross-validate, refit and score one method on one dataset."""
    S = sample_covariance(X)
    t0 = time.perf_counter()
    lam = gamma = None
    try:
        candidates = method_grid(X, method, grid, S=S)
        result = cross_validate(X, method, candidates, cv, cfg)
        lam, gamma = result.selected
        t1 = time.perf_counter()
        est = fit(method, X, lam, gamma, cfg, S=S)
        t2 = time.perf_counter()
        metrics = evaluate(truth, est.omega, sigma_truth)
    except (PrecisError, ArithmeticError, np.linalg.LinAlgError):
        t1 = t2 = time.perf_counter()
        p = truth.shape[0]
        nan = float("nan")
        metrics = MetricsReport(nan, float("inf"), nan, nan, 0, 0, 0, p * (p - 1) // 2, valid=False)
    return ReplicateResult(method, replicate, metrics, lam, gamma, t1 - t0, t2 - t1)


def _run_one(args):
    config, truth, sigma_truth, r = args
    seed = child_seed(config.seed, r)
    X = sample_mvn(truth, config.n, seed)
    cv = CvConfig(config.cv.k, seed, config.cv.loss)
    return [run_method(X, m, truth, sigma_truth, cv, config.grid, config.estimator, r)
            for m in config.methods]


def aggregate(results, methods=None):
    """Per-method means across replicates.

    K-L divergence is averaged over valid replicates only; ``n_valid``
    counts them.
    """
    methods = methods or list(dict.fromkeys(r.method for r in results))
    rows = []
    for m in methods:
        rs = [r for r in results if r.method == m]
        if not rs:
            continue
        valid = [r for r in rs if r.metrics.valid]

        def mean(vals):
            return float(np.mean(vals)) if len(vals) else float("nan")

        rows.append({
            "method": m,
            "f_norm": mean([r.metrics.f_norm for r in rs]),
            "kl_div": mean([r.metrics.kl_div for r in valid]),
            "f1": mean([r.metrics.f1 for r in rs]),
            "sparsity": mean([r.metrics.sparsity for r in rs]),
            "time_sec": mean([r.wall_time_sec for r in rs]),
            "n_valid": len(valid),
            "replicates": len(rs),
        })
    return rows


def default_workers():
    env = os.environ.get("PRECIS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputValidationError(f"PRECIS_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_replicates(config, workers=1, on_replicate=None):
    """Run the replicated simulation.

    The ground truth is generated once from the master seed; replicate
    ``r`` samples its data (and shuffles its CV folds) with
    ``child_seed(seed, r)``. Results come back in replicate order
    regardless of worker count.

    Parameters
    ----------
    on_replicate : callable, optional
        Called with the list of :class:`ReplicateResult` of each replicate,
        in replicate order, as soon as it is available.

    Returns
    -------
    (list of ReplicateResult, list of dict)
        Per-replicate rows and the aggregate table.
    """
    truth = generate_precision(config.truth, _truth_seed(config.seed))
    sigma_truth = invert_pd(truth)
    jobs = [(config, truth, sigma_truth, r) for r in range(config.replicates)]
    results = []

    def consume(batch):
        results.extend(batch)
        if on_replicate is not None:
            on_replicate(batch)

    if workers <= 1:
        for job in jobs:
            consume(_run_one(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(_run_one, jobs):
                consume(batch)
    return results, aggregate(results, config.methods)
