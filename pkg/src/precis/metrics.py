"""Estimate-versus-truth evaluation metrics."""

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InputValidationError, NotPositiveDefinite
from .linalg import cholesky_pd, invert_pd

EDGE_EPS = 1e-8


@dataclass
class MetricsReport:
    f_norm: float
    kl_div: float
    f1: float
    sparsity: float
    tp: int
    fp: int
    fn: int
    tn: int
    valid: bool = True

    def to_json(self):
        out = asdict(self)
        if not np.isfinite(self.kl_div):
            out["kl_div"] = str(float(self.kl_div))
        return out


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise InputValidationError(f"need square matrices of equal shape, got {a.shape} and {b.shape}")
    return a, b


def frobenius_distance(truth, est):
    """Frobenius norm of ``truth - est`` over all entries, diagonal included."""
    truth, est = _pair(truth, est)
    return float(np.sqrt(np.sum((truth - est) ** 2)))


def kl_divergence(sigma_truth, est):
    """``tr(Sigma O) - log det(Sigma O) - p``.

    Evaluated through the eigenvalues ``mu`` of ``L' O L`` (``Sigma = LL'``)
    as ``sum(mu - 1 - log mu)``, which keeps every term nonnegative.

    Raises
    ------
    NotPositiveDefinite
        If ``est`` (or ``sigma_truth``) is not positive definite.
    """
    sigma_truth, est = _pair(sigma_truth, est)
    L = cholesky_pd(sigma_truth)
    cholesky_pd(est)
    M = L.T @ est @ L
    mu = np.linalg.eigvalsh((M + M.T) / 2.0)
    if np.any(mu <= 0):
        raise NotPositiveDefinite("estimate is not positive definite")
    d = mu - 1.0
    return float(np.sum(d - np.log1p(d)))


def edge_confusion(truth, est, eps=EDGE_EPS):
    """``(tp, fp, fn, tn)`` over the strict upper triangle.

    An edge is present where ``|entry| > eps``.
    """
    truth, est = _pair(truth, est)
    iu = np.triu_indices(truth.shape[0], 1)
    t = np.abs(truth[iu]) > eps
    e = np.abs(est[iu]) > eps
    return (int(np.sum(t & e)), int(np.sum(~t & e)), int(np.sum(t & ~e)), int(np.sum(~t & ~e)))


def f1_from_counts(tp, fp, fn):
    denom = 2 * tp + fp + fn
    if denom == 0:
        # both graphs empty
        return 1.0
    return 2.0 * tp / denom


def f1_score(truth, est, eps=EDGE_EPS):
    tp, fp, fn, _ = edge_confusion(truth, est, eps)
    return f1_from_counts(tp, fp, fn)


def sparsity(est, eps=EDGE_EPS):
    """Fraction of strict-upper-triangle entries with ``|entry| <= eps``."""
    est = np.asarray(est, dtype=float)
    iu = np.triu_indices(est.shape[0], 1)
    return float(np.mean(np.abs(est[iu]) <= eps))


def evaluate(truth, est, sigma_truth=None, eps=EDGE_EPS):
    """All metrics for one estimate.

    An indefinite estimate does not raise: ``kl_div`` is ``inf`` and
    ``valid`` is False.
    """
    truth, est = _pair(truth, est)
    if sigma_truth is None:
        sigma_truth = invert_pd(truth)
    try:
        kl, valid = kl_divergence(sigma_truth, est), True
    except NotPositiveDefinite:
        kl, valid = float("inf"), False
    tp, fp, fn, tn = edge_confusion(truth, est, eps)
    return MetricsReport(
        f_norm=frobenius_distance(truth, est),
        kl_div=kl,
        f1=f1_from_counts(tp, fp, fn),
        sparsity=sparsity(est, eps),
        tp=tp, fp=fp, fn=fn, tn=tn,
        valid=valid,
    )
