import numpy as np
import pytest


def random_pd(rng, p, cond=None):
    """Random SPD matrix; with ``cond`` the eigenvalues span [1, cond]."""
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    if cond is None:
        vals = rng.uniform(0.2, 3.0, p)
    else:
        vals = np.geomspace(1.0, cond, p)
    M = Q @ np.diag(vals) @ Q.T
    return (M + M.T) / 2.0


def sparse_pd(rng, p, density=0.3):
    A = np.where(rng.random((p, p)) < density, rng.uniform(-0.5, 0.5, (p, p)), 0.0)
    A = np.triu(A, 1)
    A = A + A.T
    lam_min = np.linalg.eigvalsh(A)[0]
    return A + (abs(lam_min) + 0.5) * np.eye(p)


def random_cov(rng, p, n):
    """Sample covariance (divisor n) of n draws from a sparse-precision Gaussian."""
    omega = sparse_pd(rng, p)
    sigma = np.linalg.inv(omega)
    L = np.linalg.cholesky((sigma + sigma.T) / 2)
    X = rng.standard_normal((n, p)) @ L.T
    X = X - X.mean(axis=0)
    S = X.T @ X / n
    return (S + S.T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
