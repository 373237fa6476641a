"""Compiled coordinate-descent kernels.

These are the inner loops of the glasso, elastic-net and scaled-lasso
solvers. They operate in place on preallocated float64 arrays and report
failures through integer status codes so callers can raise typed errors.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_MAXITER = 1
STATUS_NOT_PD = 2


@njit(cache=True)
def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@njit(cache=True)
def lasso_cd(Q, b, pen, beta, tol, max_sweeps):
    """Minimize ``0.5 b'Qb - b'beta + sum pen_k |beta_k|`` in place.

    ``Q`` must have a positive diagonal. Returns the number of sweeps.
    """
    m = b.shape[0]
    r = b - Q @ beta
    sweeps = 0
    while sweeps < max_sweeps:
        # full sweep
        sweeps += 1
        dmax = 0.0
        for k in range(m):
            qkk = Q[k, k]
            old = beta[k]
            new = _soft(r[k] + qkk * old, pen[k]) / qkk
            if new != old:
                d = new - old
                beta[k] = new
                for i in range(m):
                    r[i] -= d * Q[i, k]
                if abs(d) > dmax:
                    dmax = abs(d)
        if dmax <= tol:
            break
        # sweeps restricted to the current support
        while sweeps < max_sweeps:
            sweeps += 1
            dmax = 0.0
            for k in range(m):
                old = beta[k]
                if old == 0.0:
                    continue
                qkk = Q[k, k]
                new = _soft(r[k] + qkk * old, pen[k]) / qkk
                if new != old:
                    d = new - old
                    beta[k] = new
                    for i in range(m):
                        r[i] -= d * Q[i, k]
                    if abs(d) > dmax:
                        dmax = abs(d)
            if dmax <= tol:
                break
    return sweeps


@njit(cache=True)
def _column_lasso(W, S, Lam, B, j, tol, max_sweeps):
    """Lasso for column ``j`` of the working covariance, skipping index j."""
    p = W.shape[0]
    r = np.empty(p)
    for k in range(p):
        if k == j:
            r[k] = 0.0
            continue
        acc = S[k, j]
        for l in range(p):
            if l != j:
                acc -= W[k, l] * B[l, j]
        r[k] = acc
    sweeps = 0
    active_only = False
    while sweeps < max_sweeps:
        sweeps += 1
        dmax = 0.0
        for k in range(p):
            if k == j:
                continue
            old = B[k, j]
            if active_only and old == 0.0:
                continue
            wkk = W[k, k]
            new = _soft(r[k] + wkk * old, Lam[k, j]) / wkk
            if new != old:
                d = new - old
                B[k, j] = new
                for i in range(p):
                    r[i] -= d * W[i, k]
                if abs(d) > dmax:
                    dmax = abs(d)
        if dmax <= tol:
            if not active_only:
                break
            active_only = False
        else:
            active_only = True


@njit(cache=True)
def glasso_bcd(S, Lam, W, B, tol_abs, max_iter, inner_tol, inner_max):
    """Blockwise coordinate descent for the weighted graphical lasso.

    ``W`` is the working covariance (diagonal already set to
    ``S_jj + Lam_jj``) and ``B`` holds the column regression coefficients
    (``B[j, j]`` unused). Both are updated in place.

    Returns ``(status, iterations, last_mean_change)``.
    """
    p = S.shape[0]
    n_off = p * (p - 1)
    beta_old = np.empty(p)
    w_new = np.empty(p)
    change = np.inf
    for it in range(max_iter):
        total = 0.0
        for j in range(p):
            for k in range(p):
                beta_old[k] = B[k, j]
            _column_lasso(W, S, Lam, B, j, inner_tol, inner_max)
            # keep the Schur complement positive; damp toward the old beta
            ok = False
            for _ in range(31):
                schur = W[j, j]
                for k in range(p):
                    if k == j:
                        continue
                    acc = 0.0
                    for l in range(p):
                        if l != j:
                            acc += W[k, l] * B[l, j]
                    w_new[k] = acc
                    schur -= acc * B[k, j]
                if schur > 1e-12 * W[j, j]:
                    ok = True
                    break
                for k in range(p):
                    if k != j:
                        B[k, j] = beta_old[k] + 0.5 * (B[k, j] - beta_old[k])
            if not ok:
                return STATUS_NOT_PD, it, change
            for k in range(p):
                if k == j:
                    continue
                total += 2.0 * abs(w_new[k] - W[k, j])
                W[k, j] = w_new[k]
                W[j, k] = w_new[k]
        change = total / n_off
        if change <= tol_abs:
            return STATUS_OK, it + 1, change
    return STATUS_MAXITER, max_iter, change


@njit(cache=True)
def precision_from_bcd(W, B):
    """Recover the precision matrix from the working covariance and B."""
    p = W.shape[0]
    Omega = np.empty((p, p))
    for j in range(p):
        acc = W[j, j]
        for k in range(p):
            if k != j:
                acc -= W[k, j] * B[k, j]
        d = 1.0 / acc
        Omega[j, j] = d
        for k in range(p):
            if k != j:
                Omega[k, j] = -B[k, j] * d
    return Omega


@njit(cache=True)
def newton_direction_cd(X, W, S, Lam, mu, rows, cols, n_sweeps):
    """Coordinate descent on the second-order model around ``X``.

    Solves (approximately) for the Newton direction ``D`` of
    ``-log det X + tr(SX) + mu/2 ||X||_F^2 + sum Lam_ij |X_ij|``,
    sweeping only the free coordinates ``(rows[k], cols[k])`` with
    ``rows[k] <= cols[k]``. ``W`` must equal ``inv(X)``.
    """
    p = X.shape[0]
    D = np.zeros((p, p))
    U = np.zeros((p, p))  # U = D @ W
    m = rows.shape[0]
    for _ in range(n_sweeps):
        for idx in range(m):
            i = rows[idx]
            j = cols[idx]
            wdw = 0.0
            for k in range(p):
                wdw += W[i, k] * U[k, j]
            if i == j:
                a = W[i, i] * W[i, i] + mu
            else:
                a = W[i, j] * W[i, j] + W[i, i] * W[j, j] + mu
            c = X[i, j] + D[i, j]
            b = S[i, j] - W[i, j] + wdw + mu * c
            z = _soft(c * a - b, Lam[i, j]) / a
            delta = z - c
            if delta == 0.0:
                continue
            D[i, j] += delta
            if i != j:
                D[j, i] += delta
                for k in range(p):
                    U[i, k] += delta * W[j, k]
                    U[j, k] += delta * W[i, k]
            else:
                for k in range(p):
                    U[i, k] += delta * W[i, k]
    return D
