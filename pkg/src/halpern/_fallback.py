"""Pure-Python (numpy) versions of the hot loops.

These work for any operator, including arbitrary Python callables, and are
used whenever the compiled extension is missing or an operator has no
native description. Signatures mirror ``_kernels.pyx``.
"""
from __future__ import annotations

import numpy as np

ESCAPED = 2
CONVERGED = 1
MAX_ITERS = 0

STOP_T, STOP_S, STOP_MAX = 0, 1, 2


def run_recursion(x1, u, T, S, c0, c1, c2, c3, domain, escape_tol, stop_mode, stop_residual,
                  stride):
    """x_{n+1} = c0_n u + c1_n x_n + c2_n T x_n + c3_n S x_n for n = 1..N-1.

    Returns (rows_n, rows_x, res_T, res_S, status, last_n). Residuals are of
    the raw operators: ||x_n - T x_n||, ||x_n - S x_n||.
    """
    N = c0.shape[0]
    x = np.array(x1, dtype=np.float64)
    d = x.size
    cap = (N - 1) // stride + 2
    rows_n = np.empty(cap, dtype=np.int64)
    rows_x = np.empty((cap, d))
    res_t = np.empty(cap)
    res_s = np.empty(cap)
    r = 0
    status = MAX_ITERS
    n = 1
    sx = None
    while True:
        tx = T(x)
        rt = float(np.sqrt(np.dot(x - tx, x - tx)))
        if S is not None:
            sx = S(x)
            rs = float(np.sqrt(np.dot(x - sx, x - sx)))
        else:
            rs = np.nan
        crit = rt if stop_mode == STOP_T else rs if stop_mode == STOP_S else max(rt, rs)
        done = stop_residual > 0 and crit <= stop_residual
        if done:
            status = CONVERGED
        if done or n == N or (n - 1) % stride == 0:
            rows_n[r] = n
            rows_x[r] = x
            res_t[r] = rt
            res_s[r] = rs
            r += 1
        if done or n == N:
            break
        k = n - 1
        nxt = c0[k] * u + c1[k] * x + c2[k] * tx
        if S is not None:
            nxt = nxt + c3[k] * sx
        x = nxt
        n += 1
        if domain.distance(x) > escape_tol:
            rows_n[r] = n
            rows_x[r] = x
            res_t[r] = np.nan
            res_s[r] = np.nan
            r += 1
            status = ESCAPED
            break
    return rows_n[:r], rows_x[:r], res_t[:r], res_s[:r], status, n


def browder_solve(z0, u, A, t, tol, max_steps):
    """Iterate z <- t u + (1 - t) A z until ||z_new - z|| <= tol. Returns (z, steps) or (z, -1)."""
    z = np.array(z0, dtype=np.float64)
    for step in range(1, max_steps + 1):
        znew = t * u + (1.0 - t) * A(z)
        diff = znew - z
        z = znew
        if np.sqrt(np.dot(diff, diff)) <= tol:
            return z, step
    return z, -1
