# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for operators with a native description.

Operator codes: 0 identity, 1 box projection, 2 ball projection,
3 halfspace projection, 4 affine map followed by a projection (post code
0..3). Parameter layouts match ``ConvexSet.native`` and
``operators.make_affine_operator``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, NAN, fmax

cnp.import_array()

DEF ESCAPED = 2
DEF CONVERGED = 1
DEF MAX_ITERS = 0


cdef void _project(int kind, const double[::1] p, double[::1] y, Py_ssize_t d) noexcept nogil:
    """Project y onto the set (kind, p) in place."""
    cdef Py_ssize_t i
    cdef double s, r, aa
    if kind == 1:
        for i in range(d):
            if y[i] < p[i]:
                y[i] = p[i]
            elif y[i] > p[d + i]:
                y[i] = p[d + i]
    elif kind == 2:
        s = 0.0
        for i in range(d):
            s += (y[i] - p[i]) * (y[i] - p[i])
        r = sqrt(s)
        if r > p[d]:
            s = p[d] / r
            for i in range(d):
                y[i] = p[i] + (y[i] - p[i]) * s
    elif kind == 3:
        s = 0.0
        aa = 0.0
        for i in range(d):
            s += p[i] * y[i]
            aa += p[i] * p[i]
        s = (s - p[d]) / aa
        if s > 0.0:
            for i in range(d):
                y[i] = y[i] - s * p[i]


cdef void _apply(int kind, const double[::1] p, int post, const double[::1] pp,
                 const double[::1] x, double[::1] out, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    if kind == 4:
        for i in range(d):
            s = 0.0
            for j in range(d):
                s += p[i * d + j] * x[j]
            out[i] = s + p[d * d + i]
        _project(post, pp, out, d)
    else:
        for i in range(d):
            out[i] = x[i]
        _project(kind, p, out, d)


cdef double _dist(const double[::1] a, const double[::1] b, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(d):
        s += (a[i] - b[i]) * (a[i] - b[i])
    return sqrt(s)


cdef double _set_distance(int kind, const double[::1] p, const double[::1] x,
                          double[::1] work, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i
    if kind == 0:
        return 0.0
    for i in range(d):
        work[i] = x[i]
    _project(kind, p, work, d)
    return _dist(x, work, d)


def apply_native(int kind, double[::1] params, int post, double[::1] post_params, x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    _apply(kind, params, post, post_params, xv, ov, xv.shape[0])
    return out


def run_recursion(x1, u,
                  int t_kind, double[::1] t_par, int t_post, double[::1] t_post_par,
                  int s_kind, double[::1] s_par, int s_post, double[::1] s_post_par,
                  double[::1] c0, double[::1] c1, double[::1] c2, double[::1] c3,
                  int dom_kind, double[::1] dom_par, double escape_tol,
                  int stop_mode, double stop_residual, Py_ssize_t stride):
    """Anchored recursion x_{n+1} = c0 u + c1 x + c2 T x + c3 S x (s_kind < 0: no S)."""
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t d = uv.shape[0]
    cdef Py_ssize_t N = c0.shape[0]
    cdef Py_ssize_t cap = (N - 1) // stride + 2
    rows_n_arr = np.empty(cap, dtype=np.int64)
    rows_x_arr = np.empty((cap, d))
    res_t_arr = np.empty(cap)
    res_s_arr = np.empty(cap)
    cdef long long[::1] rows_n = rows_n_arr
    cdef double[:, ::1] rows_x = rows_x_arr
    cdef double[::1] res_t = res_t_arr
    cdef double[::1] res_s = res_s_arr
    x_arr = np.array(x1, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] nx = np.empty(d)
    cdef double[::1] tx = np.empty(d)
    cdef double[::1] sx = np.empty(d)
    cdef double[::1] work = np.empty(d)
    cdef double[::1] tmp
    cdef Py_ssize_t n = 1, r = 0, k, i
    cdef int status = MAX_ITERS
    cdef bint has_s = s_kind >= 0
    cdef bint done
    cdef double rt, rs, crit, a0, a1, a2, a3
    with nogil:
        while True:
            _apply(t_kind, t_par, t_post, t_post_par, x, tx, d)
            rt = _dist(x, tx, d)
            if has_s:
                _apply(s_kind, s_par, s_post, s_post_par, x, sx, d)
                rs = _dist(x, sx, d)
            else:
                rs = NAN
            if stop_mode == 0:
                crit = rt
            elif stop_mode == 1:
                crit = rs
            else:
                crit = fmax(rt, rs)
            done = stop_residual > 0 and crit <= stop_residual
            if done:
                status = CONVERGED
            if done or n == N or (n - 1) % stride == 0:
                rows_n[r] = n
                for i in range(d):
                    rows_x[r, i] = x[i]
                res_t[r] = rt
                res_s[r] = rs
                r += 1
            if done or n == N:
                break
            k = n - 1
            a0 = c0[k]
            a1 = c1[k]
            a2 = c2[k]
            a3 = c3[k]
            if has_s:
                for i in range(d):
                    nx[i] = a0 * uv[i] + a1 * x[i] + a2 * tx[i] + a3 * sx[i]
            else:
                for i in range(d):
                    nx[i] = a0 * uv[i] + a1 * x[i] + a2 * tx[i]
            tmp = x
            x = nx
            nx = tmp
            n += 1
            if _set_distance(dom_kind, dom_par, x, work, d) > escape_tol:
                rows_n[r] = n
                for i in range(d):
                    rows_x[r, i] = x[i]
                res_t[r] = NAN
                res_s[r] = NAN
                r += 1
                status = ESCAPED
                break
    return rows_n_arr[:r], rows_x_arr[:r], res_t_arr[:r], res_s_arr[:r], status, n


def browder_solve(z0, u, int kind, double[::1] par, int post, double[::1] post_par,
                  double weight, double t, double tol, long long max_steps):
    """Iterate z <- t u + (1 - t) A z, A = (1 - weight) I + weight T, until a step <= tol."""
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t d = uv.shape[0]
    z_arr = np.array(z0, dtype=np.float64)
    cdef double[::1] z = z_arr
    cdef double[::1] tz = np.empty(d)
    cdef long long step
    cdef Py_ssize_t i
    cdef double s, v, az
    cdef long long found = -1
    with nogil:
        for step in range(1, max_steps + 1):
            _apply(kind, par, post, post_par, z, tz, d)
            s = 0.0
            for i in range(d):
                az = (1.0 - weight) * z[i] + weight * tz[i]
                v = t * uv[i] + (1.0 - t) * az
                s += (v - z[i]) * (v - z[i])
                z[i] = v
            if sqrt(s) <= tol:
                found = step
                break
    return z_arr, found
