# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Burgers kernels; mirrors ``_fallback`` function by function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _flux(double a, double b, int scheme, double lam_lxf) noexcept nogil:
    cdef double fa, fb, ap, bm
    if scheme == 0:
        return 0.25 * (a * a + b * b) - (b - a) / (2.0 * lam_lxf)
    if scheme == 1:
        ap = a if a > 0.0 else 0.0
        bm = b if b < 0.0 else 0.0
        return 0.5 * (ap * ap + bm * bm)
    fa = 0.5 * a * a
    fb = 0.5 * b * b
    if a >= b:
        return fa if fa > fb else fb
    if a < 0.0 and b > 0.0:
        return 0.0
    return fa if fa < fb else fb


def burgers_flux(a, b, int scheme, double lam_lxf):
    cdef cnp.ndarray[double, ndim=1] av = np.ascontiguousarray(np.ravel(a), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] bv = np.ascontiguousarray(np.ravel(b), dtype=np.float64)
    cdef Py_ssize_t i, m = av.shape[0]
    out = np.empty(m)
    cdef double[::1] o = out
    for i in range(m):
        o[i] = _flux(av[i], bv[i], scheme, lam_lxf)
    return out.reshape(np.shape(a)) if np.ndim(a) else float(out[0])


def monotone_step(u, double far_left, double far_right, double lam, int scheme, double lam_lxf):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t i, n = uv.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double left_flux, right_flux, a
    with nogil:
        left_flux = _flux(far_left, uv[0], scheme, lam_lxf)
        for i in range(n):
            a = uv[i + 1] if i + 1 < n else far_right
            right_flux = _flux(uv[i], a, scheme, lam_lxf)
            o[i] = uv[i] - lam * (right_flux - left_flux)
            left_flux = right_flux
    return out


def monotone_steps(u, double far_left, double far_right, double lam, int scheme, double lam_lxf, Py_ssize_t n_steps):
    """``n_steps`` repeated calls of :func:`monotone_step` without Python overhead."""
    cur_arr = np.array(u, dtype=np.float64, copy=True, order="C")
    nxt_arr = np.empty_like(cur_arr)
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr
    cdef double[::1] tmp
    cdef Py_ssize_t i, k, n = cur.shape[0]
    cdef double left_flux, right_flux, a
    with nogil:
        for k in range(n_steps):
            left_flux = _flux(far_left, cur[0], scheme, lam_lxf)
            for i in range(n):
                a = cur[i + 1] if i + 1 < n else far_right
                right_flux = _flux(cur[i], a, scheme, lam_lxf)
                nxt[i] = cur[i] - lam * (right_flux - left_flux)
                left_flux = right_flux
            tmp = cur
            cur = nxt
            nxt = tmp
    return np.asarray(cur).copy()


cdef void _eno(const double[::1] ue, Py_ssize_t n, int k, const double[:, ::1] coef,
               double[::1] um, double[::1] up) noexcept nogil:
    cdef Py_ssize_t g = k, I, left, m, j, p, r
    cdef double a, b, vr, vl
    for I in range(g - 1, g + n + 1):
        left = I
        for m in range(1, k):
            # undivided differences of order m starting at left-1 and left
            a = _undivided(ue, left - 1, m)
            b = _undivided(ue, left, m)
            if fabs(a) <= fabs(b):
                left -= 1
        r = I - left
        vr = 0.0
        vl = 0.0
        for j in range(k):
            vr += coef[r + 1, j] * ue[left + j]
            vl += coef[r, j] * ue[left + j]
        p = I - (g - 1)
        if p < n + 1:
            um[p] = vr
        if p >= 1:
            up[p - 1] = vl


cdef inline double _undivided(const double[::1] ue, Py_ssize_t start, int m) noexcept nogil:
    # m-th forward difference of ue starting at index start (m <= 2)
    if m == 1:
        return ue[start + 1] - ue[start]
    return (ue[start + 2] - ue[start + 1]) - (ue[start + 1] - ue[start])


def eno_interfaces(u, int order, double far_left, double far_right, coef):
    if order > 3:
        raise ValueError("compiled ENO supports order <= 3")
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0]
    cdef int g = order
    ue_arr = np.empty(n + 2 * g)
    ue_arr[:g] = far_left
    ue_arr[g:g + n] = uv
    ue_arr[g + n:] = far_right
    um = np.empty(n + 1)
    up = np.empty(n + 1)
    cdef const double[:, ::1] c = np.ascontiguousarray(coef, dtype=np.float64)
    _eno(ue_arr, n, order, c, um, up)
    return um, up


def eno_rhs(u, int order, double far_left, double far_right, coef, double dx):
    um, up = eno_interfaces(u, order, far_left, far_right, coef)
    cdef double[::1] a = um
    cdef double[::1] b = up
    cdef Py_ssize_t i, n = a.shape[0] - 1
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double fl, fr
    with nogil:
        fl = _flux(a[0], b[0], 2, 1.0)
        for i in range(n):
            fr = _flux(a[i + 1], b[i + 1], 2, 1.0)
            o[i] = -(fr - fl) / dx
            fl = fr
    return out
