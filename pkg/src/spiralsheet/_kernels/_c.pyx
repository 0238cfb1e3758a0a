# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend. Same fill signatures and status semantics as
the pure backend in _py.py; keep the two in lockstep."""

from libc.math cimport cos, exp, fabs, floor, log, rint, sin

cdef extern from "complex.h":
    double complex cexp(double complex z) nogil
    double complex conj(double complex z) nogil

cdef double TWO_PI = 6.283185307179586476925286766559

cdef double complex NANC = float("nan") + 1j * float("nan")


cdef inline double _re_a(double a) nogil:
    return -2.0 * a / (1.0 + a * a)


cdef inline double _im_a(double a) nogil:
    return -2.0 * a * a / (1.0 + a * a)


def winding_fill(double[::1] r, double[::1] theta, double a, double theta_k,
                 long long[::1] j_out, double[::1] d_out):
    cdef Py_ssize_t i, n = r.shape[0]
    cdef double lnr, tp, u, jn
    for i in range(n):
        lnr = log(r[i])
        tp = theta[i] - theta_k
        u = (tp - lnr / a) / TWO_PI
        j_out[i] = <long long>floor(u) + 1
        jn = rint(u)
        d_out[i] = a * (TWO_PI * jn - tp) + lnr


def map_exterior_fill(double[::1] x, double[::1] y, double a,
                      double complex[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    for i in range(n):
        out[i] = cexp((x[i] + a * y[i]) + 1j * (y[i] - a * x[i]))


def map_strip_fill(double[::1] r, double[::1] theta, double a,
                   double[::1] x_out, double[::1] y_out,
                   long long[::1] j_out, double[::1] d_out):
    cdef Py_ssize_t i, n = r.shape[0]
    cdef double lnr, tp, u, jn, jm, s = 1.0 + a * a
    for i in range(n):
        lnr = log(r[i])
        tp = theta[i]
        u = (tp - lnr / a) / TWO_PI
        j_out[i] = <long long>floor(u) + 1
        jn = rint(u)
        d_out[i] = a * (TWO_PI * jn - tp) + lnr
        jm = <double>j_out[i] - 1.0
        x_out[i] = (lnr - a * theta[i] + TWO_PI * a * jm) / s
        y_out[i] = (theta[i] + a * lnr - TWO_PI * jm) / s


def single_field_fill(double[::1] r, double[::1] theta, double a, double g,
                      double theta0, double rtol, double excl,
                      double complex[::1] phi_out, double complex[::1] w_out,
                      signed char[::1] status_out):
    cdef Py_ssize_t i, n = r.shape[0]
    cdef double complex A = _re_a(a) + 1j * _im_a(a)
    cdef double complex inv1me = 1.0 / (1.0 - cexp(TWO_PI * A))
    cdef double complex E
    cdef double lnr, tp, u, j, jn, d, thr
    for i in range(n):
        if not r[i] > 0.0:
            status_out[i] = 2
            phi_out[i] = NANC
            w_out[i] = NANC
            continue
        lnr = log(r[i])
        tp = theta[i] - theta0
        u = (tp - lnr / a) / TWO_PI
        j = floor(u) + 1.0
        jn = rint(u)
        d = a * (TWO_PI * jn - tp) + lnr
        thr = rtol * (1.0 + fabs(lnr) + a * fabs(tp))
        if excl > thr:
            thr = excl
        if fabs(d) < thr:
            status_out[i] = 1
            phi_out[i] = NANC
            w_out[i] = NANC
            continue
        status_out[i] = 0
        E = cexp(1j * A * lnr + A * (theta0 - theta[i] + TWO_PI * j))
        phi_out[i] = g * inv1me * E
        w_out[i] = cexp(1j * theta[i]) * (2.0 * a * g / (r[i] * (a - 1j))) \
            * conj(inv1me * E)


def family_field_fill(double[::1] r, double[::1] theta, double a,
                      double[::1] thetas, double[::1] gs,
                      double rtol, double excl,
                      double complex[::1] phi_out, double complex[::1] w_out,
                      signed char[::1] status_out, int[::1] which_out):
    cdef Py_ssize_t i, l, n = r.shape[0], m = thetas.shape[0]
    cdef double complex A = _re_a(a) + 1j * _im_a(a)
    cdef double complex inv1me = 1.0 / (1.0 - cexp(TWO_PI * A))
    cdef double complex E, phi, w, pref
    cdef double lnr, tp, u, j, jn, d, thr
    cdef signed char status
    cdef int which
    for i in range(n):
        which_out[i] = -1
        if not r[i] > 0.0:
            status_out[i] = 2
            phi_out[i] = NANC
            w_out[i] = NANC
            continue
        lnr = log(r[i])
        phi = 0.0
        w = 0.0
        status = 0
        which = -1
        pref = cexp(1j * theta[i]) * (2.0 * a / (r[i] * (a - 1j)))
        for l in range(m):
            tp = theta[i] - thetas[l]
            u = (tp - lnr / a) / TWO_PI
            j = floor(u) + 1.0
            jn = rint(u)
            d = a * (TWO_PI * jn - tp) + lnr
            thr = rtol * (1.0 + fabs(lnr) + a * fabs(tp))
            if excl > thr:
                thr = excl
            if fabs(d) < thr and status == 0:
                status = 1
                which = l
            E = cexp(1j * A * lnr + A * (thetas[l] - theta[i] + TWO_PI * j))
            phi = phi + gs[l] * inv1me * E
            w = w + pref * gs[l] * conj(inv1me * E)
        status_out[i] = status
        which_out[i] = which
        if status != 0:
            phi_out[i] = NANC
            w_out[i] = NANC
        else:
            phi_out[i] = phi
            w_out[i] = w


def family_strip_fill(double[::1] x, double[::1] y, double a,
                      double[::1] thetas, double[::1] a1, double[::1] a2,
                      double ltol, double complex[::1] w_out,
                      signed char[::1] status_out, int[::1] which_out):
    cdef Py_ssize_t i, l, n = x.shape[0], m = thetas.shape[0]
    cdef double re_a = _re_a(a), im_a = _im_a(a), s = 1.0 + a * a
    cdef double th, tol, w1, w2, ind, c, amp, ph
    cdef signed char status
    cdef int which
    for i in range(n):
        status = 0
        which = -1
        tol = ltol * (1.0 + fabs(x[i]))
        for l in range(m + 1):
            th = TWO_PI if l == m else thetas[l]
            if fabs(x[i] + a * th / s) < tol:
                status = 1
                which = <int>l
                break
        if status == 0 and (x[i] > 0.0 or x[i] < -TWO_PI * a / s):
            status = 3
        status_out[i] = status
        which_out[i] = which
        if status != 0:
            w_out[i] = NANC
            continue
        w1 = 0.0
        w2 = 0.0
        for l in range(m):
            ind = 1.0 if x[i] < -a * thetas[l] / s else 0.0
            c = thetas[l] + TWO_PI * (ind - 1.0)
            amp = exp(2.0 * a * y[i] + c * re_a)
            ph = 2.0 * a * x[i] - c * im_a
            w1 += amp * (a1[l] * sin(ph) + a2[l] * cos(ph))
            w2 += amp * (a2[l] * sin(ph) - a1[l] * cos(ph))
        w_out[i] = w1 + 1j * w2
