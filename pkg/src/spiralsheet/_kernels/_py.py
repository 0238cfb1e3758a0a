"""Pure-numpy kernel backend.

Fill-style functions over contiguous 1-D arrays, signature-compatible with
the compiled backend in _c.pyx. Callers allocate outputs. Status codes:
0 ok, 1 on a sheet/line, 2 origin (r <= 0), 3 outside the strip.
"""

import cmath
import math

import numpy as np

TWO_PI = 2.0 * math.pi


def _spectral(a):
    # A = -2ai/(a+i) split into real and imaginary parts
    s = 1.0 + a * a
    return -2.0 * a / s, -2.0 * a * a / s


def winding_fill(r, theta, a, theta_k, j_out, d_out):
    # minimal integer j with a*(2*pi*j + theta_k - theta) + log r > 0;
    # d is the same expression at the nearest integer, so its magnitude
    # measures distance to the sheet and its sign gives the side
    lnr = np.log(r)
    tp = theta - theta_k
    u = (tp - lnr / a) / TWO_PI
    j_out[:] = np.floor(u).astype(np.int64) + 1
    jn = np.rint(u)
    d_out[:] = a * (TWO_PI * jn - tp) + lnr


def map_exterior_fill(x, y, a, out):
    out[:] = np.exp((x + a * y) + 1j * (y - a * x))


def map_strip_fill(r, theta, a, x_out, y_out, j_out, d_out):
    winding_fill(r, theta, a, 0.0, j_out, d_out)
    lnr = np.log(r)
    jm = j_out.astype(np.float64) - 1.0
    s = 1.0 + a * a
    x_out[:] = (lnr - a * theta + TWO_PI * a * jm) / s
    y_out[:] = (theta + a * lnr - TWO_PI * jm) / s


def _field_terms(r, theta, a, g, theta_k, rtol, excl):
    """Potential/velocity contribution of one sheet plus its on-sheet mask."""
    re_a, im_a = _spectral(a)
    A = complex(re_a, im_a)
    inv1me = 1.0 / (1.0 - cmath.exp(TWO_PI * A))
    lnr = np.log(r)
    tp = theta - theta_k
    u = (tp - lnr / a) / TWO_PI
    j = np.floor(u) + 1.0
    jn = np.rint(u)
    d = a * (TWO_PI * jn - tp) + lnr
    on = np.abs(d) < np.maximum(rtol * (1.0 + np.abs(lnr) + a * np.abs(tp)), excl)
    E = np.exp(1j * A * lnr + A * (theta_k - theta + TWO_PI * j))
    phi = (g * inv1me) * E
    w = np.exp(1j * theta) * (2.0 * a * g / (r * (a - 1j))) * np.conj(inv1me * E)
    return phi, w, on


def single_field_fill(r, theta, a, g, theta0, rtol, excl, phi_out, w_out, status_out):
    bad = ~(r > 0.0)
    rs = np.where(bad, 1.0, r)
    phi, w, on = _field_terms(rs, theta, a, g, theta0, rtol, excl)
    status_out[:] = 0
    status_out[on] = 1
    status_out[bad] = 2
    flagged = status_out != 0
    phi[flagged] = complex(np.nan, np.nan)
    w[flagged] = complex(np.nan, np.nan)
    phi_out[:] = phi
    w_out[:] = w


def family_field_fill(
    r, theta, a, thetas, gs, rtol, excl, phi_out, w_out, status_out, which_out
):
    bad = ~(r > 0.0)
    rs = np.where(bad, 1.0, r)
    phi = np.zeros(r.shape, np.complex128)
    w = np.zeros(r.shape, np.complex128)
    status_out[:] = 0
    which_out[:] = -1
    for l in range(len(thetas)):
        phi_l, w_l, on = _field_terms(rs, theta, a, gs[l], thetas[l], rtol, excl)
        hit = on & (status_out == 0)
        status_out[hit] = 1
        which_out[hit] = l
        phi += phi_l
        w += w_l
    status_out[bad] = 2
    flagged = status_out != 0
    phi[flagged] = complex(np.nan, np.nan)
    w[flagged] = complex(np.nan, np.nan)
    phi_out[:] = phi
    w_out[:] = w


def family_strip_fill(x, y, a, thetas, a1, a2, ltol, w_out, status_out, which_out):
    re_a, im_a = _spectral(a)
    s = 1.0 + a * a
    status_out[:] = 0
    which_out[:] = -1
    tol = ltol * (1.0 + np.abs(x))
    # sheet-image lines, including the left boundary at theta = 2*pi
    for l in range(len(thetas) + 1):
        th = TWO_PI if l == len(thetas) else thetas[l]
        hit = (np.abs(x + a * th / s) < tol) & (status_out == 0)
        status_out[hit] = 1
        which_out[hit] = l
    outside = ((x > 0.0) | (x < -TWO_PI * a / s)) & (status_out == 0)
    status_out[outside] = 3
    w1 = np.zeros(x.shape, np.float64)
    w2 = np.zeros(x.shape, np.float64)
    for l in range(len(thetas)):
        ind = (x < -a * thetas[l] / s).astype(np.float64)
        c = thetas[l] + TWO_PI * (ind - 1.0)
        amp = np.exp(2.0 * a * y + c * re_a)
        ph = 2.0 * a * x - c * im_a
        w1 += amp * (a1[l] * np.sin(ph) + a2[l] * np.cos(ph))
        w2 += amp * (a2[l] * np.sin(ph) - a1[l] * np.cos(ph))
    w = w1 + 1j * w2
    w[status_out != 0] = complex(np.nan, np.nan)
    w_out[:] = w
