"""Kernel dispatch: compiled backend when available, numpy fallback otherwise.

Public modules call these batch functions for anything per-point. Both
backends implement the same fill signatures; selection happens once at
import. Set SPIRALSHEET_PURE=1 to force the numpy backend.
"""

import os

import numpy as np

from . import _py

if os.environ.get("SPIRALSHEET_PURE"):
    _impl = _py
    BACKEND = "python"
else:
    try:
        from . import _c as _impl

        BACKEND = "c"
    except ImportError:
        _impl = _py
        BACKEND = "python"

# On-sheet tolerance for the winding/map layer, scaled by 1+|log r|+a|theta'|.
WINDING_RTOL = 1e-12
# Field-evaluation keep-out half-width around each sheet, in units of the
# local radius (multiplied by sqrt(1+a^2) to convert to the defining
# expression a*(2*pi*j + theta_k - theta) + log r).
FIELD_EXCLUSION = 1e-9

STATUS_OK = 0
STATUS_ON_SHEET = 1
STATUS_ORIGIN = 2
STATUS_OUTSIDE = 3


def _prep(*arrays):
    bc = np.broadcast_arrays(*[np.asarray(a, dtype=np.float64) for a in arrays])
    shape = bc[0].shape
    return [np.ascontiguousarray(a).ravel() for a in bc], shape


def _excl(a):
    return FIELD_EXCLUSION * np.sqrt(1.0 + a * a)


def winding_batch(r, theta, a, theta_k=0.0):
    (r, theta), shape = _prep(r, theta)
    j = np.empty(r.shape, np.int64)
    d = np.empty(r.shape, np.float64)
    _impl.winding_fill(r, theta, float(a), float(theta_k), j, d)
    return j.reshape(shape), d.reshape(shape)


def map_exterior_batch(x, y, a):
    (x, y), shape = _prep(x, y)
    out = np.empty(x.shape, np.complex128)
    _impl.map_exterior_fill(x, y, float(a), out)
    return out.reshape(shape)


def map_strip_batch(r, theta, a):
    (r, theta), shape = _prep(r, theta)
    x = np.empty(r.shape, np.float64)
    y = np.empty(r.shape, np.float64)
    j = np.empty(r.shape, np.int64)
    d = np.empty(r.shape, np.float64)
    _impl.map_strip_fill(r, theta, float(a), x, y, j, d)
    return x.reshape(shape), y.reshape(shape), j.reshape(shape), d.reshape(shape)


def single_field_batch(r, theta, a, g, theta0=0.0):
    (r, theta), shape = _prep(r, theta)
    phi = np.empty(r.shape, np.complex128)
    w = np.empty(r.shape, np.complex128)
    status = np.empty(r.shape, np.int8)
    _impl.single_field_fill(
        r, theta, float(a), float(g), float(theta0),
        WINDING_RTOL, _excl(a), phi, w, status,
    )
    return phi.reshape(shape), w.reshape(shape), status.reshape(shape)


def family_field_batch(r, theta, a, thetas, gs):
    (r, theta), shape = _prep(r, theta)
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    gs = np.ascontiguousarray(gs, dtype=np.float64)
    phi = np.empty(r.shape, np.complex128)
    w = np.empty(r.shape, np.complex128)
    status = np.empty(r.shape, np.int8)
    which = np.empty(r.shape, np.int32)
    _impl.family_field_fill(
        r, theta, float(a), thetas, gs,
        WINDING_RTOL, _excl(a), phi, w, status, which,
    )
    return phi.reshape(shape), w.reshape(shape), status.reshape(shape), which.reshape(shape)


def family_strip_batch(x, y, a, thetas, a1, a2):
    (x, y), shape = _prep(x, y)
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    a1 = np.ascontiguousarray(a1, dtype=np.float64)
    a2 = np.ascontiguousarray(a2, dtype=np.float64)
    w = np.empty(x.shape, np.complex128)
    status = np.empty(x.shape, np.int8)
    which = np.empty(x.shape, np.int32)
    _impl.family_strip_fill(
        x, y, float(a), thetas, a1, a2, WINDING_RTOL, w, status, which
    )
    return w.reshape(shape), status.reshape(shape), which.reshape(shape)
