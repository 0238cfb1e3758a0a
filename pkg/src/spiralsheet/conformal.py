"""Conformal equivalence between the sheet complement and a vertical strip.

f(z) = exp((1 - a*i) z) maps the strip -2*pi*a/(1+a^2) < Re z < 0 onto the
complement of the single sheet (plus origin), sending the boundary lines
onto the sheet itself. The inverse picks the branch through the winding
number. Reflections composed with half-period shifts generate the
telescoping identities used by the verification module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import OnSpiral, OriginError
from .geometry import polar_parts

TWO_PI = 2.0 * math.pi


def strip_width(a):
    """Width 2*pi*a/(1+a^2) of the image strip."""
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    return TWO_PI * a / (1.0 + a * a)


def line_position(a, theta_l):
    """Re z of the vertical line that f sends onto the sheet at offset
    theta_l (theta_l = 2*pi gives the left strip boundary)."""
    return -a * theta_l / (1.0 + a * a)


@dataclass(frozen=True)
class StripPoint:
    """Strip-frame point with an optional boundary tag."""

    x: float
    y: float
    boundary: str | None = None

    @property
    def z(self):
        return complex(self.x, self.y)


class Membership(NamedTuple):
    kind: str  # "interior", "right-boundary", "left-boundary", "line", "outside"
    index: int | None = None


def _as_xy(z):
    if isinstance(z, StripPoint):
        return z.x, z.y
    if np.ndim(z) == 0:
        zz = complex(z)
        return zz.real, zz.imag
    zz = np.asarray(z, dtype=complex)
    return zz.real, zz.imag


def map_to_exterior(z, a):
    """f(z) = exp((1 - a*i) z). Defined on the closed strip; boundary
    points land on the sheet."""
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    x, y = _as_xy(z)
    out = _kernels.map_exterior_batch(x, y, a)
    if np.ndim(out) == 0:
        return complex(out)
    return out

def map_to_strip(z, a):
    """Inverse of map_to_exterior on the open sheet complement.

    Accepts a PolarPoint, an (r, theta) pair, or complex input (principal
    angle; the result does not depend on the representative). Raises
    OriginError at r <= 0 and OnSpiral within tolerance of the sheet.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    r, theta = polar_parts(z)
    if np.any(~(np.asarray(r, dtype=float) > 0)):
        raise OriginError("strip map undefined at the origin")
    x, y, _, d = _kernels.map_strip_batch(r, theta, a)
    lnr = np.log(np.asarray(r, dtype=float))
    tol = _kernels.WINDING_RTOL * (
        1.0 + np.abs(lnr) + a * np.abs(np.asarray(theta, dtype=float))
    )
    hit = np.abs(d) < tol
    if np.any(hit):
        idx = np.argmax(hit)
        raise OnSpiral(0, np.asarray(d).ravel()[idx])
    out = x + 1j * y
    if np.ndim(out) == 0:
        return complex(out)
    return out


def strip_membership(z, a, thetas=None):
    """Classify a strip-frame point against the boundary and, if a family
    offset list is given, against the interior sheet-image lines.

    Returns Membership(kind, index); index is the line number for kind
    "line". Uses the same relative tolerance as the on-sheet test.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    x, y = _as_xy(z)
    x = float(x)
    tol = _kernels.WINDING_RTOL * (1.0 + abs(x))
    if abs(x) < tol:
        return Membership("right-boundary")
    width = strip_width(a)
    if abs(x + width) < tol:
        return Membership("left-boundary")
    if x > 0 or x < -width:
        return Membership("outside")
    if thetas is not None:
        for m in range(1, len(thetas)):
            if abs(x - line_position(a, thetas[m])) < tol:
                return Membership("line", m)
    return Membership("interior")


def reflect_shift(z, a, sign=1):
    """P_+/- (z) = -conj(z) - 2*a*pi/(1+a^2) +/- 2*pi*i/(1+a^2).

    Anti-holomorphic involutions of the strip closure up to the vertical
    period; P_+ and P_- are mutually inverse.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    s = 1.0 + a * a
    return -np.conj(z) - TWO_PI * a / s + sign * TWO_PI * 1j / s


def reflect_shift_iter(z, a, n):
    """n-fold composition of P_-; even iterates reduce to the vertical
    shift z - 2*pi*n*i/(1+a^2)."""
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    s = 1.0 + a * a
    even = n - (n % 2)
    out = z - TWO_PI * even * 1j / s
    if n % 2:
        out = reflect_shift(out, a, sign=-1)
    return out
