"""Sheet geometry: parameter bundles, curve and frame quantities, winding
numbers.

A single sheet is the logarithmic spiral Z(theta, t) = t^mu * exp(a*(theta
- theta0)) * exp(i*theta), theta in R, with circulation parameter g. A
family places M such sheets at phase offsets 0 = theta_0 < ... <
theta_{M-1} < 2*pi, all sharing a and mu.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import OriginError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SpiralParams:
    """Parameters of one self-similar spiral sheet.

    Attributes
    ----------
    a : float
        Spiral pitch, must be positive.
    mu : float
        Self-similarity exponent.
    g : float
        Circulation strength.
    theta0 : float
        Phase offset of the sheet; zero for the standard single sheet.
    """

    a: float
    mu: float
    g: float
    theta0: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"pitch a must be positive, got {self.a}")


@dataclass(frozen=True)
class SpiralFamily:
    """M sheets at offsets thetas with strengths gs, shared a and mu.

    Offsets must satisfy 0 = thetas[0] < thetas[1] < ... < 2*pi.
    """

    a: float
    mu: float
    thetas: tuple
    gs: tuple

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"pitch a must be positive, got {self.a}")
        thetas = tuple(float(t) for t in self.thetas)
        gs = tuple(float(g) for g in self.gs)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "gs", gs)
        if len(thetas) == 0:
            raise ValueError("family needs at least one sheet")
        if len(gs) != len(thetas):
            raise ValueError("thetas and gs must have the same length")
        if thetas[0] != 0.0:
            raise ValueError("thetas[0] must be 0")
        for lo, hi in zip(thetas, thetas[1:]):
            if not lo < hi:
                raise ValueError("thetas must be strictly increasing")
        if thetas[-1] >= TWO_PI:
            raise ValueError("thetas must stay below 2*pi")

    @property
    def size(self):
        return len(self.thetas)

    def sheet(self, m):
        """Parameters of sheet m viewed on its own."""
        return SpiralParams(self.a, self.mu, self.gs[m], self.thetas[m])


@dataclass(frozen=True)
class PolarPoint:
    """Point given as (r, theta) with an explicit angle representative.

    The representative matters only for bookkeeping; every field in this
    package is invariant under theta -> theta + 2*pi.
    """

    r: float
    theta: float

    def __post_init__(self):
        if not self.r > 0:
            raise OriginError(f"r must be positive, got {self.r}")

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        if z == 0:
            raise OriginError("origin has no polar representation")
        return cls(abs(z), cmath.phase(z))

    def to_complex(self):
        return self.r * cmath.exp(1j * self.theta)


def polar_parts(z):
    """Normalize a point argument to (r, theta).

    Accepts a PolarPoint, an (r, theta) pair of scalars or arrays, a
    complex scalar, or a complex array. Complex inputs get the principal
    angle, which is safe because the fields are representative-invariant.
    """
    if isinstance(z, PolarPoint):
        return z.r, z.theta
    if isinstance(z, tuple):
        r, theta = z
        return r, theta
    if np.ndim(z) == 0:
        zz = complex(z)
        return abs(zz), cmath.phase(zz)
    zz = np.asarray(z, dtype=complex)
    return np.abs(zz), np.angle(zz)


def spiral_point(theta, t, p):
    """Z(theta, t) = t^mu * exp(a*(theta - theta0)) * exp(i*theta)."""
    if np.any(~(np.asarray(t, dtype=float) > 0)):
        raise ValueError("time t must be positive")
    return (
        t ** p.mu
        * np.exp(p.a * (np.asarray(theta, dtype=float) - p.theta0))
        * np.exp(1j * np.asarray(theta, dtype=float))
    )


def tangent_normal(theta, p):
    """Unit tangent and unit normal of the sheet at angle theta.

    tau = (a + i) e^{i theta} / sqrt(a^2 + 1), n = -i tau. The normal
    points to the side reached by increasing r at fixed angle.
    """
    norm = math.sqrt(p.a * p.a + 1.0)
    tau = (p.a + 1j) * np.exp(1j * np.asarray(theta, dtype=float)) / norm
    return tau, -1j * tau


def circulation(theta, t, p):
    """Circulation absorbed up to angle theta: g t^{2 mu - 1} e^{2a(theta-theta0)}."""
    if np.any(~(np.asarray(t, dtype=float) > 0)):
        raise ValueError("time t must be positive")
    return p.g * t ** (2.0 * p.mu - 1.0) * np.exp(
        2.0 * p.a * (np.asarray(theta, dtype=float) - p.theta0)
    )


def sheet_density(theta, t, p):
    """Vortex sheet density: 2 a g t^{mu-1} e^{a(theta-theta0)} / sqrt(1+a^2)."""
    if np.any(~(np.asarray(t, dtype=float) > 0)):
        raise ValueError("time t must be positive")
    return (
        2.0 * p.a * p.g * t ** (p.mu - 1.0)
        * np.exp(p.a * (np.asarray(theta, dtype=float) - p.theta0))
        / math.sqrt(1.0 + p.a * p.a)
    )


def _checked_winding(r, theta, a, theta_k):
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    if np.any(~(np.asarray(r, dtype=float) > 0)):
        raise OriginError("winding number undefined for r <= 0")
    return _kernels.winding_batch(r, theta, a, theta_k)


def winding_number(r, theta, a):
    """Minimal integer j with a*(2*pi*j - theta) + log(r) > 0.

    Counts how many turns of the sheet separate the point from the
    origin; the j-th turn is the first one strictly outside radius r
    along the ray of angle theta.
    """
    j, _ = _checked_winding(r, theta, a, 0.0)
    if np.ndim(j) == 0 or j.shape == ():
        return int(j)
    return j


def winding_number_offset(r, theta, a, theta_k):
    """Winding number relative to the sheet at phase offset theta_k.

    Equals winding_number(r, theta - theta_k, a).
    """
    j, _ = _checked_winding(r, theta, a, theta_k)
    if np.ndim(j) == 0 or j.shape == ():
        return int(j)
    return j


def sheet_distance(r, theta, a, theta_k=0.0):
    """Estimated normal distance from (r, theta) to the sheet at offset
    theta_k: |a*(2*pi*j + theta_k - theta) + log r| * r / sqrt(1 + a^2)
    at the nearest integer j."""
    _, d = _checked_winding(r, theta, a, theta_k)
    dist = np.abs(d) * np.asarray(r, dtype=float) / math.sqrt(1.0 + a * a)
    if np.ndim(dist) == 0 or dist.shape == ():
        return float(dist)
    return dist
