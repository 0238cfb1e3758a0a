"""One self-similar sheet: exterior closed-form fields, the matched
(mu, g) solver, and the explicit strip-frame solution.

Everything is driven by the spectral constant A = -2ai/(a+i) and the two
angles alpha = 4*pi*a^2/(1+a^2), beta = 4*pi*a/(1+a^2); note 2*pi*Re A =
-beta and 2*pi*Im A = -alpha. The strip solution degenerates when
sin(alpha) = 0, i.e. a^2 in {1/3, 1, 3}; the exterior formulas do not.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from . import _kernels
from .errors import OnSpiral, OriginError, ResonantParameter, SingularSystem
from .geometry import polar_parts

TWO_PI = 2.0 * math.pi

# |sin(alpha)| below this counts as resonant.
RESONANCE_TOL = 1e-9


def spectral_constant(a):
    """A = -2ai/(a+i), split exactly: Re A = -2a/(1+a^2), Im A = -2a^2/(1+a^2)."""
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    s = 1.0 + a * a
    return complex(-2.0 * a / s, -2.0 * a * a / s)


def _alpha_beta(a):
    s = 1.0 + a * a
    return 4.0 * math.pi * a * a / s, 4.0 * math.pi * a / s


def resonance_constant(a, tol=RESONANCE_TOL):
    """C_a = (cos(alpha) - e^{-beta}) / sin(alpha).

    Raises ResonantParameter when sin(alpha) vanishes (within tol), which
    happens exactly at a^2 in {1/3, 1, 3}.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    alpha, beta = _alpha_beta(a)
    sa = math.sin(alpha)
    if abs(sa) < tol:
        raise ResonantParameter(f"sin(alpha) = {sa:.3e} at a = {a}")
    return (math.cos(alpha) - math.exp(-beta)) / sa


def coth_pi_spectral(a):
    """coth(pi A) evaluated through real exponentials.

    Equal to (e^{-beta} - e^{beta} + 2i sin(alpha)) / D with
    D = e^{beta} + e^{-beta} - 2 cos(alpha) > 0, so it is finite for every
    a > 0, including the resonant pitches.
    """
    alpha, beta = _alpha_beta(a)
    d = math.exp(beta) + math.exp(-beta) - 2.0 * math.cos(alpha)
    if d == 0.0:
        # beta^2 + alpha^2 below double rounding; coth blows up as a -> 0
        raise SingularSystem(f"coth(pi A) not resolvable at a = {a}")
    return complex((math.exp(-beta) - math.exp(beta)) / d, 2.0 * math.sin(alpha) / d)


def matching_residual(a, mu, g):
    """Residual of the combined matching condition

        a^2 + 1 - 2 mu + 2 a mu i = -2 a^2 g coth(pi A).

    Real part measures velocity matching, imaginary part pressure
    matching. Zero (to rounding) at the solved pair.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    return complex(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) + 2.0 * a * a * g * coth_pi_spectral(a)


def pressure_matching_residual(a, mu, g):
    """Residual of 2 a g sin(alpha) = mu (2 cos(alpha) - e^{-beta} - e^{beta})."""
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    alpha, beta = _alpha_beta(a)
    return 2.0 * a * g * math.sin(alpha) - mu * (
        2.0 * math.cos(alpha) - math.exp(-beta) - math.exp(beta)
    )


def solve_matching(a):
    """Solve the matching condition for (mu, g) at pitch a.

    The complex condition splits into a real 2x2 system in (mu, g); the
    solution is unique away from the degenerate small-a limit. At a = 1 it
    gives mu = 0 and g = tanh(pi).
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    c = coth_pi_spectral(a)
    m = np.array([[-2.0, 2.0 * a * a * c.real], [2.0 * a, 2.0 * a * a * c.imag]])
    rhs = np.array([-(a * a + 1.0), 0.0])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = abs(m[0, 0] * m[1, 1]) + abs(m[0, 1] * m[1, 0])
    if abs(det) <= 1e-12 * scale:
        raise SingularSystem(f"matching system degenerate at a = {a}")
    mu, g = np.linalg.solve(m, rhs)
    return float(mu), float(g)


def _unwrap(values):
    if np.ndim(values) == 0:
        return np.asarray(values).item()
    return values


def _check_status(status, r, theta, a, theta0):
    status = np.asarray(status)
    if np.any(status == _kernels.STATUS_ORIGIN):
        raise OriginError("field evaluation at the origin")
    mask = status == _kernels.STATUS_ON_SHEET
    if np.any(mask):
        _, d = _kernels.winding_batch(r, theta, a, theta0)
        raise OnSpiral(0, np.asarray(d).ravel()[np.argmax(np.asarray(mask).ravel())])


def complex_potential(z, p):
    """Velocity potential of the profile field.

    Phi(z) = g / (1 - e^{2 pi A}) * e^{theta0 A}
             * exp(i A (log r + i (theta - 2 pi J)))

    with J the winding number relative to theta0. Independent of the
    angle representative. Raises OnSpiral within the evaluation keep-out
    of the sheet and OriginError at r <= 0.
    """
    r, theta = polar_parts(z)
    phi, _, status = _kernels.single_field_batch(r, theta, p.a, p.g, p.theta0)
    _check_status(status, r, theta, p.a, p.theta0)
    return _unwrap(phi)


def profile_velocity(z, p):
    """Self-similar profile velocity w (the t = 1 field).

    w(z) = e^{i theta} * 2 a g / (r (a - i)) *
           conj(r^{iA} e^{A(theta0 - theta)} e^{2 pi J A} / (1 - e^{2 pi A}))

    Satisfies conj(w) = dPhi/dz away from the sheet.
    """
    r, theta = polar_parts(z)
    _, w, status = _kernels.single_field_batch(r, theta, p.a, p.g, p.theta0)
    _check_status(status, r, theta, p.a, p.theta0)
    return _unwrap(w)


def self_similar_velocity(z, t, p):
    """v(z, t) = t^{mu - 1} w(z t^{-mu}): the time-t velocity field."""
    if not t > 0:
        raise ValueError("time t must be positive")
    r, theta = polar_parts(z)
    r = np.asarray(r, dtype=float) * t ** (-p.mu)
    _, w, status = _kernels.single_field_batch(r, theta, p.a, p.g, p.theta0)
    _check_status(status, r, theta, p.a, p.theta0)
    return _unwrap(t ** (p.mu - 1.0) * np.asarray(w))


def strip_velocity(z, a, mu):
    """Strip-frame velocity of the matched single sheet.

    w1 = mu (C_a sin 2ax + cos 2ax) e^{2ay},
    w2 = mu (sin 2ax - C_a cos 2ax) e^{2ay}.

    Undefined at resonant a (ResonantParameter). The formula is entire,
    so no domain policing is done; it represents the flow only on the
    closed strip.
    """
    ca = resonance_constant(a)
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    amp = mu * np.exp(2.0 * a * y)
    s, c = np.sin(2.0 * a * x), np.cos(2.0 * a * x)
    return _unwrap(amp * (ca * s + c) + 1j * amp * (s - ca * c))


def strip_potential(z, a, mu):
    """Strip-frame complex potential, with dPhi/dz = conj(strip_velocity).

    Phi(z) = (mu / 2a) * (e^{-beta} - e^{-i alpha}) / sin(alpha) * e^{-2aiz}.
    """
    resonance_constant(a)  # raises at resonant a
    alpha, beta = _alpha_beta(a)
    k = (math.exp(-beta) - cmath.exp(-1j * alpha)) / math.sin(alpha)
    return _unwrap((mu / (2.0 * a)) * k * np.exp(-2j * a * np.asarray(z, dtype=complex)))


def h_function(z, a, mu):
    """Boundary building block h(z) = mu (2 + iQ) e^{-2aiz} with
    Q = (2 cos(alpha) - e^{-beta} - e^{beta}) / sin(alpha).

    On the right strip boundary, h(iy) = 2 mu e^{2ay} + 2 i a g e^{2ay}
    once (mu, g) solve the matching condition. Reflection iterates of h
    telescope to the strip velocity's second component.
    """
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    alpha, beta = _alpha_beta(a)
    sa = math.sin(alpha)
    if abs(sa) < RESONANCE_TOL:
        raise ResonantParameter(f"sin(alpha) = {sa:.3e} at a = {a}")
    q = (2.0 * math.cos(alpha) - math.exp(-beta) - math.exp(beta)) / sa
    return _unwrap(mu * complex(2.0, q) * np.exp(-2j * a * np.asarray(z, dtype=complex)))
