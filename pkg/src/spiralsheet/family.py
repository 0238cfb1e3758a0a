"""Finite sheet families: the coupling system for (gs, mu), the strip
ansatz built from per-sheet coefficients, boundary residuals of the six
line conditions, and the exterior closed forms.

The strip picture: each sheet at offset theta_l maps to the vertical line
Re z = -a*theta_l/(1+a^2); the ansatz switches branch across each line
through the indicator [Re z < line], so all formulas below are piecewise
in x and the one-sided limits at the lines are explicit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .conformal import line_position
from .errors import OnCutLine, OnSpiral, OriginError, SingularSystem
from .geometry import SpiralFamily, polar_parts
from .single_spiral import _alpha_beta, spectral_constant

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CouplingMatrix:
    """Pairwise sheet coupling.

    entries[m, k] = e^{A(theta_k - theta_m)} * (e^{-pi A} if k > m,
    cosh(pi A) if k = m, e^{pi A} if k < m); scaled = entries / sinh(pi A).
    """

    entries: np.ndarray
    scaled: np.ndarray


@dataclass(frozen=True)
class StripCoefficients:
    """Per-sheet ansatz amplitudes.

    a1[m] = 2 a g_m (e^{-beta} - cos alpha) / D,
    a2[m] = -2 a g_m sin(alpha) / D,
    with D = e^{beta} + e^{-beta} - 2 cos(alpha), and the complex identity
    -a1 + i a2 = 2 a g e^{2 pi A} / (1 - e^{2 pi A}).
    """

    a1: np.ndarray
    a2: np.ndarray
    d_a: float


@dataclass(frozen=True)
class FamilySolution:
    mu: float
    gs: np.ndarray
    residual_norm: float

    def as_family(self, a, thetas):
        return SpiralFamily(a, self.mu, tuple(thetas), tuple(self.gs))


def _check_thetas(thetas):
    thetas = tuple(float(t) for t in thetas)
    if len(thetas) == 0:
        raise ValueError("need at least one sheet offset")
    if thetas[0] != 0.0:
        raise ValueError("thetas[0] must be 0")
    for lo, hi in zip(thetas, thetas[1:]):
        if not lo < hi:
            raise ValueError("thetas must be strictly increasing")
    if thetas[-1] >= TWO_PI:
        raise ValueError("thetas must stay below 2*pi")
    return thetas


def line_positions(a, thetas):
    """Strip x-positions of the sheet lines, ending with the left boundary
    (offset 2*pi)."""
    thetas = _check_thetas(thetas)
    return np.array([line_position(a, t) for t in (*thetas, TWO_PI)])


def coupling_matrix(a, thetas):
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    thetas = _check_thetas(thetas)
    A = spectral_constant(a)
    epos = cmath.exp(math.pi * A)
    eneg = cmath.exp(-math.pi * A)
    cosh = 0.5 * (epos + eneg)
    sinh = 0.5 * (epos - eneg)
    m = len(thetas)
    entries = np.empty((m, m), dtype=complex)
    for i in range(m):
        for k in range(m):
            base = cmath.exp(A * (thetas[k] - thetas[i]))
            if k > i:
                entries[i, k] = base * eneg
            elif k == i:
                entries[i, k] = base * cosh
            else:
                entries[i, k] = base * epos
    return CouplingMatrix(entries=entries, scaled=entries / sinh)


def _rhs_constant(a, mu):
    # (a^2 + 1 - 2 mu + 2 a mu i) / (2 a^2)
    return complex(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) / (2.0 * a * a)


def family_matching_residual(a, thetas, mu, gs):
    """Row residuals of the discrete matching system

        sum_k scaled[m, k] g_k = -(a^2 + 1 - 2 mu + 2 a mu i) / (2 a^2).
    """
    b = coupling_matrix(a, thetas).scaled
    gs = np.asarray(gs, dtype=float)
    return b @ gs + _rhs_constant(a, mu)


def solve_family_matching(a, thetas):
    """Least-squares solve of the discrete matching system for (gs, mu).

    The M complex rows split into 2M real equations in the M + 1 real
    unknowns (g_0 .. g_{M-1}, mu). For uniformly spaced offsets the system
    is consistent and the residual vanishes to rounding.
    """
    thetas = _check_thetas(thetas)
    b = coupling_matrix(a, thetas).scaled
    m = len(thetas)
    mat = np.zeros((2 * m, m + 1))
    rhs = np.zeros(2 * m)
    const = _rhs_constant(a, 0.0)
    for i in range(m):
        mat[2 * i, :m] = b[i].real
        mat[2 * i, m] = -1.0 / (a * a)
        rhs[2 * i] = -const.real
        mat[2 * i + 1, :m] = b[i].imag
        mat[2 * i + 1, m] = 1.0 / a
        rhs[2 * i + 1] = -const.imag
    sol, _, rank, _ = np.linalg.lstsq(mat, rhs, rcond=None)
    if rank < m + 1:
        raise SingularSystem(f"family system rank {rank} < {m + 1} at a = {a}")
    residual = float(np.linalg.norm(mat @ sol - rhs))
    return FamilySolution(mu=float(sol[m]), gs=sol[:m].copy(), residual_norm=residual)


def strip_coefficients(a, gs):
    if not a > 0:
        raise ValueError(f"pitch a must be positive, got {a}")
    alpha, beta = _alpha_beta(a)
    d = math.exp(beta) + math.exp(-beta) - 2.0 * math.cos(alpha)
    gs = np.asarray(gs, dtype=float)
    a1 = 2.0 * a * gs * (math.exp(-beta) - math.cos(alpha)) / d
    a2 = -2.0 * a * gs * math.sin(alpha) / d
    return StripCoefficients(a1=a1, a2=a2, d_a=d)


def _unwrap(values):
    if np.ndim(values) == 0:
        return np.asarray(values).item()
    return values


def _raise_strip_flags(status, which):
    status = np.asarray(status)
    if np.any(status == _kernels.STATUS_ON_SHEET):
        idx = np.argmax(np.asarray(status).ravel() == _kernels.STATUS_ON_SHEET)
        raise OnCutLine(int(np.asarray(which).ravel()[idx]))
    if np.any(status == _kernels.STATUS_OUTSIDE):
        raise ValueError("point outside the strip closure")


def family_strip_velocity(z, fam):
    """Piecewise strip velocity of the family ansatz.

    Each sheet contributes e^{2ay + c_l Re A} rotated by 2ax - c_l Im A
    with c_l = theta_l + 2*pi*([x < line_l] - 1). Raises OnCutLine within
    tolerance of any sheet line or boundary.
    """
    z = np.asarray(z, dtype=complex)
    coeffs = strip_coefficients(fam.a, fam.gs)
    w, status, which = _kernels.family_strip_batch(
        z.real, z.imag, fam.a, fam.thetas, coeffs.a1, coeffs.a2
    )
    _raise_strip_flags(status, which)
    return _unwrap(w)


def family_strip_potential(z, fam):
    """Strip potential with dPhi/dz = conj(family_strip_velocity).

    Phi(z) = sum_l g_l e^{2 pi A} / (1 - e^{2 pi A}) e^{-2aiz} e^{c_l A}.
    """
    z = np.asarray(z, dtype=complex)
    a = fam.a
    x, y = z.real, z.imag
    # same flag policy as the velocity kernel
    tol = _kernels.WINDING_RTOL * (1.0 + np.abs(x))
    lines = line_positions(a, fam.thetas)
    for l, xl in enumerate(lines):
        hit = np.abs(x - xl) < tol
        if np.any(hit):
            raise OnCutLine(l)
    if np.any((x > 0.0) | (x < lines[-1])):
        raise ValueError("point outside the strip closure")
    A = spectral_constant(a)
    e2pi = cmath.exp(TWO_PI * A)
    pref = e2pi / (1.0 - e2pi)
    phi = np.zeros(z.shape, dtype=complex)
    for l, (th, g) in enumerate(zip(fam.thetas, fam.gs)):
        ind = (x < lines[l]).astype(float)
        c = th + TWO_PI * (ind - 1.0)
        phi = phi + g * pref * np.exp(-2j * a * z + c * A)
    return _unwrap(phi)


def _one_sided(a, thetas, coeffs, m, left, y):
    """One-sided (w1, w2) limits of the ansatz on line m, m in 0..M.

    left=True is the limit from smaller x. Index m = M means the left
    strip boundary (offset 2*pi).
    """
    re_a = spectral_constant(a).real
    im_a = spectral_constant(a).imag
    th_m = TWO_PI if m == len(thetas) else thetas[m]
    xm = line_position(a, th_m)
    y = np.asarray(y, dtype=float)
    w1 = np.zeros(y.shape)
    w2 = np.zeros(y.shape)
    for l in range(len(thetas)):
        ind = (l <= m) if left else (l < m)
        c = thetas[l] + TWO_PI * (float(ind) - 1.0)
        amp = np.exp(2.0 * a * y + c * re_a)
        ph = 2.0 * a * xm - c * im_a
        w1 = w1 + amp * (coeffs.a1[l] * math.sin(ph) + coeffs.a2[l] * math.cos(ph))
        w2 = w2 + amp * (coeffs.a2[l] * math.sin(ph) - coeffs.a1[l] * math.cos(ph))
    return w1, w2


def boundary_residuals(fam, mu, y_grid):
    """Residuals of the six line conditions, normalized by e^{2ay}.

    B1/B2: normal velocity matching on the right/left strip boundary.
    B3: continuity of w1 across each interior line (M - 1 rows).
    B4: normal velocity matching value on each interior line.
    B5: tangential jump across the identified boundary pair equals
        2 a g_0.
    B6: tangential jump across each interior line equals
        2 a g_m e^{theta_m Re A}.

    Returns a dict of arrays over y_grid; B3, B4, B6 have one row per
    interior line.
    """
    a, thetas, gs = fam.a, fam.thetas, fam.gs
    m_count = len(thetas)
    y = np.asarray(y_grid, dtype=float)
    coeffs = strip_coefficients(a, gs)
    re_a = spectral_constant(a).real
    e2ay = np.exp(2.0 * a * y)
    shift = TWO_PI / (1.0 + a * a)

    w1_l0, w2_l0 = _one_sided(a, thetas, coeffs, 0, True, y)
    w1_rm, _ = _one_sided(a, thetas, coeffs, m_count, False, y)
    _, w2_rm_up = _one_sided(a, thetas, coeffs, m_count, False, y + shift)

    out = {
        "B1": w1_l0 / e2ay - mu,
        "B2": w1_rm / e2ay - mu * math.exp(TWO_PI * re_a),
        "B5": w2_rm_up / e2ay - w2_l0 / e2ay - 2.0 * a * gs[0],
    }
    b3, b4, b6 = [], [], []
    for m in range(1, m_count):
        w1l, w2l = _one_sided(a, thetas, coeffs, m, True, y)
        w1r, w2r = _one_sided(a, thetas, coeffs, m, False, y)
        b3.append((w1r - w1l) / e2ay)
        b4.append(w1l / e2ay - mu * math.exp(thetas[m] * re_a))
        b6.append((w2r - w2l) / e2ay - 2.0 * a * gs[m] * math.exp(thetas[m] * re_a))
    n = y.shape[0] if y.ndim else 1
    out["B3"] = np.array(b3).reshape(m_count - 1, n)
    out["B4"] = np.array(b4).reshape(m_count - 1, n)
    out["B6"] = np.array(b6).reshape(m_count - 1, n)
    return out


def _check_status(status, which, r, theta, a, thetas):
    status = np.asarray(status)
    if np.any(status == _kernels.STATUS_ORIGIN):
        raise OriginError("field evaluation at the origin")
    mask = np.asarray(status).ravel() == _kernels.STATUS_ON_SHEET
    if np.any(mask):
        idx = int(np.argmax(mask))
        sheet = int(np.asarray(which).ravel()[idx])
        _, d = _kernels.winding_batch(r, theta, a, thetas[sheet])
        raise OnSpiral(sheet, np.asarray(d).ravel()[idx])


def family_potential(z, fam):
    """Sum of per-sheet potentials with offset winding branches:

    Phi(z) = sum_l g_l e^{theta_l A} / (1 - e^{2 pi A})
             * exp(i A (log r + i (theta - 2 pi J_l))).
    """
    r, theta = polar_parts(z)
    phi, _, status, which = _kernels.family_field_batch(
        r, theta, fam.a, fam.thetas, fam.gs
    )
    _check_status(status, which, r, theta, fam.a, fam.thetas)
    return _unwrap(phi)


def family_velocity(z, fam):
    """Profile velocity of the family; conj equals dPhi/dz off the sheets."""
    r, theta = polar_parts(z)
    _, w, status, which = _kernels.family_field_batch(
        r, theta, fam.a, fam.thetas, fam.gs
    )
    _check_status(status, which, r, theta, fam.a, fam.thetas)
    return _unwrap(w)
