"""Multi-sheet coupling, least-squares matching, and piecewise strip forms."""

import cmath
import math

import numpy as np
import pytest

from spiralsheet import OnCutLine, SpiralFamily, SpiralParams
from spiralsheet.conformal import line_position, strip_width
from spiralsheet.family import (
    boundary_residuals,
    coupling_matrix,
    family_matching_residual,
    family_potential,
    family_strip_potential,
    family_strip_velocity,
    family_velocity,
    line_positions,
    solve_family_matching,
    strip_coefficients,
)
from spiralsheet.single_spiral import (
    complex_potential,
    coth_pi_spectral,
    profile_velocity,
    solve_matching,
    spectral_constant,
)

TWO_PI = 2.0 * math.pi


def uniform_thetas(m):
    return tuple(TWO_PI * k / m for k in range(m))


def test_coupling_single_sheet_reduces_to_coth():
    a = 0.8
    cm = coupling_matrix(a, (0.0,))
    A = spectral_constant(a)
    assert abs(cm.entries[0, 0] - cmath.cosh(math.pi * A)) < 1e-14 * abs(cm.entries[0, 0])
    assert abs(cm.scaled[0, 0] - coth_pi_spectral(a)) < 1e-13 * abs(cm.scaled[0, 0])


def test_coupling_entries_structure():
    a = 0.7
    thetas = (0.0, 1.0, 2.5)
    A = spectral_constant(a)
    cm = coupling_matrix(a, thetas)
    for m in range(3):
        for k in range(3):
            phase = cmath.exp(A * (thetas[k] - thetas[m]))
            if k > m:
                want = phase * cmath.exp(-math.pi * A)
            elif k < m:
                want = phase * cmath.exp(math.pi * A)
            else:
                want = phase * cmath.cosh(math.pi * A)
            assert abs(cm.entries[m, k] - want) < 1e-13 * abs(want)


def test_uniform_row_sums_equal():
    # equal spacing makes every row of the scaled coupling sum to the same
    # value, which is why uniform families admit equal strengths
    a = 1.4
    for m in (2, 3, 5):
        cm = coupling_matrix(a, uniform_thetas(m))
        sums = cm.scaled.sum(axis=1)
        assert np.max(np.abs(sums - sums[0])) < 1e-12 * np.max(np.abs(sums))


def test_solve_uniform_families(pair_target, triple_target):
    for fam in (pair_target, triple_target):
        gs = np.asarray(fam.gs)
        assert np.max(np.abs(gs - gs[0])) < 1e-10 * abs(gs[0])
        res = family_matching_residual(fam.a, fam.thetas, fam.mu, fam.gs)
        assert np.max(np.abs(res)) < 1e-10


def test_solution_residual_norm_is_small(pair_target):
    sol = solve_family_matching(pair_target.a, pair_target.thetas)
    assert sol.residual_norm < 1e-12


def test_single_sheet_family_matches_single_solver():
    a = 0.8
    sol = solve_family_matching(a, (0.0,))
    mu, g = solve_matching(a)
    assert abs(sol.mu - mu) < 1e-12 * (1.0 + abs(mu))
    assert abs(sol.gs[0] - g) < 1e-12 * abs(g)


def test_family_fields_are_sums_of_single_sheets(pair_target):
    # each sheet contributes its own offset copy of the single-sheet field
    rng = np.random.default_rng(31)
    z = 1.6 * np.exp(1j * rng.uniform(0.0, TWO_PI, 40)) * np.exp(rng.uniform(0.0, 0.8, 40))
    wf = family_velocity(z, pair_target)
    pf = family_potential(z, pair_target)
    ws = sum(profile_velocity(z, pair_target.sheet(m)) for m in range(pair_target.size))
    ps = sum(complex_potential(z, pair_target.sheet(m)) for m in range(pair_target.size))
    assert np.max(np.abs(wf - ws)) < 1e-13 * np.max(np.abs(ws))
    assert np.max(np.abs(pf - ps)) < 1e-13 * np.max(np.abs(ps))


def test_strip_coefficient_identity():
    # -A1 + i A2 = 2 a g e^{2 pi A} / (1 - e^{2 pi A}), sheet by sheet
    a = 0.8
    gs = (1.3, 0.4)
    A = spectral_constant(a)
    co = strip_coefficients(a, gs)
    e2 = cmath.exp(TWO_PI * A)
    for m, g in enumerate(gs):
        want = 2.0 * a * g * e2 / (1.0 - e2)
        got = -co.a1[m] + 1j * co.a2[m]
        assert abs(got - want) < 1e-13 * abs(want)


def test_strip_coefficients_at_matched_single():
    from spiralsheet.single_spiral import resonance_constant

    a = 0.8
    mu, g = solve_matching(a)
    co = strip_coefficients(a, (g,))
    assert abs(co.a1[0] - mu * resonance_constant(a)) < 1e-12 * (1.0 + abs(mu))
    assert abs(co.a2[0] - mu) < 1e-12 * (1.0 + abs(mu))


def test_line_positions_ordering():
    a = 0.8
    xs = line_positions(a, uniform_thetas(3))
    assert xs[0] == 0.0
    assert np.all(np.diff(xs) < 0.0)
    assert abs(xs[-1] + strip_width(a)) < 1e-15


def test_w1_continuity_holds_for_any_strengths():
    # continuity across interior lines is built into the coefficient ratio,
    # not into the solved strengths
    a = 0.8
    thetas = (0.0, 2.0, 4.0)
    fam = SpiralFamily(a, 0.123, thetas, (0.7, -0.3, 1.9))
    y = np.linspace(-2.0, 2.0, 64)
    res = boundary_residuals(fam, fam.mu, y)
    assert np.max(np.abs(res["B3"])) < 1e-12
    assert np.max(np.abs(res["B6"])) < 1e-12
    assert np.max(np.abs(res["B5"])) < 1e-12


def test_matching_rows_need_solved_parameters(pair_target):
    y = np.linspace(-1.0, 1.0, 32)
    good = boundary_residuals(pair_target, pair_target.mu, y)
    for key in ("B1", "B2", "B4"):
        assert np.max(np.abs(good[key])) < 1e-10
    bad = boundary_residuals(pair_target, pair_target.mu + 0.05, y)
    assert np.max(np.abs(bad["B1"])) > 1e-3


def test_boundary_residual_shapes(pair_target, triple_target):
    y = np.linspace(-1.0, 1.0, 16)
    res2 = boundary_residuals(pair_target, pair_target.mu, y)
    assert res2["B1"].shape == (16,)
    assert res2["B3"].shape == (1, 16)
    res3 = boundary_residuals(triple_target, triple_target.mu, y)
    assert res3["B3"].shape == (2, 16)
    a = 0.8
    mu, g = solve_matching(a)
    fam1 = SpiralFamily(a, mu, (0.0,), (g,))
    res1 = boundary_residuals(fam1, mu, y)
    assert res1["B3"].shape == (0, 16)
    for key in ("B1", "B2", "B5"):
        assert np.max(np.abs(res1[key])) < 1e-10


def test_strip_velocity_piecewise_and_line_rejection(pair_target):
    a = pair_target.a
    x1 = line_position(a, pair_target.thetas[1])
    with pytest.raises(OnCutLine):
        family_strip_velocity(x1 + 0.5j, pair_target)
    with pytest.raises(ValueError):
        family_strip_velocity(0.2 + 0.5j, pair_target)
    # interior evaluation works on both sides of the line
    for dx in (1e-3, -1e-3):
        assert np.isfinite(family_strip_velocity(x1 + dx + 0.5j, pair_target))


def test_strip_potential_derivative(pair_target):
    h = 1e-6
    a = pair_target.a
    x1 = line_position(a, pair_target.thetas[1])
    for s in (x1 / 2 + 0.4j, x1 / 2 - 1.1j, (x1 - strip_width(a)) / 2 + 0.2j):
        dx = (family_strip_potential(s + h, pair_target) - family_strip_potential(s - h, pair_target)) / (2 * h)
        w = family_strip_velocity(s, pair_target)
        assert abs(np.conj(dx) - w) < 1e-6 * (1.0 + abs(w))


def test_frame_equivalence_any_strengths():
    # potential transport to the strip holds identically in the strengths,
    # not only at the matched solution
    from spiralsheet.conformal import map_to_strip

    a = 0.9
    fam = SpiralFamily(a, 0.0, (0.0, 3.0), (0.8, -1.1))
    rng = np.random.default_rng(33)
    for _ in range(25):
        z = rng.uniform(0.5, 3.0) * np.exp(1j * rng.uniform(0.0, TWO_PI))
        try:
            s = map_to_strip(z, a)
        except Exception:
            continue
        ext = family_potential(z, fam)
        try:
            stp = family_strip_potential(s, fam)
        except OnCutLine:
            continue
        assert abs(stp - ext) < 1e-10 * (1.0 + abs(ext))


def test_m1_family_equals_single_everywhere(single_target):
    a = single_target.a
    fam = SpiralFamily(a, single_target.mu, (0.0,), (single_target.g,))
    rng = np.random.default_rng(34)
    z = np.exp(rng.uniform(-0.5, 1.0, 50)) * np.exp(1j * rng.uniform(0.0, TWO_PI, 50))
    wf = family_velocity(z, fam)
    ws = profile_velocity(z, single_target)
    assert np.max(np.abs(wf - ws)) <= 1e-10 * np.max(np.abs(ws))
    pf = family_potential(z, fam)
    ps = complex_potential(z, single_target)
    assert np.max(np.abs(pf - ps)) <= 1e-10 * np.max(np.abs(ps))
