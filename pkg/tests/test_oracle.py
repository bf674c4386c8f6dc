import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decokit.oracle import (
    Grid1D, KickDistribution, MotionError, QuadraticPotential, TwoParticleState, cat_grid,
    evolve_two_particle, gaussian_agreement, gaussian_grid, gaussian_tidal_suppression,
    inverse_wigner, kick_characteristic, momentum_kick, multiply_suppression,
    phase_only_change, reduce_and_compare, reduced_density, standard_suite,
    tidal_kick_distribution, wigner_duality, wigner_transform,
)

HBAR = 1.0
HEAVY = 1e12


def pair(s1=1.0, s2=0.7, points=256):
    g1 = gaussian_grid(s1, points, hbar=HBAR)
    g2 = gaussian_grid(s2, points, hbar=HBAR)
    return TwoParticleState.separable(g1, g2, HEAVY, HEAVY)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(100, 1.0, np.ones(100))
    with pytest.raises(ValueError):
        Grid1D(4, 1.0, 2 * np.ones(4))


def test_zero_potential_leaves_state_unchanged():
    st0 = pair()
    out = evolve_two_particle(st0, QuadraticPotential(), 3.0, hbar=HBAR)
    assert np.array_equal(out.joint, st0.joint)


def test_phase_only_potential():
    assert phase_only_change().relative_error <= 1e-10


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_gaussian_suppression_matches_analytic(t):
    rec = gaussian_agreement(t=t)
    assert rec.relative_error <= 0.05
    assert rec.grid["entries"] > 100


def test_resolution_doubling_converges():
    errs = [gaussian_agreement(points=n).relative_error for n in (16, 32, 64)]
    assert errs[0] > errs[1] and errs[1] < 1e-10 and errs[2] < 1e-10


def test_motion_guard():
    light = TwoParticleState.separable(gaussian_grid(1.0, 64, hbar=HBAR),
                                       gaussian_grid(1.0, 64, hbar=HBAR), 1.0, 1.0)
    with pytest.raises(MotionError):
        evolve_two_particle(light, QuadraticPotential(M=1.0), 1.0, hbar=HBAR)
    evolve_two_particle(light, QuadraticPotential(M=1.0), 1.0, hbar=HBAR, check_motion=False)


def test_compare_needs_history():
    with pytest.raises(ValueError):
        reduce_and_compare(pair())


def test_kick_distribution_route_matches_grid():
    st0 = pair()
    M, t = 1.3, 0.8
    out = evolve_two_particle(st0, QuadraticPotential(M=M), t, hbar=HBAR)
    f = reduce_and_compare(out)
    g2 = st0.grid2
    q, dens = tidal_kick_distribution(g2.x, np.abs(g2.values) ** 2, M, t, x1=0.0)
    n, x = st0.grid1.points, st0.grid1.x
    checked = 0
    for m in range(1, 40):
        i, j = n // 2 - m, n // 2 + m  # x[i] = -x[j], centre 0
        if not f.mask[i, j]:
            continue
        expected = kick_characteristic(q, dens, np.array([(x[j] - x[i]) / HBAR]))[0]
        assert abs(f.f[i, j] - expected) <= 1e-6
        checked += 1
    assert checked > 20


def test_masked_diagonal_is_one():
    out = evolve_two_particle(pair(), QuadraticPotential(M=1.0), 1.0, hbar=HBAR)
    f = reduce_and_compare(out)
    d = np.diag(f.mask)
    assert np.allclose(np.diag(f.f)[d], 1.0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(0, 2), st.floats(-2, 2))
def test_grid_suppression_bounds(M, t, F):
    out = evolve_two_particle(pair(points=64), QuadraticPotential(0.1, F, M), t, hbar=HBAR)
    f = reduce_and_compare(out)
    mag = np.abs(f.f[f.mask])
    assert np.all(mag <= 1 + 1e-9)
    assert np.allclose(np.diag(f.f)[np.diag(f.mask)], 1.0, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 10), st.floats(0, 10), st.floats(0.1, 5))
def test_analytic_suppression_bounds(M, t, spread):
    x = np.linspace(-5, 5, 11)
    f = gaussian_tidal_suppression(x, M, spread, t, hbar=HBAR)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(np.diag(f) == 1)


# ---------------------------------------------------------------------------
# Wigner


def test_gaussian_wigner_positive_and_normalised():
    g = gaussian_grid(1.0, 128, hbar=HBAR)
    W = wigner_transform(g.density, g.x, hbar=HBAR)
    assert W.values.min() > -1e-12
    assert W.total() == pytest.approx(1.0, rel=1e-10)
    assert np.allclose(W.position_marginal(), np.abs(g.values) ** 2, atol=1e-12)
    # peak value of a minimum-uncertainty Gaussian is 1 / (pi hbar)
    assert W.values.max() == pytest.approx(1 / math.pi, rel=1e-6)


def test_cat_state_fringes():
    c = cat_grid(0.5, 6.0, 256)
    W = wigner_transform(c.density, c.x, hbar=HBAR)
    mid = W.values[np.argmin(np.abs(c.x))]
    # fringe period in p is 2 pi hbar / separation; sign alternates
    assert mid.min() < -0.1 * mid.max()
    dp_fringe = 2 * math.pi * HBAR / 6.0
    p0 = np.argmin(np.abs(W.p))
    k = int(round(dp_fringe / 2 / W.dp))
    assert mid[p0] > 0 and mid[p0 + k] < 0 and mid[p0 - k] < 0


def test_inverse_is_exact():
    c = cat_grid(0.6, 4.0, 128)
    rho = c.density
    back = inverse_wigner(wigner_transform(rho, c.x, hbar=HBAR))
    assert np.max(np.abs(back - rho)) <= 1e-12


def test_delta_kick_is_pure_phase():
    c = cat_grid(0.6, 4.0, 128)
    W = wigner_transform(c.density, c.x, hbar=HBAR)
    kick = KickDistribution((7,), (1.0,))
    rho = inverse_wigner(momentum_kick(W, kick))
    assert np.allclose(np.abs(rho), np.abs(c.density), atol=1e-12)
    assert not np.allclose(rho, c.density)


def test_gaussian_kick_width():
    g = gaussian_grid(1.0, 256, hbar=HBAR)
    W = wigner_transform(g.density, g.x, hbar=HBAR)
    s = 0.5
    dens = lambda q: np.exp(-q ** 2 / (2 * s ** 2)) / math.sqrt(2 * math.pi * s ** 2)
    kick = KickDistribution.from_density(dens, W.dp, max_offset=int(10 * s / W.dp))
    out = multiply_suppression(g.density, g.x, kick, W.dp, hbar=HBAR)
    y = np.subtract.outer(g.x, g.x)
    ratio = np.abs(out) / np.maximum(np.abs(g.density), 1e-300)
    sel = np.abs(g.density) > 1e-8 * np.abs(g.density).max()
    # suppression width hbar / s
    assert np.allclose(ratio[sel], np.exp(-y[sel] ** 2 / (2 * (HBAR / s) ** 2)), atol=1e-9)


def test_duality_twenty_kicks():
    rec = wigner_duality(n_kicks=20, points=256)
    assert rec.relative_error <= 1e-8


def test_kick_distribution_validation():
    with pytest.raises(ValueError):
        KickDistribution((0, 1), (0.5, 0.6))
    with pytest.raises(ValueError):
        KickDistribution((0,), (-1.0,))
    with pytest.raises(ValueError):
        KickDistribution.from_density(lambda q: np.ones_like(q), 0.1, 3)


def test_standard_suite_records():
    recs = standard_suite()
    assert len(recs) == 5
    for r in recs:
        d = r.to_dict()
        assert set(d) == {"test", "grid", "analytic_value", "measured_value", "relative_error"}
