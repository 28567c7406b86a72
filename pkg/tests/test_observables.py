import numpy as np
import pytest

from conftest import random_state
from diracsim.analysis import linearity_report
from diracsim.core import (DIRAC, FW, POSITION, InitialStateParams, PhysicalParams, SpinorField,
                           gaussian_packet, make_grid, prepare_initial, to_momentum)
from diracsim.dirac1d import (drift_velocity, eigenspinors, energy_fns, evolve_dirac,
                              evolve_fw_diagonal, fw_velocity, to_fw)
from diracsim.observables import (TimeSeries, density, edge_mass, mean_x_dirac, mean_x_fw,
                                  mean_x_fw_projected)

PP = PhysicalParams(0.1, 5.0)
GRID = make_grid(2048, 64.0)
TIMES = np.arange(96.0)


@pytest.fixture(scope="module")
def trajectory():
    f0 = prepare_initial(GRID)
    return [evolve_dirac(f0, t, PP) for t in TIMES]


def test_time_series_validation():
    TimeSeries([0, 1, 2], [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        TimeSeries([0, 1], [0.0])
    with pytest.raises(ValueError):
        TimeSeries([0, 2, 1], [0, 0, 0])
    with pytest.raises(ValueError):
        TimeSeries([0, 1], [0, 0], sigma=[1.0])


def test_density():
    f = prepare_initial(GRID)
    d1, d2 = density(f)
    assert np.sum(d1 + d2) * GRID.dx == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(d1, d1[::-1][np.r_[-1, : GRID.n - 1]], atol=1e-16)
    up = gaussian_packet(GRID, a=1.0, b=0.0)
    assert not np.any(density(up)[1])
    with pytest.raises(ValueError):
        density(to_momentum(f))


def test_mean_x_dirac_translation():
    f = prepare_initial(GRID)
    assert mean_x_dirac(f) == pytest.approx(0.0, abs=1e-14)
    k = 40
    moved = f.with_components(np.roll(f.comp1, k), np.roll(f.comp2, k))
    assert mean_x_dirac(moved) == pytest.approx(k * GRID.dx, abs=1e-12)


def test_mean_x_fw_initial():
    assert abs(mean_x_fw(prepare_initial(GRID), PP)) < 1e-10


def test_dirac_series_oscillates_fw_is_linear(trajectory):
    xd = TimeSeries(TIMES, [mean_x_dirac(f) for f in trajectory])
    xf = TimeSeries(TIMES, [mean_x_fw(f, PP) for f in trajectory])
    assert linearity_report(xf).max_residual < 1e-6
    assert linearity_report(xd).max_residual > 0.05
    slope = linearity_report(xf).slope
    assert slope == pytest.approx(fw_velocity(trajectory[0], PP), abs=1e-8)
    assert slope == pytest.approx(drift_velocity(trajectory[0], PP), abs=1e-8)


def test_projected_trajectories(trajectory):
    plus, minus = [], []
    weights = []
    for f in trajectory:
        (xp, wp), (xm, wm) = mean_x_fw_projected(f, PP, 1), mean_x_fw_projected(f, PP, -1)
        assert wp + wm == pytest.approx(1.0, abs=1e-12)
        assert mean_x_fw(f, PP) == pytest.approx(wp * xp + wm * xm, abs=1e-10)
        plus.append(xp)
        minus.append(xm)
        weights.append(wp)
    assert np.ptp(weights) < 1e-12
    lp = linearity_report(TimeSeries(TIMES, plus))
    lm = linearity_report(TimeSeries(TIMES, minus))
    assert lp.max_residual < 1e-6 and lm.max_residual < 1e-6
    # each FW component drifts with its own group velocity +-c^2 p / eps
    g = to_fw(trajectory[0], PP)
    vg = PP.c**2 * GRID.p / energy_fns(GRID.p, PP).energy
    d1, d2 = np.abs(g.comp1) ** 2, np.abs(g.comp2) ** 2
    assert lp.slope == pytest.approx(np.sum(vg * d1) / np.sum(d1), abs=1e-10)
    assert lm.slope == pytest.approx(-np.sum(vg * d2) / np.sum(d2), abs=1e-10)
    # for a = -b the rotation sends p < 0 weight up and p > 0 weight down,
    # so particle and antiparticle drift the same way
    assert lp.slope < 0 and lm.slope < 0


def test_pure_positive_energy_has_no_minus_projection():
    k = 3
    p = GRID.p[GRID.n // 2 + k]
    u, _ = eigenspinors(p, PP)
    env = np.exp(-(GRID.x**2) / 4) * np.exp(1j * p * GRID.x)
    # a single momentum component would not be square-integrable; project instead
    f = to_fw(SpinorField(GRID, u[0] * env, u[1] * env, DIRAC, POSITION), PP)
    pure = f.with_components(f.comp1, np.zeros(GRID.n))
    with pytest.raises(ValueError):
        mean_x_fw_projected(pure, PP, -1)
    x, w = mean_x_fw_projected(pure, PP, 1)
    assert w == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        mean_x_fw_projected(pure, PP, 0)


def test_fw_input_measured_directly():
    f0 = prepare_initial(GRID)
    g = evolve_fw_diagonal(to_fw(f0, PP), 10.0, PP)
    assert g.rep == FW
    assert mean_x_fw(g, PP) == pytest.approx(mean_x_fw(evolve_dirac(f0, 10.0, PP), PP), abs=1e-12)


def test_edge_mass(rng):
    f = prepare_initial(GRID)
    assert edge_mass(f) < 1e-30
    wide = gaussian_packet(GRID, center=28.0)
    assert edge_mass(wide) > 0.4
    assert edge_mass(random_state(GRID, rng)) < 1e-8


def test_chirp_sign_leaves_drift_unchanged():
    a = prepare_initial(GRID, InitialStateParams(chirp_sign=-1))
    b = prepare_initial(GRID, InitialStateParams(chirp_sign=1))
    assert abs(drift_velocity(a, PP)) > 1e-3
    assert drift_velocity(a, PP) == pytest.approx(drift_velocity(b, PP), abs=1e-12)
