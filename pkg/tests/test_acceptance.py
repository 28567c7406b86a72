"""Acceptance criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the summary
prints one PASS/FAIL line per criterion with the measured values.
"""

import math
import time

import numpy as np
import pytest

from conftest import random_state
from diracsim.analysis import (linearity_report, scaling_laws, scan_lambda, simulate_series,
                               velocity_scaling)
from diracsim.cli import main
from diracsim.core import InitialStateParams, PhysicalParams, make_grid, prepare_initial
from diracsim.dirac1d import (SIGMA0, eigenspinors, energy_fns, evolve_dirac, evolve_dirac_direct,
                              fw_unitary, hamiltonian, heisenberg_mean_x, projector_dirac)
from diracsim.extensions import (Spinor4Pair, SpinorField2D, energy_2d, evolve_2d,
                                 evolve_3d_restricted, evolve_4x4_fw,
                                 evolve_with_sigma1_potential, fw_matrix_4x4, fw_unitary_2d,
                                 hamiltonian_2d, make_grid_2d, split_step_sigma1)
from diracsim.observables import TimeSeries, mean_x_dirac
from diracsim.optical import fw_device_sequence

C = 0.1
DEFAULT_GRID = make_grid(2048, 64.0)
TIMES = np.arange(96.0)
SCAN_LAMBDAS = (1.0, 3.0, 5.0, 7.0, 10.0, 100.0)


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


@pytest.fixture(scope="module")
def default_scan():
    t0 = time.perf_counter()
    scan = scan_lambda(DEFAULT_GRID, InitialStateParams(), C, SCAN_LAMBDAS, TIMES)
    return scan, time.perf_counter() - t0


def test_criterion_1_oracle_triangle(record_property):
    t0 = time.perf_counter()
    grid = make_grid(1024, 64.0)
    rng = np.random.default_rng(1)
    worst_state = worst_mean = 0.0
    for _ in range(20):
        f = random_state(grid, rng)
        for lc in (1.0, 5.0, 100.0):
            pp = PhysicalParams(C, lc)
            for t in (1.0, 10.0, 95.0):
                a = evolve_dirac(f, t, pp)
                b = evolve_dirac_direct(f, t, pp)
                worst_state = max(worst_state, np.max(np.abs(a.stacked - b.stacked)))
                h = heisenberg_mean_x(f, t, pp)
                worst_mean = max(worst_mean, abs(mean_x_dirac(a) - h),
                                 abs(mean_x_dirac(b) - h))
    elapsed = time.perf_counter() - t0
    record_property("state_diff", f"{worst_state:.2e}")
    record_property("mean_diff", f"{worst_mean:.2e}")
    record_property("seconds", f"{elapsed:.2f}")
    assert worst_state < 1e-12
    assert worst_mean < 1e-6
    assert elapsed < 10.0


def test_criterion_2_device_composition(record_property):
    t0 = time.perf_counter()
    worst = 0.0
    for lc in SCAN_LAMBDAS:
        pp = PhysicalParams(C, lc)
        M = fw_device_sequence(DEFAULT_GRID, pp).matrices(DEFAULT_GRID.n)
        worst = max(worst, np.max(np.abs(M - fw_unitary(DEFAULT_GRID, pp).data)))
    elapsed = time.perf_counter() - t0
    record_property("max_entry_diff", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.3f}")
    assert worst < 1e-14
    assert elapsed < 1.0


def test_criterion_3_zb_frequency(record_property):
    t0 = time.perf_counter()
    scan = scan_lambda(DEFAULT_GRID, InitialStateParams(), C, [5.0], TIMES)
    elapsed = time.perf_counter() - t0
    fit = scan.points[0].fit
    target = 4 * math.pi * C / 5.0
    record_property("omega", f"{fit.omega:.5f}")
    record_property("target", f"{target:.5f}")
    record_property("rel_err", f"{abs(fit.omega / target - 1):.4f}")
    record_property("seconds", f"{elapsed:.2f}")
    assert fit.A > 0.05
    assert abs(fit.omega - target) < 0.05 * target
    assert elapsed < 5.0


def test_criterion_4a_amplitude_linear(default_scan, record_property):
    scan, elapsed = default_scan
    rep = scaling_laws(scan)
    record_property("r2", f"{rep.amplitude.r_squared:.4f}")
    record_property("A", ",".join(f"{pt.fit.A:.4f}" for pt in scan.points[:5]))
    assert elapsed < 60.0
    assert rep.amplitude.r_squared > 0.99


def test_criterion_4b_frequency_inverse(default_scan, record_property):
    scan, elapsed = default_scan
    rep = scaling_laws(scan)
    record_property("r2", f"{rep.frequency.r_squared:.7f}")
    assert elapsed < 60.0
    assert rep.frequency.r_squared > 0.99


def test_criterion_4c_velocity_quadratic(default_scan, record_property):
    scan, elapsed = default_scan
    vs = velocity_scaling(scan)
    record_property("r2", f"{vs.r_squared:.4f}")
    record_property("|v|", ",".join(f"{abs(pt.fit.v):.5f}" for pt in scan.points[:4]))
    assert elapsed < 60.0
    assert vs.r_squared > 0.98


def test_criterion_4d_light_speed_limit(default_scan, record_property):
    scan, elapsed = default_scan
    vs = velocity_scaling(scan)
    record_property("|v|/c", f"{vs.light_ratio:.4f}")
    assert vs.lambda_light == 100.0
    assert elapsed < 60.0
    assert abs(vs.light_ratio - 1.0) < 0.15


def test_criterion_5_single_particle_positions(default_scan, record_property):
    scan, _ = default_scan
    pt = scan.point(5.0)
    worst_r2, worst_res = 1.0, 0.0
    for series in (pt.fw, pt.fw_plus, pt.fw_minus):
        rep = linearity_report(series)
        worst_r2 = min(worst_r2, rep.r_squared)
        worst_res = max(worst_res, rep.max_residual)
    dirac_res = linearity_report(pt.dirac).max_residual
    record_property("fw_min_r2", f"{worst_r2:.12f}")
    record_property("fw_max_residual", f"{worst_res:.2e}")
    record_property("dirac_residual/A", f"{dirac_res / pt.fit.A:.3f}")
    assert worst_r2 > 0.9999
    assert worst_res < 1e-6
    assert dirac_res > 0.1 * pt.fit.A


def test_criterion_6_imperfect_slm(record_property):
    f0 = prepare_initial(DEFAULT_GRID)
    pp = PhysicalParams(C, 5.0)
    res = {}
    for eta in (1.0, 0.95):
        cols = simulate_series(f0, pp, TIMES, backend="apparatus", efficiency=eta)
        res[eta] = linearity_report(TimeSeries(TIMES, cols["mean_x_fw"])).max_residual
    record_property("residual_eta1", f"{res[1.0]:.2e}")
    record_property("residual_eta0.95", f"{res[0.95]:.2e}")
    assert res[0.95] > res[1.0]


def test_criterion_7_projector_algebra(record_property):
    rng = np.random.default_rng(7)
    worst = {}

    def note(key, value):
        worst[key] = max(worst.get(key, 0.0), float(value))

    for _ in range(5):
        pp = PhysicalParams(rng.uniform(0.05, 1.0), rng.uniform(0.5, 150.0))
        grid = make_grid(2048, 64.0)
        p = grid.p
        H = hamiltonian(grid, pp).data
        eps = energy_fns(p, pp).energy[..., None, None]
        Pp = projector_dirac(grid, pp, 1).data
        Pm = projector_dirac(grid, pp, -1).data
        note("idempotence", max(np.max(np.abs(Pp @ Pp - Pp)), np.max(np.abs(Pm @ Pm - Pm))))
        note("completeness", np.max(np.abs(Pp + Pm - SIGMA0)))
        note("orthogonality", np.max(np.abs(Pp @ Pm)))
        for k in range(len(p)):
            u, v = eigenspinors(p[k], pp)
            e = eps[k, 0, 0]
            note("eigenspinor", max(np.linalg.norm(H[k] @ u - e * u),
                                    np.linalg.norm(H[k] @ v + e * v)))
        U = fw_unitary(grid, pp).data
        D = U @ H @ _dagger(U)
        target = np.zeros_like(D)
        target[..., 0, 0], target[..., 1, 1] = eps[..., 0, 0], -eps[..., 0, 0]
        note("fw_diagonalization", np.max(np.abs(D - target)))
    for key, val in worst.items():
        record_property(key, f"{val:.1e}")
    assert max(worst.values()) < 1e-12


def test_criterion_8_appendix_suite(record_property):
    t0 = time.perf_counter()
    pp = PhysicalParams(C, 5.0)

    g2 = make_grid_2d(64, 24.0)
    PX, PY = g2.mesh("momentum")
    U = fw_unitary_2d(g2, pp)
    D = U @ hamiltonian_2d(PX, PY, pp) @ _dagger(U)
    eps = energy_2d(g2, pp)
    target = np.zeros_like(D)
    target[..., 0, 0], target[..., 1, 1] = eps, -eps
    diag2d = np.max(np.abs(D - target))

    g1 = make_grid(64, 24.0)
    f1 = prepare_initial(g1, InitialStateParams(delta=1.0))
    ones = np.ones(64)
    f2 = SpinorField2D(g2, np.outer(f1.comp1, ones), np.outer(f1.comp2, ones))
    out1, out2 = evolve_dirac(f1, 9.0, pp), evolve_2d(f2, 9.0, pp)
    reduction = max(np.max(np.abs(out2.comp1 - out1.comp1[:, None])),
                    np.max(np.abs(out2.comp2 - out1.comp2[:, None])))

    U4 = fw_matrix_4x4(PX, PY, pp)
    allowed = np.zeros((4, 4), bool)
    for i, j in [(0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (1, 2), (2, 1), (2, 2)]:
        allowed[i, j] = True
    block_leak = np.max(np.abs(U4[..., ~allowed]))
    rng = np.random.default_rng(8)
    X, Y = g2.mesh("position")
    comps = np.stack([np.exp(-((X - rng.uniform(-2, 2)) ** 2 + (Y - rng.uniform(-2, 2)) ** 2) / 4
                             + 1j * rng.uniform(-1, 1) * X) * (rng.normal() + 1j * rng.normal())
                      for _ in range(4)], axis=-1)
    pair = Spinor4Pair.from_components(g2, comps)
    pair = Spinor4Pair.from_components(g2, comps / math.sqrt(pair.norm()))
    pairwise = max(np.max(np.abs(evolve_3d_restricted(pair, t, pp).components()
                                 - evolve_4x4_fw(pair, t, pp).components()))
                   for t in (1.0, 10.0, 20.0))

    grid = make_grid(1024, 64.0)
    f0 = prepare_initial(grid)
    V1 = 0.01 * grid.x
    times = [0.0, 5.0, 10.0, 15.0, 20.0]
    oracle = split_step_sigma1(f0, times, pp, V1, dt=1e-3)
    potential = max(abs(mean_x_dirac(s) - mean_x_dirac(evolve_with_sigma1_potential(f0, t, pp, V1)))
                    for t, s in zip(times, oracle))
    elapsed = time.perf_counter() - t0

    record_property("diag2d", f"{diag2d:.1e}")
    record_property("reduction", f"{reduction:.1e}")
    record_property("block_leak", f"{block_leak:.1e}")
    record_property("pairwise", f"{pairwise:.1e}")
    record_property("potential_mean_diff", f"{potential:.1e}")
    record_property("seconds", f"{elapsed:.1f}")
    assert diag2d < 1e-12
    assert reduction < 1e-12
    assert block_leak == 0.0
    assert pairwise < 1e-12
    assert potential < 1e-6
    assert elapsed < 120.0


def test_criterion_9_determinism(tmp_path, record_property):
    for name in ("a", "b"):
        assert main(["--out", str(tmp_path / name), "--threads", "2"]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir() if p.suffix == ".csv")
    assert sorted(p.name for p in (tmp_path / "b").iterdir() if p.suffix == ".csv") == files
    same = [(tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files]
    record_property("csv_files", len(files))
    assert len(files) == 7
    assert all(same)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
