"""Zitterbewegung fits, Compton-wavelength scans and scaling-law regressions."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import (MOMENTUM, POSITION, Grid1D, InitialStateParams, PhysicalParams,
                   SpinorField, in_space, prepare_initial)
from .dirac1d import drift_velocity, evolve_fw_diagonal, from_fw, to_fw
from .observables import (TimeSeries, edge_mass, mean_x_dirac, mean_x_fw,
                          mean_x_fw_projected)
from .optical import evolution_plan, fw_device_sequence

MAX_EDGE_MASS = 1e-8
MIN_PERIODS = 1.5


class NumericalError(RuntimeError):
    """A simulation left its domain of validity (e.g. mass reached the grid edge)."""


@dataclass(frozen=True)
class ZbFit:
    """Least-squares fit of ``offset + v t + A sin(omega t + delta)``."""

    v: float
    A: float
    omega: float
    delta: float
    rms: float
    r_squared: float
    offset: float = 0.0
    converged: bool = True
    iterations: int = 0
    flag: str | None = None

    def model(self, t):
        t = np.asarray(t, dtype=float)
        return self.offset + self.v * t + self.A * np.sin(self.omega * t + self.delta)


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    max_residual: float


def zb_frequency_estimate(params: PhysicalParams) -> float:
    """Dominant ZB angular frequency ``2 mc^2`` (= 4 pi c / lambda_c)."""
    return 2.0 * params.rest_energy


def _wrap(angle: float) -> float:
    return float((angle + math.pi) % (2.0 * math.pi) - math.pi)


def _r_squared(y, resid) -> float:
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - float(resid @ resid) / ss_tot))


def _residual(q, s, y):
    x0, v, A, w, d = q
    return x0 + v * s + A * np.sin(w * s + d) - y


def _jacobian(q, s):
    _, _, A, w, d = q
    arg = w * s + d
    sn, cs = np.sin(arg), np.cos(arg)
    return np.column_stack([np.ones_like(s), s, sn, A * s * cs, A * cs])


def _linear_seed(s, y, w):
    basis = np.column_stack([np.ones_like(s), s, np.sin(w * s), np.cos(w * s)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    x0, v, a1, a2 = coef
    return np.array([x0, v, math.hypot(a1, a2), w, math.atan2(a2, a1)])


def _refine(q0, s, y):
    sol = least_squares(_residual, q0, jac=lambda q, s, y: _jacobian(q, s), args=(s, y),
                        method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    # status 0 is the evaluation cap; every other non-negative status is a tolerance hit
    return sol.x, int(sol.nfev), sol.status > 0


def fit_zb(series: TimeSeries, params: PhysicalParams, n_seeds: int = 64,
           refine: int = 4) -> ZbFit:
    """Unweighted least-squares fit of drift plus one sinusoid.

    A free offset absorbs the starting position. Frequencies are seeded on a
    grid over ``[0.5, 2] * 2 mc^2``; at each seed the model is linear in the
    remaining parameters, which are solved exactly, and the ``refine`` best
    seeds are polished with Levenberg-Marquardt.
    """
    t, y = series.times, series.values
    w0 = zb_frequency_estimate(params)
    if len(t) < 8:
        raise ValueError(f"need at least 8 samples, got {len(t)}")
    span = t[-1] - t[0]
    if span * w0 < MIN_PERIODS * 2.0 * math.pi:
        raise ValueError(
            f"series spans {span * w0 / (2 * math.pi):.2f} ZB periods, need {MIN_PERIODS}"
        )
    tc = 0.5 * (t[0] + t[-1])
    s = t - tc

    seeds = [_linear_seed(s, y, w) for w in np.linspace(0.5 * w0, 2.0 * w0, n_seeds)]
    seeds.sort(key=lambda q: float(np.sum(_residual(q, s, y) ** 2)))
    best = None
    for q0 in seeds[:refine]:
        q, its, ok = _refine(q0, s, y)
        cost = float(np.sum(_residual(q, s, y) ** 2))
        if best is None or cost < best[0]:
            best = (cost, q, its, ok)
    cost, (x0, v, A, w, d), its, ok = best

    if A < 0:
        A, d = -A, d + math.pi
    if w < 0:
        w, d = -w, math.pi - d
    resid = _residual(np.array([x0, v, A, w, d]), s, y)
    flag = None
    if not ok:
        flag = "not converged"
    if A <= 1e-9 * max(float(np.ptp(y)), 1e-300):
        flag = "amplitude at boundary"
    return ZbFit(
        v=float(v), A=float(A), omega=float(w), delta=_wrap(d - w * tc),
        rms=float(np.sqrt(np.mean(resid**2))), r_squared=_r_squared(y, resid),
        offset=float(x0 - v * tc), converged=ok, iterations=its, flag=flag,
    )


def linearity_report(series: TimeSeries) -> LineFit:
    """OLS line through the series. A constant series has r^2 = 1 by convention."""
    t, y = series.times, series.values
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    return LineFit(float(slope), float(intercept), _r_squared(y, resid),
                   float(np.max(np.abs(resid))))


def fit_series(series: TimeSeries, params: PhysicalParams) -> ZbFit:
    """``fit_zb``, falling back to a straight line when the window is too short.

    The fallback reports ``A = 0`` at the estimated frequency and is flagged.
    """
    try:
        return fit_zb(series, params)
    except ValueError:
        if len(series) < 2:
            raise
    line = linearity_report(series)
    resid = series.values - (line.slope * series.times + line.intercept)
    return ZbFit(v=line.slope, A=0.0, omega=zb_frequency_estimate(params), delta=0.0,
                 rms=float(np.sqrt(np.mean(resid**2))), r_squared=line.r_squared,
                 offset=line.intercept, flag="window shorter than 1.5 ZB periods: linear fit")


@dataclass(frozen=True)
class ScanPoint:
    lambda_c: float
    dirac: TimeSeries
    fw: TimeSeries
    fw_plus: TimeSeries
    fw_minus: TimeSeries
    norm: np.ndarray
    fit: ZbFit
    drift_velocity: float


@dataclass(frozen=True)
class ScanResult:
    points: tuple
    c: float
    grid: Grid1D
    times: np.ndarray
    state: InitialStateParams | None = None
    backend: str = "ideal"
    efficiency: float = 1.0

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([pt.lambda_c for pt in self.points])

    def point(self, lambda_c: float) -> ScanPoint:
        for pt in self.points:
            if pt.lambda_c == lambda_c:
                return pt
        raise KeyError(lambda_c)


def _projected(f, params, sign):
    try:
        return mean_x_fw_projected(f, params, sign)[0]
    except ValueError:
        return math.nan


def simulate_series(f0: SpinorField, params: PhysicalParams, times, backend: str = "ideal",
                    efficiency: float = 1.0) -> dict:
    """Mean positions over ``times``: Dirac, FW, and FW projected on each energy sign."""
    times = np.asarray(times, dtype=float)
    grid = f0.grid
    f0 = in_space(f0, MOMENTUM)
    cols = {k: np.empty(len(times)) for k in
            ("mean_x_dirac", "mean_x_fw", "mean_x_fw_plus", "mean_x_fw_minus", "norm")}
    if backend == "ideal":
        g0 = to_fw(f0, params)
    elif backend == "apparatus":
        fwd = fw_device_sequence(grid, params, efficiency)
        back = fw_device_sequence(grid, params, efficiency, inverse=True)
        g0 = fwd.apply(f0)
        g0 = g0.with_components(g0.comp1, g0.comp2, rep="fw")
    else:
        raise ValueError(f"unknown backend {backend!r}")

    for i, t in enumerate(times):
        if backend == "ideal":
            gt = evolve_fw_diagonal(g0, t, params)
            ft = in_space(from_fw(gt, params), POSITION)
        else:
            gt = evolution_plan(grid, params, t, efficiency).apply(g0)
            ft = back.apply(gt)
            ft = in_space(ft.with_components(ft.comp1, ft.comp2, rep="dirac"), POSITION)
        leak = edge_mass(ft)
        if leak > MAX_EDGE_MASS:
            raise NumericalError(
                f"edge mass {leak:.2e} at t={t:g} exceeds {MAX_EDGE_MASS:g}; enlarge the grid"
            )
        gpos = in_space(gt, POSITION)
        cols["mean_x_dirac"][i] = mean_x_dirac(ft)
        cols["mean_x_fw"][i] = mean_x_fw(gpos, params)
        cols["mean_x_fw_plus"][i] = _projected(gpos, params, 1)
        cols["mean_x_fw_minus"][i] = _projected(gpos, params, -1)
        cols["norm"][i] = float(np.sum(np.abs(ft.comp1) ** 2 + np.abs(ft.comp2) ** 2) * grid.dx)
    return cols


def _scan_point(f0, c, lc, times, backend, efficiency) -> ScanPoint:
    params = PhysicalParams(c, lc)
    cols = simulate_series(f0, params, times, backend, efficiency)
    dirac = TimeSeries(times, cols["mean_x_dirac"])
    return ScanPoint(
        lambda_c=float(lc), dirac=dirac, fw=TimeSeries(times, cols["mean_x_fw"]),
        fw_plus=TimeSeries(times, cols["mean_x_fw_plus"]),
        fw_minus=TimeSeries(times, cols["mean_x_fw_minus"]),
        norm=cols["norm"], fit=fit_series(dirac, params),
        drift_velocity=drift_velocity(f0, params),
    )


def scan_lambda(grid: Grid1D, state, c: float, lambdas, times, backend: str = "ideal",
                efficiency: float = 1.0, threads: int = 1) -> ScanResult:
    """Evolve one initial state for each Compton wavelength and fit the Dirac series.

    ``state`` is either ``InitialStateParams`` or a ready ``SpinorField``.
    Scan points are independent, so ``threads > 1`` does not change results.
    """
    lambdas = [float(lc) for lc in lambdas]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambda_c values must be strictly increasing")
    times = np.asarray(times, dtype=float)
    isp = state if isinstance(state, InitialStateParams) else None
    f0 = prepare_initial(grid, state) if isp is not None else state

    def work(lc):
        return _scan_point(f0, c, lc, times, backend, efficiency)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = tuple(pool.map(work, lambdas))
    else:
        points = tuple(work(lc) for lc in lambdas)
    return ScanResult(points, c, grid, times, isp, backend, efficiency)


def _ols(x, y) -> LineFit:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return LineFit(float(slope), float(intercept), _r_squared(y, resid),
                   float(np.max(np.abs(resid))))


@dataclass(frozen=True)
class ScalingReport:
    amplitude: LineFit   # A against lambda_c
    frequency: LineFit   # omega against 1 / lambda_c
    lambdas: np.ndarray


def scaling_laws(scan: ScanResult, max_lambda: float = 10.0) -> ScalingReport:
    """Amplitude linear in lambda_c and frequency linear in 1/lambda_c, small lambda_c only."""
    pts = [pt for pt in scan.points if pt.lambda_c <= max_lambda]
    lc = np.array([pt.lambda_c for pt in pts])
    amp = _ols(lc, [pt.fit.A for pt in pts])
    freq = _ols(1.0 / lc, [pt.fit.omega for pt in pts])
    return ScalingReport(amp, freq, lc)


@dataclass(frozen=True)
class VelocityScaling:
    k: float
    r_squared: float
    light_ratio: float
    lambda_light: float


def velocity_scaling(scan: ScanResult, max_lambda: float = 7.0) -> VelocityScaling:
    """Fit ``|v| = k lambda_c^2`` through the origin for small lambda_c.

    r^2 is measured against the mean of ``|v|``. ``light_ratio`` is
    ``|v| / c`` at the largest scanned lambda_c.
    """
    pts = [pt for pt in scan.points if pt.lambda_c <= max_lambda]
    x = np.array([pt.lambda_c for pt in pts]) ** 2
    y = np.abs([pt.fit.v for pt in pts])
    k = float(x @ y / (x @ x))
    last = scan.points[-1]
    return VelocityScaling(k, _r_squared(y, y - k * x), abs(last.fit.v) / scan.c, last.lambda_c)
