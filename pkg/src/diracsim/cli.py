"""Experiment runner: INI-style config in, plot-ready CSV out.

Example config (every key optional; unknown keys are rejected)::

    [params]
    c = 0.1
    lambda_c = 1, 3, 5, 7, 10, 100

    [run]
    mode = scan
    backend = ideal

Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
3 numerical failure (non-converged fit, mass at the grid edge).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (NumericalError, ScanResult, ZbFit, fit_series, linearity_report,
                       scan_lambda, scaling_laws, velocity_scaling)
from .core import InitialStateParams, PhysicalParams, make_grid, norm, prepare_initial
from .dirac1d import energy_fns
from .extensions import (SpinorField2D, evolve_2d, evolve_with_sigma1_potential,
                         make_grid_2d, mean_position_2d, norm_2d, split_step_sigma1)
from .observables import TimeSeries, mean_x_dirac
from .optical import slm_coordinate

MODES = ("evolve", "scan", "fit", "extensions-2d", "extensions-potential")
BACKENDS = ("ideal", "apparatus")
DEFAULT_LAMBDAS = (1.0, 3.0, 5.0, 7.0, 10.0, 100.0)
SINGLE_LAMBDA_DEFAULT = 5.0
SERIES_HEADER = ("t", "mean_x_dirac", "mean_x_fw", "mean_x_fw_plus", "mean_x_fw_minus", "norm")
FIT_HEADER = ("lambda_c", "v", "A", "omega", "delta", "rms", "r2")

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 2048
    extent: float = 64.0
    c: float = 0.1
    lambda_c: tuple | None = None
    delta: float = 1.0
    chirp: float = 2.2**2
    chirp_sign: int = -1
    a: complex = 1 / math.sqrt(2)
    b: complex = -1 / math.sqrt(2)
    t_start: float = 0.0
    t_stop: float = 95.0
    t_step: float = 1.0
    mode: str = "scan"
    backend: str = "ideal"
    slm_efficiency: float = 1.0
    output: str = "out"
    series: str | None = None
    n2d: int = 128
    extent2d: float = 32.0
    kappa: float = 0.01
    potential_dt: float = 1e-3
    split_step_oracle: bool = True
    export_masks: bool = False
    lens_focal: float = 0.15
    wavelength: float = 632.8e-9
    beam_width: float = 48.6e-6

    @property
    def lambdas(self) -> tuple:
        if self.lambda_c is not None:
            return self.lambda_c
        return DEFAULT_LAMBDAS if self.mode == "scan" else (SINGLE_LAMBDA_DEFAULT,)

    @property
    def times(self) -> np.ndarray:
        count = int(round((self.t_stop - self.t_start) / self.t_step)) + 1
        return self.t_start + self.t_step * np.arange(count)

    @property
    def state(self) -> InitialStateParams:
        return InitialStateParams(self.delta, self.chirp, self.a, self.b, self.chirp_sign)


def _float_list(s):
    return tuple(float(v) for v in s.replace(";", ",").split(",") if v.strip())


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _complex(s):
    return complex(s.replace(" ", ""))


# section -> key -> (RunConfig field, parser)
SCHEMA = {
    "grid": {"n": ("n", int), "extent": ("extent", float)},
    "params": {"c": ("c", float), "lambda_c": ("lambda_c", _float_list)},
    "state": {"delta": ("delta", float), "chirp": ("chirp", float),
              "chirp_sign": ("chirp_sign", int), "a": ("a", _complex), "b": ("b", _complex)},
    "times": {"start": ("t_start", float), "stop": ("t_stop", float), "step": ("t_step", float)},
    "run": {"mode": ("mode", str), "backend": ("backend", str),
            "slm_efficiency": ("slm_efficiency", float), "output": ("output", str)},
    "fit": {"series": ("series", str)},
    "extensions": {"n2d": ("n2d", int), "extent2d": ("extent2d", float),
                   "kappa": ("kappa", float), "dt": ("potential_dt", float),
                   "split_step_oracle": ("split_step_oracle", _bool)},
    "optical": {"export_masks": ("export_masks", _bool), "lens_focal": ("lens_focal", float),
                "wavelength": ("wavelength", float), "beam_width": ("beam_width", float)},
}


def validate(cfg: RunConfig) -> RunConfig:
    def bad(name, why):
        raise ConfigError(f"{name}: {why}")

    if cfg.n < 2 or cfg.n & (cfg.n - 1):
        bad("grid.n", "must be a power of two >= 2")
    for name, val in (("grid.extent", cfg.extent), ("params.c", cfg.c),
                      ("state.delta", cfg.delta), ("state.chirp", cfg.chirp),
                      ("times.step", cfg.t_step), ("extensions.extent2d", cfg.extent2d),
                      ("extensions.dt", cfg.potential_dt), ("optical.lens_focal", cfg.lens_focal),
                      ("optical.wavelength", cfg.wavelength),
                      ("optical.beam_width", cfg.beam_width)):
        if not val > 0:
            bad(name, f"must be positive, got {val}")
    if cfg.lambda_c is not None:
        if not cfg.lambda_c:
            bad("params.lambda_c", "empty list")
        if any(not v > 0 for v in cfg.lambda_c):
            bad("params.lambda_c", "values must be positive")
        if any(b <= a for a, b in zip(cfg.lambda_c, cfg.lambda_c[1:])):
            bad("params.lambda_c", "values must be strictly increasing")
    if cfg.t_stop < cfg.t_start:
        bad("times.stop", "must not precede times.start")
    if cfg.chirp_sign not in (-1, 1):
        bad("state.chirp_sign", "must be +1 or -1")
    w = abs(cfg.a) ** 2 + abs(cfg.b) ** 2
    if abs(w - 1.0) > 1e-12:
        bad("state.a", f"|a|^2 + |b|^2 must be 1, got {w!r}")
    if cfg.mode not in MODES:
        bad("run.mode", f"must be one of {', '.join(MODES)}")
    if cfg.backend not in BACKENDS:
        bad("run.backend", f"must be one of {', '.join(BACKENDS)}")
    if not 0 < cfg.slm_efficiency <= 1:
        bad("run.slm_efficiency", "must lie in (0, 1]")
    if cfg.slm_efficiency < 1 and cfg.backend != "apparatus":
        bad("run.slm_efficiency", "efficiency below 1 needs backend = apparatus")
    if cfg.backend == "apparatus" and cfg.mode not in ("evolve", "scan"):
        bad("run.backend", f"apparatus backend is not available in mode {cfg.mode}")
    if cfg.mode != "scan" and len(cfg.lambdas) != 1:
        bad("params.lambda_c", f"mode {cfg.mode} takes exactly one value")
    if cfg.mode == "fit" and not cfg.series:
        bad("fit.series", "required in fit mode")
    if cfg.n2d < 2 or cfg.n2d & (cfg.n2d - 1):
        bad("extensions.n2d", "must be a power of two >= 2")
    return cfg


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    cfg = RunConfig()
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
            attr, conv = SCHEMA[section][key]
            try:
                setattr(cfg, attr, conv(raw))
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: cannot parse {raw!r} ({exc})") from exc
    return validate(cfg)


# -- output ----------------------------------------------------------------------

def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _lambda_tag(lc: float) -> str:
    return format(lc, "g")


def write_series(path: Path, times, cols: dict):
    write_csv(path, SERIES_HEADER,
              zip(times, *(cols[k] for k in SERIES_HEADER[1:])))


def read_series(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    cols = {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}
    if "t" not in cols:
        raise ValueError(f"{path}: missing 't' column")
    return cols


def _fit_row(lc: float, fit: ZbFit):
    return (lc, fit.v, fit.A, fit.omega, fit.delta, fit.rms, fit.r_squared)


def _describe_fit(lc, fit: ZbFit) -> str:
    line = (f"lambda_c={lc:g}: v={fit.v:.6g} A={fit.A:.6g} omega={fit.omega:.6g} "
            f"delta={fit.delta:.6g} rms={fit.rms:.3g} r2={fit.r_squared:.6f}")
    return line + (f" [{fit.flag}]" if fit.flag else "")


def _export_masks(cfg: RunConfig, out: Path, grid):
    for lc in cfg.lambdas:
        e = energy_fns(grid.p, PhysicalParams(cfg.c, lc))
        # p is in hbar per beam width; the lens map wants hbar per metre.
        X = slm_coordinate(grid.p / cfg.beam_width, cfg.lens_focal, cfg.wavelength)
        write_csv(out / f"masks_lambda_c_{_lambda_tag(lc)}.csv", ("p", "slm_x", "theta", "energy"),
                  zip(grid.p, X, e.theta, e.energy))


def _scan_outputs(cfg: RunConfig, scan: ScanResult, out: Path, single: bool):
    lines = [f"mode: {cfg.mode}", f"backend: {cfg.backend} (slm efficiency {cfg.slm_efficiency:g})",
             f"grid: n={cfg.n} extent={cfg.extent:g}", f"c: {cfg.c:g}",
             f"state: delta={cfg.delta:g} chirp={cfg.chirp:g} a={cfg.a} b={cfg.b}",
             f"times: {cfg.t_start:g}..{cfg.t_stop:g} step {cfg.t_step:g}", "", "fits:"]
    fit_rows = []
    for pt in scan.points:
        cols = {"mean_x_dirac": pt.dirac.values, "mean_x_fw": pt.fw.values,
                "mean_x_fw_plus": pt.fw_plus.values, "mean_x_fw_minus": pt.fw_minus.values,
                "norm": pt.norm}
        name = "series.csv" if single else f"series_lambda_c_{_lambda_tag(pt.lambda_c)}.csv"
        write_series(out / name, scan.times, cols)
        fit_rows.append(_fit_row(pt.lambda_c, pt.fit))
        lin = linearity_report(pt.fw)
        lines.append("  " + _describe_fit(pt.lambda_c, pt.fit))
        lines.append(f"    drift velocity <c^2 p/H> = {pt.drift_velocity:.6g}; "
                     f"FW mean position line r2={lin.r_squared:.8f} "
                     f"max residual={lin.max_residual:.3g}")
    write_csv(out / "fit.csv", FIT_HEADER, fit_rows)

    small = [pt for pt in scan.points if pt.lambda_c <= 10 and pt.fit.A > 0]
    if len(small) >= 3:
        rep = scaling_laws(scan)
        lines += ["", "scaling (lambda_c <= 10):",
                  f"  A vs lambda_c: slope={rep.amplitude.slope:.6g} r2={rep.amplitude.r_squared:.6f}",
                  f"  omega vs 1/lambda_c: slope={rep.frequency.slope:.6g} "
                  f"r2={rep.frequency.r_squared:.6f}"]
    if len([pt for pt in scan.points if pt.lambda_c <= 7]) >= 2:
        vs = velocity_scaling(scan)
        lines += [f"  |v| = k lambda_c^2 (lambda_c <= 7): k={vs.k:.6g} r2={vs.r_squared:.6f}",
                  f"  |v|/c at lambda_c={vs.lambda_light:g}: {vs.light_ratio:.6f}"]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    return [pt.fit for pt in scan.points]


def _run_fit(cfg: RunConfig, out: Path):
    cols = read_series(cfg.series)
    lc = cfg.lambdas[0]
    fit = fit_series(TimeSeries(cols["t"], cols["mean_x_dirac"]), PhysicalParams(cfg.c, lc))
    write_csv(out / "fit.csv", FIT_HEADER, [_fit_row(lc, fit)])
    (out / "summary.txt").write_text(
        f"mode: fit\nsource: {cfg.series}\n{_describe_fit(lc, fit)}\n")
    return [fit]


def _initial_2d(cfg: RunConfig):
    grid = make_grid_2d(cfg.n2d, cfg.extent2d)
    gx = grid.gx
    profile = prepare_initial(gx, InitialStateParams(cfg.delta, cfg.chirp, 1.0, 0.0,
                                                     cfg.chirp_sign)).comp1
    env = np.outer(profile, profile)
    return grid, SpinorField2D(grid, cfg.a * env, cfg.b * env)


def _run_2d(cfg: RunConfig, out: Path):
    params = PhysicalParams(cfg.c, cfg.lambdas[0])
    _, f0 = _initial_2d(cfg)
    rows = []
    for t in cfg.times:
        ft = evolve_2d(f0, t, params)
        mx, my = mean_position_2d(ft)
        rows.append((t, mx, my, norm_2d(ft)))
    write_csv(out / "series_2d.csv", ("t", "mean_x", "mean_y", "norm"), rows)
    (out / "summary.txt").write_text(
        f"mode: extensions-2d\ngrid: {cfg.n2d}x{cfg.n2d} extent {cfg.extent2d:g}\n"
        f"lambda_c={params.lambda_c:g} c={params.c:g}\n"
        f"final mean position: ({rows[-1][1]:.6g}, {rows[-1][2]:.6g})\n")
    return []


def _run_potential(cfg: RunConfig, out: Path):
    params = PhysicalParams(cfg.c, cfg.lambdas[0])
    grid = make_grid(cfg.n, cfg.extent)
    f0 = prepare_initial(grid, cfg.state)
    V1 = cfg.kappa * grid.x
    times = cfg.times
    gauge = [evolve_with_sigma1_potential(f0, t, params, V1) for t in times]
    if cfg.split_step_oracle:
        oracle = [mean_x_dirac(s) for s in split_step_sigma1(f0, times, params, V1, cfg.potential_dt)]
    else:
        oracle = [math.nan] * len(times)
    rows = [(t, mean_x_dirac(g), o, norm(g)) for t, g, o in zip(times, gauge, oracle)]
    write_csv(out / "series_potential.csv",
              ("t", "mean_x_dirac", "mean_x_dirac_split_step", "norm"), rows)
    gap = max((abs(r[1] - r[2]) for r in rows), default=math.nan)
    (out / "summary.txt").write_text(
        f"mode: extensions-potential\nV1(x) = {cfg.kappa:g} x\n"
        f"lambda_c={params.lambda_c:g} c={params.c:g}\n"
        f"max |gauge - split-step| in <x_D>: {gap:.3g}\n")
    return []


def run(cfg: RunConfig, out_dir=None, threads: int = 1) -> int:
    out = Path(out_dir if out_dir is not None else cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(cfg.n, cfg.extent)
    if cfg.mode in ("evolve", "scan"):
        scan = scan_lambda(grid, cfg.state, cfg.c, cfg.lambdas, cfg.times, cfg.backend,
                           cfg.slm_efficiency, threads=threads)
        fits = _scan_outputs(cfg, scan, out, single=cfg.mode == "evolve")
    elif cfg.mode == "fit":
        fits = _run_fit(cfg, out)
    elif cfg.mode == "extensions-2d":
        fits = _run_2d(cfg, out)
    else:
        fits = _run_potential(cfg, out)
    if cfg.export_masks:
        _export_masks(cfg, out, grid)
    if any(not f.converged for f in fits):
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diracsim", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="INI config file (defaults used when omitted)")
    ap.add_argument("--mode", choices=MODES, help="override run.mode")
    ap.add_argument("--out", help="output directory (overrides run.output)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for scans")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text() if args.config else ""
        cfg = parse_config(text)
        if args.mode:
            cfg.mode = args.mode
            validate(cfg)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg, args.out, args.threads)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
