"""Compton-wavelength scan: ZB fits per lambda_c and the scaling-law regressions.

    python scripts/lambda_scan.py --out results/lambda_scan

Writes one series CSV per lambda_c, ``fit.csv``, and ``scaling.csv``
(lambda_c, A, omega, |v|, drift velocity <c^2 p/H>, columns ready to plot).
"""

import argparse
from pathlib import Path

import numpy as np

from diracsim.analysis import scaling_laws, scan_lambda, velocity_scaling
from diracsim.cli import FIT_HEADER, write_csv, write_series
from diracsim.core import InitialStateParams, make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/lambda_scan")
    ap.add_argument("--lambdas", default="1,3,5,7,10,100")
    ap.add_argument("--c", type=float, default=0.1)
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--extent", type=float, default=64.0)
    ap.add_argument("--t-stop", type=float, default=95.0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lambdas = [float(v) for v in args.lambdas.split(",")]
    times = np.arange(0.0, args.t_stop + 0.5)
    scan = scan_lambda(make_grid(args.n, args.extent), InitialStateParams(), args.c, lambdas,
                       times, threads=args.threads)

    for pt in scan.points:
        write_series(out / f"series_lambda_c_{pt.lambda_c:g}.csv", times, {
            "mean_x_dirac": pt.dirac.values, "mean_x_fw": pt.fw.values,
            "mean_x_fw_plus": pt.fw_plus.values, "mean_x_fw_minus": pt.fw_minus.values,
            "norm": pt.norm})
    write_csv(out / "fit.csv", FIT_HEADER,
              [(pt.lambda_c, pt.fit.v, pt.fit.A, pt.fit.omega, pt.fit.delta, pt.fit.rms,
                pt.fit.r_squared) for pt in scan.points])
    write_csv(out / "scaling.csv", ("lambda_c", "A", "omega", "abs_v", "drift_velocity"),
              [(pt.lambda_c, pt.fit.A, pt.fit.omega, abs(pt.fit.v), pt.drift_velocity)
               for pt in scan.points])

    print(f"{'lambda_c':>9} {'A':>9} {'omega':>9} {'v':>10} {'<c2p/H>':>10}  flag")
    for pt in scan.points:
        print(f"{pt.lambda_c:9g} {pt.fit.A:9.4f} {pt.fit.omega:9.5f} {pt.fit.v:10.5f} "
              f"{pt.drift_velocity:10.5f}  {pt.fit.flag or ''}")
    if sum(lc <= 10 for lc in lambdas) >= 3:
        rep = scaling_laws(scan)
        print(f"A ~ lambda_c:         r2 = {rep.amplitude.r_squared:.4f}")
        print(f"omega ~ 1/lambda_c:   r2 = {rep.frequency.r_squared:.6f} "
              f"(slope {rep.frequency.slope:.4f}, 4 pi c = {4 * np.pi * args.c:.4f})")
    if sum(lc <= 7 for lc in lambdas) >= 2:
        vs = velocity_scaling(scan)
        print(f"|v| ~ lambda_c^2:     r2 = {vs.r_squared:.4f}")
        print(f"|v|/c at lambda_c = {vs.lambda_light:g}: {vs.light_ratio:.3f}")


if __name__ == "__main__":
    main()
