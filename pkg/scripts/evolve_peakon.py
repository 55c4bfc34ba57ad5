#!/usr/bin/env python3
"""Mollified periodic peakon over one period, in the lab and comoving frames.

The lab-frame run shows the RK4 phase error on fast-translating high modes
(H1 drift around 1e-5 at the default step); the comoving run removes most of
the translation from the integrator.  A short dt sweep in the lab frame
reports the drift scaling.
"""
import argparse
import time
from pathlib import Path

from peakonlab.evolve import SolverConfig, mollified_peakon_initial, peak_speed_estimate, peakon_reference, run
from peakonlab.io import write_csv, write_diagnostics
from peakonlab.model import ModelParams


def one(params, N, dt, t_end, frame_speed):
    cfg = SolverConfig(N=N, dt=dt, t_end=t_end, frame_speed=frame_speed, record_every=max(1, int(0.005 / dt)))
    t0 = time.perf_counter()
    traj = run(cfg, params, mollified_peakon_initial(params, N), peakon_reference(params))
    return traj, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k1", type=float, default=1.0)
    ap.add_argument("--k2", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=2.0)
    ap.add_argument("--N", type=int, default=1024)
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--sweep", action="store_true", help="also run a lab-frame dt sweep over t in [0, 0.05]")
    ap.add_argument("--out", default="out/evolve_peakon")
    args = ap.parse_args()
    p = ModelParams(args.k1, args.k2, args.c)
    out = Path(args.out)
    t_end = 1.0 / abs(p.c)
    for name, speed in (("lab", 0.0), ("comoving", p.c)):
        traj, secs = one(p, args.N, args.dt, t_end, speed)
        write_diagnostics(out / f"diagnostics_{name}.csv", traj.records)
        print(f"{name:9s} drift={traj.h1_drift():.2e} speed={peak_speed_estimate(traj.records):.6f} "
              f"shape_error={traj.records[-1].shape_error:.3e} ({secs:.1f}s)")
    if args.sweep:
        rows = []
        for dt in (4e-4 / 3, 1e-4, 5e-5):
            traj, _ = one(p, args.N, dt, 0.05, 0.0)
            rows.append((dt, traj.h1_drift()))
            print(f"lab dt={dt:.2e} drift over t<=0.05: {rows[-1][1]:.2e}")
        write_csv(out / "lab_dt_sweep.csv", ("dt", "h1_drift"), rows)


if __name__ == "__main__":
    main()
