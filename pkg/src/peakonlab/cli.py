"""Command-line front end.

Exit codes: 0 success (or certified/rejected as expected), 1 usage/expectation
mismatch, 2 no real amplitude, 3 oracle or tolerance failure, 4 non-finite
state during evolution.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import green
from .errors import CflViolation, DegenerateParams, NoRealAmplitude, NonFiniteState, ToleranceNotMet
from .evolve import SolverConfig, mollified_peakon_initial, peak_speed_estimate, peakon_reference, run
from .io import RunManifest, output_dir, write_csv, write_diagnostics, write_json, write_snapshots
from .model import Branch, Domain, ModelParams, make_profile, solve_amplitudes
from .residual import CERTIFIED, REJECTED, certify

EXIT_OK, EXIT_MISMATCH, EXIT_NO_AMPLITUDE, EXIT_TOLERANCE, EXIT_BLOWUP = 0, 1, 2, 3, 4
CONVOLVE_TOL = 1e-8

DEFAULTS = {
    "N": 1024,
    "dt": 1e-4,
    "t_end": 0.5,
    "tolerance": CONVOLVE_TOL,
    "certify_tolerance": 1e-6,
    "samples": 101,
    "filter_strength": 36,
    "cfl_safety": 0.3,
    "record_every": 100,
}

DEFAULTS_TABLE = "\n".join(
    ["defaults:"] + [f"  {k:<18} {v}" for k, v in DEFAULTS.items()]
    + ["", "output directory: --out, else $PEAKONLAB_OUT, else the working directory",
       "exit codes: 0 ok, 1 mismatch, 2 no real amplitude, 3 tolerance failure, 4 blow-up"]
)

IDENTITIES = ("line_cubic", "line_quadratic", "circle_cubic", "circle_sh2", "circle_quadratic")


def _fail(code: int, kind: str, reason: str, **extra) -> int:
    print(json.dumps({"error": kind, "reason": reason, **extra}, sort_keys=True), file=sys.stderr)
    return code


def _params(args) -> ModelParams:
    return ModelParams(args.k1, args.k2, args.c)


def _finish(args, outdir: Path, params, outputs, config=None, seed=None):
    args_dict = {k: v for k, v in vars(args).items() if k != "func"}
    m = RunManifest(args.command, params.as_dict() if params else None, args_dict,
                    config, seed, __version__, [str(p) for p in outputs])
    m.write(outdir / f"{args.command}_manifest.json")


# -- peakon -------------------------------------------------------------------

def cmd_peakon(args) -> int:
    params = _params(args)
    outdir = output_dir(args.out)
    domain = Domain(args.domain)
    try:
        sol = solve_amplitudes(params, domain, raise_missing=False)
    except DegenerateParams as exc:
        return _fail(EXIT_NO_AMPLITUDE, "DegenerateParams", str(exc))
    report = {
        "domain": domain.value, "params": params.as_dict(), "roots": list(sol.roots),
        "discriminant": sol.discriminant, "exists": sol.exists, "plus": sol.plus, "minus": sol.minus,
    }
    outputs = [outdir / "peakon_amplitudes.json"]
    if sol.exists:
        prof = make_profile(domain, sol.branch(args.branch), params.c)
        report["branch"] = args.branch
        report["amplitude"] = prof.amplitude
        report["crest"] = prof.crest
        if domain is Domain.LINE:
            x = np.linspace(-10.0, 10.0, args.samples)
        else:
            x = np.arange(args.samples) / args.samples
        outputs.append(write_csv(outdir / "peakon_profile.csv", ("x", "u", "ux"),
                                 zip(x, prof.u(0.0, x), prof.ux(0.0, x))))
    write_json(outputs[0], report)
    _finish(args, outdir, params, outputs)
    print(json.dumps(report, sort_keys=True))
    if not sol.exists:
        return _fail(EXIT_NO_AMPLITUDE, "NoRealAmplitude", f"discriminant {sol.discriminant:g}",
                     discriminant=sol.discriminant)
    return EXIT_OK


# -- certify ------------------------------------------------------------------

def cmd_certify(args) -> int:
    params = _params(args)
    outdir = output_dir(args.out)
    domain = Domain(args.domain)
    try:
        a = solve_amplitudes(params, domain).branch(args.branch)
    except (NoRealAmplitude, DegenerateParams) as exc:
        return _fail(EXIT_NO_AMPLITUDE, type(exc).__name__, str(exc))
    prof = make_profile(domain, a * (1.0 + args.perturb), params.c)
    try:
        report = certify(prof, params, args.tolerance)
    except ToleranceNotMet as exc:
        return _fail(EXIT_TOLERANCE, type(exc).__name__, str(exc))
    path = write_json(outdir / "residual_report.json", report.to_dict())
    _finish(args, outdir, params, [path])
    print(report.to_json())
    if args.perturb == 0.0:
        expected = CERTIFIED
    elif abs(args.perturb) >= 0.01:
        expected = REJECTED
    else:
        return EXIT_OK
    return EXIT_OK if report.verdict == expected else EXIT_MISMATCH


# -- convolve -----------------------------------------------------------------

def convolution_table(identity: str, samples: int, amplitude: float = 1.0, k1: float = 1.0,
                      k2: float = 1.0, at=None):
    """(s, closed_form, quadrature) arrays for one convolution identity.

    Default samples: s in [-8, 8] on the line, s in [1e-3, 1 - 1e-3] on the
    circle; points within 1e-3 of a kink are moved to +1e-3.
    """
    line = identity.startswith("line")
    if at:
        s = np.asarray(at, dtype=float)
    elif line:
        s = np.linspace(-8.0, 8.0, samples)
        s = np.where(np.abs(s) < 1e-3, 1e-3, s)
    else:
        s = np.linspace(1e-3, 1.0 - 1e-3, samples)
    A = amplitude
    closed, quad = {
        "line_cubic": (lambda: green.closedform_line_cubic(A, k1, s), lambda: green.quadrature_line_cubic(A, k1, s)),
        "line_quadratic": (lambda: green.closedform_line_quadratic(A, k2, s),
                           lambda: green.quadrature_line_quadratic(A, k2, s)),
        "circle_cubic": (lambda: green.closedform_circle_cubic(A, k1, s),
                         lambda: green.quadrature_circle_cubic(A, k1, s)),
        "circle_sh2": (lambda: green.closedform_circle_sh2(s, side="+"), lambda: green.quadrature_circle_sh2(s)),
        "circle_quadratic": (lambda: green.closedform_circle_quadratic(A, k2, s, side="+"),
                             lambda: green.quadrature_circle_quadratic(A, k2, s)),
    }[identity]
    return s, np.asarray(closed(), dtype=float), np.asarray(quad(), dtype=float)


def cmd_convolve(args) -> int:
    outdir = output_dir(args.out)
    try:
        s, cf, qd = convolution_table(args.identity, args.samples, args.amplitude, args.k1, args.k2, args.at)
    except ToleranceNotMet as exc:
        return _fail(EXIT_TOLERANCE, "ToleranceNotMet", str(exc))
    diff = np.abs(cf - qd)
    path = write_csv(outdir / f"convolve_{args.identity}.csv", ("s", "closed_form", "quadrature", "abs_diff"),
                     zip(s, cf, qd, diff))
    _finish(args, outdir, None, [path])
    worst = int(np.argmax(diff))
    summary = {"identity": args.identity, "samples": int(s.size), "max_abs_diff": float(diff[worst]),
               "worst_s": float(s[worst])}
    print(json.dumps(summary, sort_keys=True))
    if diff[worst] > args.tolerance:
        return _fail(EXIT_TOLERANCE, "OracleMismatch", f"max abs diff {diff[worst]:.3g} at s={s[worst]!r}",
                     worst_s=float(s[worst]))
    return EXIT_OK


# -- evolve -------------------------------------------------------------------

def cmd_evolve(args) -> int:
    params = _params(args)
    outdir = output_dir(args.out)
    frame = params.c if args.frame == "comoving" else 0.0
    try:
        config = SolverConfig(args.N, args.dt, args.t_end, not args.no_dealias, args.filter_strength,
                              args.cfl_safety, args.record_every, args.snapshot_every, frame)
    except ValueError as exc:
        return _fail(EXIT_MISMATCH, "BadConfig", str(exc))
    try:
        init = mollified_peakon_initial(params, args.N, Branch(args.branch), args.filter_strength)
        ref = peakon_reference(params, Branch(args.branch))
    except (NoRealAmplitude, DegenerateParams) as exc:
        return _fail(EXIT_NO_AMPLITUDE, type(exc).__name__, str(exc))
    t0 = time.perf_counter()
    try:
        traj = run(config, params, init, ref)
    except NonFiniteState as exc:
        return _fail(EXIT_BLOWUP, "NonFiniteState", str(exc), time=exc.time)
    except CflViolation as exc:
        return _fail(EXIT_MISMATCH, "CflViolation", str(exc))
    outputs = [write_snapshots(outdir / "snapshots.csv", traj.snapshots),
               write_diagnostics(outdir / "diagnostics.csv", traj.records)]
    _finish(args, outdir, params, outputs, config=asdict(config))
    summary = {"final_time": traj.records[-1].time, "shape_error": traj.records[-1].shape_error,
               "h1_drift": traj.h1_drift(), "wall_seconds": round(time.perf_counter() - t0, 3)}
    try:
        summary["peak_speed"] = peak_speed_estimate(traj.records)
    except ValueError:
        summary["peak_speed"] = None
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

def _axis(spec: str) -> np.ndarray:
    """'v1,v2,...' or 'start:stop:num'."""
    if ":" in spec:
        a, b, n = spec.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(v) for v in spec.split(",")])


def existence_row(k1: float, k2: float, c: float):
    p = ModelParams(k1, k2, c)
    row = [k1, k2, c]
    discs, counts = [], []
    for dom in (Domain.LINE, Domain.CIRCLE):
        try:
            sol = solve_amplitudes(p, dom, raise_missing=False)
            discs.append(sol.discriminant)
            counts.append(len(sol.roots))
        except DegenerateParams:
            discs.append(0.0)
            counts.append(0)
    return row + discs + counts


def sweep_points(args):
    if args.random:
        rng = np.random.default_rng(args.seed)
        lo, hi = args.range
        return [tuple(v) for v in rng.uniform(lo, hi, size=(args.random, 3))]
    return [(a, b, c) for a in _axis(args.k1) for b in _axis(args.k2) for c in _axis(args.c)]


def cmd_sweep(args) -> int:
    outdir = output_dir(args.out)
    rows = [existence_row(*pt) for pt in sweep_points(args)]
    path = write_csv(outdir / "existence_map.csv",
                     ("k1", "k2", "c", "disc_line", "disc_circle", "n_roots_line", "n_roots_circle"), rows)
    _finish(args, outdir, None, [path], seed=args.seed)
    print(json.dumps({"rows": len(rows), "output": str(path)}))
    return EXIT_OK


# -- replay -------------------------------------------------------------------

def cmd_replay(args) -> int:
    manifest = RunManifest.load(args.manifest)
    ns = argparse.Namespace(**manifest.args)
    if args.out:
        ns.out = args.out
    ns.func = COMMANDS[ns.command]
    return ns.func(ns)


COMMANDS = {"peakon": cmd_peakon, "certify": cmd_certify, "convolve": cmd_convolve,
            "evolve": cmd_evolve, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakonlab", description="Peakons of m_t + k1(3uu_x m + u^2 m_x) + k2(2m u_x + m_x u) = 0",
        epilog=DEFAULTS_TABLE, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_c=True):
        p.add_argument("--k1", type=float, required=True)
        p.add_argument("--k2", type=float, required=True)
        p.add_argument("--c", type=float, required=need_c)
        p.add_argument("--branch", choices=[b.value for b in Branch], default="plus")
        p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("peakon", help="amplitudes and a sampled profile", epilog=DEFAULTS_TABLE,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--domain", choices=[d.value for d in Domain], default="line")
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=cmd_peakon)

    p = sub.add_parser("certify", help="strong and weak residual suite", epilog=DEFAULTS_TABLE,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--domain", choices=[d.value for d in Domain], default="circle")
    p.add_argument("--perturb", type=float, default=0.0, help="relative amplitude perturbation")
    p.add_argument("--tolerance", type=float, default=DEFAULTS["certify_tolerance"])
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("convolve", help="closed-form convolution vs quadrature", epilog=DEFAULTS_TABLE,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--identity", choices=IDENTITIES, required=True)
    p.add_argument("--samples", type=int, default=DEFAULTS["samples"])
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--k1", type=float, default=1.0)
    p.add_argument("--k2", type=float, default=1.0)
    p.add_argument("--at", type=float, nargs="+", default=None, help="explicit s values")
    p.add_argument("--tolerance", type=float, default=DEFAULTS["tolerance"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("evolve", help="pseudospectral evolution of a mollified periodic peakon",
                       epilog=DEFAULTS_TABLE, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--N", type=int, default=DEFAULTS["N"])
    p.add_argument("--dt", type=float, default=DEFAULTS["dt"])
    p.add_argument("--t-end", dest="t_end", type=float, default=DEFAULTS["t_end"])
    p.add_argument("--filter-strength", type=int, default=DEFAULTS["filter_strength"])
    p.add_argument("--cfl-safety", type=float, default=DEFAULTS["cfl_safety"])
    p.add_argument("--record-every", type=int, default=DEFAULTS["record_every"])
    p.add_argument("--snapshot-every", type=int, default=0)
    p.add_argument("--frame", choices=["comoving", "lab"], default="comoving")
    p.add_argument("--no-dealias", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="existence map over (k1, k2, c)", epilog=DEFAULTS_TABLE,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--k1", default="-2:2:5", help="values 'a,b,...' or 'start:stop:num'")
    p.add_argument("--k2", default="-2:2:5")
    p.add_argument("--c", default="-2:2:5")
    p.add_argument("--random", type=int, default=0, help="draw this many random triples instead of a grid")
    p.add_argument("--range", type=float, nargs=2, default=(-3.0, 3.0))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
