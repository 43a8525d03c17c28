"""Command-line front end: point evaluation, grid sweeps, closed-form
verification and engine-vs-oracle comparison.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import closed_forms as cf
from .analysis import covariance_of, moments_from_taylor, random_passive
from .charfn import PolyGaussian
from .errors import EngineError
from .fock_oracle import oracle_point
from .nongauss import OperationSpec, build_ng_state
from .pipeline import (
    CSV_COLUMNS,
    GridSpec,
    SweepConfig,
    evaluate_point,
    make_seed,
    point_quantities,
    row_fields,
    run_sweep,
    write_sweep,
)
from .teleportation import fidelity as teleport_fidelity

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

DEFAULT_ORACLE_POINTS = {
    "tmsv": ((0.3, 0.7), (0.5, 0.9), (0.8, 0.6), (1.0, 0.95), (0.6, 0.8)),
    "tmst": ((0.3, 0.7), (0.5, 0.9), (0.8, 0.6)),
}


class CliError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def parse_spec(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise CliError("--spec must be m1,n1,m2,n2")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise CliError("--spec must contain integers: %s" % exc)


def parse_grid(text: str) -> GridSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError("grid arguments use min:max:count")
    try:
        return GridSpec(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise CliError("bad grid '%s': %s" % (text, exc))


def build_parser() -> Parser:
    p = Parser(prog="ngteleport", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_t_single):
        sp.add_argument("--family", choices=("tmsv", "tmst"), default="tmsv")
        sp.add_argument("--spec", default="1,1,1,1", help="m1,n1,m2,n2 photon numbers")
        sp.add_argument("--kappa", type=float, default=1.0,
                        help="thermal seed parameter, used by --family tmst")
        if with_t_single:
            sp.add_argument("--r", type=float, required=True)
            sp.add_argument("--T", type=float, required=True)

    sp = sub.add_parser("point", help="evaluate one (r, T) point")
    common(sp, True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sw = sub.add_parser("sweep", help="evaluate an (r, T) grid and write a file")
    common(sw, False)
    sw.add_argument("--r", default="0.01:1.5:150", help="min:max:count")
    sw.add_argument("--T", default="0.5:0.99:150", help="min:max:count")
    sw.add_argument("--out", required=True)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")

    vf = sub.add_parser("verify", help="check the engine against closed forms")
    vf.add_argument("--grid", type=int, default=20, help="grid points per axis")
    vf.add_argument("--tol", type=float, default=1e-9)
    vf.add_argument("--seed", type=int, default=7, help="seed for passive-transform checks")

    oc = sub.add_parser("oracle-check", help="compare the engine with the Fock oracle")
    oc.add_argument("--family", choices=("tmsv", "tmst"), default="tmsv")
    oc.add_argument("--spec", default=None, help="m1,n1,m2,n2; default: all single-photon ops")
    oc.add_argument("--kappa", type=float, default=1.0)
    oc.add_argument("--points", default=None, help="r:T,r:T,... (default: built-in set)")
    oc.add_argument("--cutoff", type=int, default=None)
    oc.add_argument("--tol", type=float, default=1e-6)
    return p


def cmd_point(args) -> int:
    m1, n1, m2, n2 = parse_spec(args.spec)
    op = OperationSpec(m1, n1, m2, n2, transmissivity=args.T)
    row = evaluate_point(args.family, args.r, args.kappa, op)
    if args.format == "json":
        payload = {
            "metadata": {
                "family": args.family,
                "spec": args.spec,
                "kappa": args.kappa if args.family == "tmst" else 0.5,
                "engine_version": __version__,
            },
            "row": dict(zip(CSV_COLUMNS, row_fields(row))),
        }
        sys.stdout.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write(",".join(CSV_COLUMNS) + "\n")
        sys.stdout.write(",".join(row_fields(row)) + "\n")
    if row.error is not None:
        sys.stderr.write("numerical failure: %s\n" % row.error)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_sweep(args) -> int:
    m1, n1, m2, n2 = parse_spec(args.spec)
    config = SweepConfig(args.family, m1, n1, m2, n2,
                         parse_grid(args.r), parse_grid(args.T), kappa=args.kappa)
    rows = run_sweep(config)
    write_sweep(args.out, config, rows, fmt=args.format)
    n_err = sum(1 for row in rows if row.error)
    sys.stdout.write("wrote %d rows to %s (%d error rows)\n" % (len(rows), args.out, n_err))
    return EXIT_OK


def _gaussian_lambda_min(state) -> float:
    _, grad, hess = PolyGaussian.from_gaussian(state).taylor2()
    _, cov = moments_from_taylor(grad, hess)
    return float(np.linalg.eigvalsh(cov)[0])


def cmd_verify(args) -> int:
    rs = np.linspace(0.05, 1.5, args.grid)
    ts = np.linspace(0.5, 0.99, args.grid)
    checks = []

    for label, photons, f_form, l_form in (
        ("PS", (0, 1, 0, 1), cf.ps_fidelity, cf.ps_lambda_min),
        ("PA", (1, 0, 1, 0), cf.pa_fidelity, cf.pa_lambda_min),
    ):
        worst_f = worst_l = 0.0
        for r in rs:
            for t in ts:
                op = OperationSpec(*photons, transmissivity=float(t))
                fid, lam, _, _, _ = point_quantities(make_seed("tmsv", float(r)), op)
                worst_f = max(worst_f, abs(fid - f_form(r, t)))
                worst_l = max(worst_l, abs(lam - l_form(r, t)))
        checks.append(("%s fidelity closed form" % label, worst_f))
        checks.append(("%s lambda_min closed form" % label, worst_l))

    worst_f = worst_l = 0.0
    for r in np.linspace(0.0, 2.0, args.grid):
        worst_f = max(worst_f, abs(teleport_fidelity(make_seed("tmsv", r)).fidelity - cf.tmsv_fidelity(r)))
        worst_f = max(worst_f, abs(teleport_fidelity(make_seed("tmst", r, 1.0)).fidelity - cf.tmst_fidelity(r, 1.0)))
        worst_l = max(worst_l, abs(_gaussian_lambda_min(make_seed("tmsv", r)) - cf.tmsv_lambda_min(r)))
        worst_l = max(worst_l, abs(_gaussian_lambda_min(make_seed("tmst", r, 1.0)) - cf.tmst_lambda_min(r, 1.0)))
    checks.append(("Gaussian baseline fidelity", worst_f))
    checks.append(("Gaussian baseline lambda_min", worst_l))

    ng = build_ng_state(make_seed("tmsv", 0.5), OperationSpec(1, 1, 1, 1, transmissivity=0.8))
    rep = covariance_of(ng)
    worst = 0.0
    for i in range(10):
        k = random_passive(args.seed + i)
        rotated = k @ rep.cov @ k.T
        worst = max(worst, abs(float(np.linalg.eigvalsh(rotated)[0]) - rep.lambda_min))
    checks.append(("passive-transform invariance of lambda_min", worst))

    failed = False
    for name, dev in checks:
        ok = dev < args.tol
        failed = failed or not ok
        sys.stdout.write("%-45s max|dev| = %.3e  %s\n" % (name, dev, "ok" if ok else "FAIL"))
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_oracle_check(args) -> int:
    if args.spec is None:
        specs = [(0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)]
    else:
        specs = [parse_spec(args.spec)]
    if args.points is None:
        points = DEFAULT_ORACLE_POINTS[args.family]
    else:
        points = []
        for chunk in args.points.split(","):
            r_s, t_s = chunk.split(":")
            points.append((float(r_s), float(t_s)))
    kappa = args.kappa if args.family == "tmst" else 0.5

    failed = False
    for photons in specs:
        for r, t in points:
            op = OperationSpec(*photons, transmissivity=t)
            fid, lam, p, _, _ = point_quantities(make_seed(args.family, r, kappa), op)
            pt = oracle_point(args.family, r, kappa, op, cutoff=args.cutoff)
            devs = (abs(fid - pt.fidelity), abs(lam - pt.lambda_min), abs(p - pt.p_success))
            ok = max(devs) < args.tol
            failed = failed or not ok
            sys.stdout.write(
                "%s %s r=%.4g T=%.4g  dF=%.2e dLam=%.2e dP=%.2e cutoff=%d  %s\n"
                % (args.family, op.label(), r, t, devs[0], devs[1], devs[2], pt.cutoff,
                   "ok" if ok else "FAIL")
            )
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "point":
            return cmd_point(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "oracle-check":
            return cmd_oracle_check(args)
    except CliError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except (EngineError, ValueError) as exc:
        sys.stderr.write("numerical failure: %s\n" % exc)
        return EXIT_NUMERICAL
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
