"""Batch front-end: holonomy reports, fidelity sweeps, slope extraction,
and the built-in verification suite.

Exit codes: 0 success, 1 verification failure, 2 input error.
All floating-point output uses 17 significant digits so values round-trip.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import acceptance, areas, manifold, teleport
from .channels import dissipative_fidelity
from .linalg import max_norm
from .loopspec_io import (LoopSpecError, parse_loop_spec, parse_sweep_config)

FLOAT_FMT = "%.17g"

SWEEP_COLUMNS = ("eps", "delta", "lambda", "fidelity_total",
                 "fidelity_branch_00", "fidelity_branch_01",
                 "fidelity_branch_10", "fidelity_branch_11",
                 "argmin_theta", "argmin_phi",
                 "firstorder_prediction", "residual")


def _fmt(x) -> str:
    if isinstance(x, float):
        return FLOAT_FMT % x
    return str(x)


def _write(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail_input(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


# ---------------------------------------------------------------------------
# holonomy
# ---------------------------------------------------------------------------

def cmd_holonomy(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            loop = parse_loop_spec(fh.read())
    except OSError as exc:
        return _fail_input(str(exc))
    except LoopSpecError as exc:
        return _fail_input(str(exc))
    if manifold.is_optical_plane(loop.plane):
        return _fail_input("no holonomy engine for optical (x, r) loops; "
                           "only the area functionals apply")
    steps = args.steps if args.steps else loop.steps
    try:
        result = manifold.holonomy(loop, steps=steps)
    except ValueError as exc:
        return _fail_input(str(exc))
    closed = manifold.closed_form_holonomy(loop)
    record = {
        "steps": result.steps,
        "error_estimate": result.error_estimate,
        "matrix_re": result.matrix.real.tolist(),
        "matrix_im": result.matrix.imag.tolist(),
    }
    if closed is not None:
        record["closed_form_deviation"] = max_norm(result.matrix - closed)
        try:
            record["enclosed_area"] = areas.enclosed_rotation_angle(loop)
        except ValueError:
            pass
    if args.format == "json":
        _write(json.dumps(record, indent=2, default=float) + "\n", args.out)
    else:
        lines = ["field,value"]
        lines.append(f"steps,{record['steps']}")
        lines.append(f"error_estimate,{_fmt(record['error_estimate'])}")
        if "closed_form_deviation" in record:
            lines.append(f"closed_form_deviation,{_fmt(record['closed_form_deviation'])}")
        if "enclosed_area" in record:
            lines.append(f"enclosed_area,{_fmt(record['enclosed_area'])}")
        m = result.matrix
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                lines.append(f"entry_{i}_{j}_re,{_fmt(float(m[i, j].real))}")
                lines.append(f"entry_{i}_{j}_im,{_fmt(float(m[i, j].imag))}")
        _write("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_row(task):
    eps, delta, lam, mode = task
    try:
        if lam == 0.0:
            rep = teleport.fidelity(delta, eps, mode)
        else:
            rep = dissipative_fidelity(delta, eps, lam, mode)
        worst = min(rep.per_branch, key=rep.per_branch.get)
        theta, phi = rep.argmin[worst]
        pred = teleport.first_order_prediction(eps, delta, lam)
        return (eps, delta, lam, rep.total,
                rep.per_branch[(0, 0)], rep.per_branch[(0, 1)],
                rep.per_branch[(1, 0)], rep.per_branch[(1, 1)],
                theta, phi, pred, rep.total - pred)
    except Exception:   # optimizer failure: record the row, keep sweeping
        nan = float("nan")
        return (eps, delta, lam, nan, nan, nan, nan, nan, nan, nan, nan, nan)


def cmd_sweep(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_sweep_config(fh.read())
    except OSError as exc:
        return _fail_input(str(exc))
    except LoopSpecError as exc:
        return _fail_input(str(exc))
    mode = args.mode or cfg.mode
    out_format = args.format or cfg.out_format
    out_path = args.out or cfg.out
    tasks = [(eps, delta, lam, mode)
             for eps in cfg.axis_values("eps")
             for delta in cfg.axis_values("delta")
             for lam in cfg.axis_values("lambda")]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    if out_format == "json":
        payload = [dict(zip(SWEEP_COLUMNS, row)) for row in rows]
        _write(json.dumps(payload, indent=2, default=float) + "\n", out_path)
    else:
        lines = [",".join(SWEEP_COLUMNS)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        _write("\n".join(lines) + "\n", out_path)
    return 0


# ---------------------------------------------------------------------------
# coeffs
# ---------------------------------------------------------------------------

def cmd_coeffs(args) -> int:
    which = {"eps": "epsilon", "delta": "delta"}[args.which]
    lam = args.lam
    measured = teleport.first_order_coeffs(which, h=args.h, lam=lam,
                                           method=args.method)
    decay = 1.0 - math.exp(-lam)
    if which == "epsilon":
        reference = (teleport.REFERENCE_EPS_SLOPE
                     + decay * teleport.REFERENCE_EPS_DISSIPATION_GAIN)
    else:
        reference = (teleport.REFERENCE_DELTA_SLOPE
                     + decay * teleport.REFERENCE_DELTA_DISSIPATION_GAIN)
    record = {"which": args.which, "lambda": lam, "h": args.h,
              "method": args.method, "measured_slope": measured,
              "reference_slope": reference,
              "difference": measured - reference}
    if args.format == "json":
        _write(json.dumps(record, indent=2, default=float) + "\n", args.out)
    else:
        lines = ["field,value"] + [f"{k},{_fmt(v)}" for k, v in record.items()]
        _write("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    rows, ok = acceptance.run_all()
    width = max(len(r.quantity) for r in rows) + 2
    header = f"{'crit':>4}  {'quantity':<{width}} {'expected':>24} {'measured':>24} {'tolerance':>12}  status"
    print(header)
    print("-" * len(header))
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        tol = f"{r.tolerance:.1e}" + ("r" if r.relative else "")
        print(f"{r.criterion:>4}  {r.quantity:<{width}} "
              f"{_fmt(float(r.expected)):>24} {_fmt(float(r.measured)):>24} "
              f"{tol:>12}  {status}")
        if r.note and (not r.passed or "reported" in r.note):
            print(f"{'':>4}  note: {r.note}")
    n_pass = sum(r.passed for r in rows)
    print("-" * len(header))
    print(f"{n_pass}/{len(rows)} checks passed")
    if not ok:
        print("documented deviations are analyzed in README.md (Known deviations)")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holoport",
        description="Holonomic-gate and imperfect-teleportation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_hol = sub.add_parser("holonomy", help="integrate a loop spec and report the holonomy")
    p_hol.add_argument("spec", help="loop-spec file")
    p_hol.add_argument("--steps", type=int, default=None, help="override steps per edge")
    p_hol.add_argument("--format", choices=("csv", "json"), default="csv")
    p_hol.add_argument("--out", default=None)
    p_hol.set_defaults(fn=cmd_holonomy)

    p_sweep = sub.add_parser("sweep", help="fidelity table over an error grid")
    p_sweep.add_argument("config", help="sweep config file")
    p_sweep.add_argument("--mode", choices=("first-order", "exact-area"), default=None)
    p_sweep.add_argument("--format", choices=("csv", "json"), default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_c = sub.add_parser("coeffs", help="finite-difference fidelity slopes at (0,0)")
    p_c.add_argument("--which", choices=("eps", "delta"), default="eps")
    p_c.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p_c.add_argument("--h", type=float, default=1e-4)
    p_c.add_argument("--method", choices=("central", "forward"), default="central")
    p_c.add_argument("--format", choices=("csv", "json"), default="csv")
    p_c.add_argument("--out", default=None)
    p_c.set_defaults(fn=cmd_coeffs)

    p_v = sub.add_parser("verify", help="run the acceptance criteria")
    p_v.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LoopSpecError as exc:
        return _fail_input(str(exc))


if __name__ == "__main__":
    sys.exit(main())
