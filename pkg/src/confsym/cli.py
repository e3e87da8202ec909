"""Command-line front-end: audit model specs, scan dimensions, run the
mechanics simulator, and re-emit saved reports.

Exit status is 0 exactly when every check in the run is ok (expected
failures count as ok).  JSON output is stable-ordered and excludes timing,
so identical spec + seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ConfsymError, ParseError, SemanticError
from .mechanics import MechParams, MechState, dump_trajectory, integrate
from .modelspec import DEFAULT_TOLERANCES, ModelSpec, parse_spec
from .noether import CheckReport
from .suites import TOOLKIT_VERSION, RunReport, run_suite


def emit_report(report: RunReport, fmt: str) -> bytes:
    """Render a run report; json form is byte-stable for golden files."""
    if fmt == "json":
        payload = json.dumps(report.to_dict(include_timing=False), sort_keys=True, indent=2)
        return payload.encode() + b"\n"
    if fmt == "text":
        lines = [f"conformal symmetry verification report (confsym {report.version})"]
        spec = report.spec_echo
        lines.append(
            f"model: {spec.get('kind')}  D={spec.get('dimension')}  seed={report.seed}"
        )
        for check in report.checks:
            if check.error is not None:
                status = "ERROR"
                detail = check.error
            elif check.expected_fail:
                status = "XFAIL" if check.ok else "UNEXPECTED-PASS"
                detail = f"max {check.max_residual:.3e}  tol {check.tolerance:.1e}"
            else:
                status = "PASS" if check.ok else "FAIL"
                detail = f"max {check.max_residual:.3e}  tol {check.tolerance:.1e}"
            lines.append(f"  {status:<15} {check.name:<32} {detail}  (n={check.samples})")
        n_ok = sum(1 for c in report.checks if c.ok)
        lines.append(
            f"checks: {len(report.checks)}  ok: {n_ok}  "
            f"not ok: {len(report.checks) - n_ok}  wall: {report.wall_time:.2f}s"
        )
        lines.append(f"overall: {'PASS' if report.overall_ok else 'FAIL'}")
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def report_from_dict(data: dict) -> RunReport:
    checks = [
        CheckReport(
            name=c["name"],
            dim=c["dim"],
            samples=c["samples"],
            max_residual=c["max_residual"],
            tolerance=c["tolerance"],
            seed=c["seed"],
            expected_fail=c.get("expected_fail", False),
            error=c.get("error"),
        )
        for c in data["checks"]
    ]
    return RunReport(
        data["version"], data["spec"], checks, data["seed"],
        data.get("wall_time_seconds", 0.0),
    )


def _write_output(payload: bytes, out_path):
    if out_path:
        with open(out_path, "wb") as handle:
            handle.write(payload)
    else:
        sys.stdout.buffer.write(payload)


def _cmd_audit(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as handle:
        spec = parse_spec(handle.read())
    report = run_suite(spec)
    _write_output(emit_report(report, args.format), args.out)
    return 0 if report.overall_ok else 1


def _parse_dims(raw: str):
    if ".." in raw:
        lo, hi = raw.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in raw.split(",") if part.strip()]


def _cmd_scan_dims(args) -> int:
    reports = []
    for dim in _parse_dims(args.dims):
        spec = ModelSpec(
            kind=args.kind,
            dimension=dim,
            components=2 if args.kind == "interacting-multiplet" else 1,
            seed=args.seed,
            tolerances=dict(DEFAULT_TOLERANCES),
        )
        reports.append(run_suite(spec))
    ok = all(r.overall_ok for r in reports)
    if args.format == "json":
        payload = json.dumps(
            {
                "version": TOOLKIT_VERSION,
                "kind": args.kind,
                "overall_ok": ok,
                "scans": [r.to_dict(include_timing=False) for r in reports],
            },
            sort_keys=True,
            indent=2,
        ).encode() + b"\n"
        _write_output(payload, args.out)
    else:
        chunks = [emit_report(r, "text") for r in reports]
        _write_output(b"\n".join(chunks), args.out)
    return 0 if ok else 1


def _cmd_mech_sim(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as handle:
        spec = parse_spec(handle.read())
    if spec.kind != "mechanics":
        raise SemanticError("mech-sim requires a mechanics model spec")
    mech = spec.mechanics
    if "q0" in mech:
        q0 = np.asarray(mech["q0"])
        p0 = np.asarray(mech.get("p0", np.zeros_like(q0)))
    else:
        q0 = 1.2 * np.ones(spec.components)
        p0 = 0.3 * (-1.0) ** np.arange(spec.components)
    params = MechParams(q0.shape[0], spec.coupling)
    traj = integrate(
        MechState.make(0.0, q0, p0),
        params,
        mech.get("t-end", 10.0),
        mech.get("step", 1e-3),
    )
    drift = traj.charge_drift()
    summary = (
        f"steps: {traj.times.size - 1}  coupling: {params.coupling}  "
        f"drift H/D/K: {drift[0]:.3e} {drift[1]:.3e} {drift[2]:.3e}\n"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            dump_trajectory(traj, handle)
        sys.stdout.write(summary)
    else:
        dump_trajectory(traj, sys.stdout)
        sys.stderr.write(summary)
    tol = spec.tolerances.get("drift", DEFAULT_TOLERANCES["drift"])
    return 0 if float(np.max(drift)) <= tol else 1


ALGEBRA_CHECKS = [
    "map-composition",
    "killing-equation",
    "commutator-algebra",
    "gamma-reflection",
    "decoupling-bracket",
]


def _cmd_algebra(args) -> int:
    spec = ModelSpec(
        kind="maxwell",
        dimension=args.dim,
        checks=list(ALGEBRA_CHECKS),
        seed=args.seed,
        tolerances=dict(DEFAULT_TOLERANCES),
    )
    report = run_suite(spec)
    _write_output(emit_report(report, args.format), args.out)
    return 0 if report.overall_ok else 1


def _cmd_report(args) -> int:
    with open(args.file, "r", encoding="utf-8") as handle:
        report = report_from_dict(json.load(handle))
    _write_output(emit_report(report, args.format), args.out)
    return 0 if report.overall_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confsym",
        description="verify scale and conformal symmetry identities of classical fields",
    )
    parser.add_argument("--version", action="version", version=f"confsym {TOOLKIT_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="run the check suite for a model spec file")
    p.add_argument("spec")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_audit)

    p = sub.add_parser("scan-dims", help="run one model kind across a dimension range")
    p.add_argument("--kind", default="maxwell",
                   choices=("maxwell", "interacting-multiplet", "general-scalar"))
    p.add_argument("--dims", default="3..6", help="range like 3..6 or list like 3,5")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_scan_dims)

    p = sub.add_parser("mech-sim", help="integrate a mechanics spec and dump the trajectory")
    p.add_argument("spec")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_mech_sim)

    p = sub.add_parser("algebra", help="generator-algebra checks at one dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_algebra)

    p = sub.add_parser("report", help="re-emit a saved json report")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SemanticError) as exc:
        sys.stderr.write(f"spec error: {exc}\n")
        return 2
    except ConfsymError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
