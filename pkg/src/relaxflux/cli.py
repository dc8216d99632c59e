"""Command-line interface: ``relaxflux run|table|list-cases|check``."""
from __future__ import annotations

import argparse
import json
import logging
import subprocess
import sys
from pathlib import Path

from . import driver, output, physics
from .cases import register_cases
from .config import ConfigError, RunConfig, parse_config, serialize_config

log = logging.getLogger("relaxflux")


def _write_outputs(cfg: RunConfig, report, outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    frames = dict(report.snapshots)
    frames[report.t] = report.U
    for t, U in sorted(frames.items()):
        Q = physics.primitive_from_conserved(U, cfg.gamma, check=False)
        stem = f"{cfg.case}_N{report.N or 'default'}_t{t:.6g}"
        if "csv" in cfg.formats:
            output.write_csv(Q, report.mesh, outdir / f"{stem}.csv", t)
        if "vtk" in cfg.formats:
            output.write_vtk(Q, report.mesh, outdir / f"{stem}.vtk", f"{cfg.case} t={t:.6g}")


def _diagnostics_logger(path: Path):
    fh = path.open("w", encoding="utf-8")

    def progress(step, t, dt, residual):
        fh.write(json.dumps({"step": step, "t": t, "dt": dt, "residual": residual}) + "\n")
    return fh, progress


def cmd_run(args):
    cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    case = cfg.case_spec()
    outdir = Path(args.output or cfg.directory)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.ini").write_text(serialize_config(cfg), encoding="utf-8")
    fh, progress = _diagnostics_logger(outdir / "steps.jsonl")
    try:
        report = driver.advance(case, cfg.N, solver_options=cfg.solver_options(),
                                progress=progress)
    except Exception as exc:
        partial = getattr(exc, "report", None)
        log.error("run aborted: %s", partial.aborted if partial else exc)
        if partial is not None:
            _write_outputs(cfg, partial, outdir)
        return 2
    finally:
        fh.close()
    _write_outputs(cfg, report, outdir)
    summary = {"case": cfg.case, "N": cfg.N, "t": report.t, "steps": report.steps,
               "jacobi_sweeps": report.jacobi_sweeps, "flagged_faces": report.flagged_faces,
               "wall_time": report.wall_time, "steady": report.steady,
               "errors": {k: list(v) for k, v in report.errors.items()}}
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(json.dumps(summary, indent=2))
    return 0


def cmd_table(args):
    cases = register_cases()
    if args.case not in cases:
        print(f"unknown case {args.case!r}", file=sys.stderr)
        return 1
    case = cases[args.case]
    Ns = [int(n) for n in args.meshes.split(",")]
    opts = {"predictor_variant": args.variant}
    fields = [args.field] if args.field else list(case.error_fields)
    reports = [driver.advance(case, N, solver_options=opts) for N in Ns]
    for name in fields:
        rows = driver.convergence_table(case, Ns, name, reports=reports)
        print(f"{case.name}: {name}")
        print(driver.format_table(rows))
        if args.csv:
            path = Path(args.csv)
            if len(fields) > 1:
                path = path.with_name(f"{path.stem}_{name}{path.suffix}")
            output.write_table_csv(rows, path)
    return 0


def cmd_list(args):
    for name, case in register_cases().items():
        print(f"{name:16s} {case.description}")
    return 0


def cmd_check(args):
    root = Path(__file__).resolve().parents[2] / "tests"
    target = str(root) if root.is_dir() else "tests"
    return subprocess.call([sys.executable, "-m", "pytest", "-q", target,
                            "-m", "not slow", *args.pytest_args])


def build_parser():
    p = argparse.ArgumentParser(prog="relaxflux", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configured case")
    r.add_argument("config", help="INI configuration file")
    r.add_argument("-o", "--output", help="output directory (overrides the config)")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("table", help="convergence table over several meshes")
    t.add_argument("case")
    t.add_argument("--meshes", default="20,40,80")
    t.add_argument("--field", default=None)
    t.add_argument("--variant", default="characteristic", choices=("characteristic", "printed"))
    t.add_argument("--csv", default=None, help="also write the table as CSV")
    t.set_defaults(func=cmd_table)

    sub.add_parser("list-cases", help="list registered cases").set_defaults(func=cmd_list)

    c = sub.add_parser("check", help="run the fast invariant and property tests")
    c.add_argument("pytest_args", nargs="*")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
