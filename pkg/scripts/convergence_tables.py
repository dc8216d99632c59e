"""Convergence tables for the smooth cases, printed and written as CSV.

    python3 scripts/convergence_tables.py --out results/
    python3 scripts/convergence_tables.py --case vortex --meshes 40,80,160
"""
import argparse
from pathlib import Path

from relaxflux.cases import register_cases
from relaxflux.driver import advance, convergence_table, format_table
from relaxflux.output import write_table_csv

DEFAULT_MESHES = {"advection": [20, 40, 80, 160, 320], "vortex": [40, 80, 160],
                  "couette": [10, 20, 40]}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--case", choices=sorted(DEFAULT_MESHES), action="append")
    p.add_argument("--meshes", help="comma-separated N values (single case only)")
    p.add_argument("--unlimited", action="store_true", help="central slopes, no limiter")
    p.add_argument("--variant", default="characteristic", choices=("characteristic", "printed"))
    p.add_argument("--out", default="results")
    args = p.parse_args()

    cases = register_cases()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.case or sorted(DEFAULT_MESHES):
        case = cases[name]
        if args.unlimited:
            case = case.with_overrides(limiter=False)
        Ns = [int(n) for n in args.meshes.split(",")] if args.meshes else DEFAULT_MESHES[name]
        reports = [advance(case, N, solver_options={"predictor_variant": args.variant})
                   for N in Ns]
        for field in case.error_fields:
            rows = convergence_table(case, Ns, field, reports=reports)
            print(f"\n{name} ({field}), {sum(r.wall_time for r in reports):.0f}s")
            print(format_table(rows))
            tag = "_unlimited" if args.unlimited else ""
            write_table_csv(rows, out / f"{name}_{field}{tag}_{args.variant}.csv")


if __name__ == "__main__":
    main()
