"""Shock-dominated runs: double Mach reflection and the two 2-D Riemann problems.

Writes a VTK snapshot at the final time and prints admissibility diagnostics.

    python3 scripts/robustness.py --out results/
"""
import argparse
from pathlib import Path

import numpy as np

from relaxflux.cases import register_cases
from relaxflux.driver import advance
from relaxflux.output import write_vtk

RUNS = {"double-mach": 120, "riemann2d-1": 300, "riemann2d-2": 300}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--case", choices=sorted(RUNS), action="append")
    p.add_argument("--N", type=int, help="override the resolution")
    p.add_argument("--out", default="results")
    args = p.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cases = register_cases()
    for name in args.case or sorted(RUNS):
        N = args.N or RUNS[name]
        r = advance(cases[name], N)
        Q = r.primitive
        p_ = Q[0] * Q[3]
        line = (f"{name}: {r.mesh.nx}x{r.mesh.ny}, t={r.t:.4f}, {r.steps} steps, "
                f"{r.wall_time:.0f}s; rho in [{Q[0].min():.4g}, {Q[0].max():.4g}], "
                f"p in [{p_.min():.4g}, {p_.max():.4g}], flagged faces {r.flagged_faces}")
        if name == "riemann2d-1":
            line += f"; max |rho - rho^T| = {np.max(np.abs(Q[0] - Q[0].T)):.2e}"
        print(line)
        write_vtk(Q, r.mesh, out / f"{name}_N{N}.vtk", f"{name} t={r.t:.4g}")


if __name__ == "__main__":
    main()
