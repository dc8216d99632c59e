"""Lid-driven cavity: centreline velocity profiles at the final time.

Writes u(0.5, y) and v(x, 0.5) to CSV for comparison with published
benchmark tables (not shipped).

    python3 scripts/cavity.py --Re 1000 --N 65 --end-time 50
"""
import argparse
from pathlib import Path

import numpy as np

from relaxflux.cases import register_cases
from relaxflux.driver import advance


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--Re", type=int, default=1000, choices=(400, 1000, 3200))
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--end-time", type=float, default=None)
    p.add_argument("--out", default="results")
    args = p.parse_args()

    case = register_cases()[f"cavity-{args.Re}"]
    r = advance(case, args.N, end_time=args.end_time)
    Q = r.primitive
    mesh = r.mesh
    u_mid = np.array([np.interp(0.5, mesh.xc, Q[1][:, j]) for j in range(mesh.ny)])
    v_mid = np.array([np.interp(0.5, mesh.yc, Q[2][i, :]) for i in range(mesh.nx)])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / f"cavity{args.Re}_N{mesh.nx}"
    np.savetxt(f"{stem}_u.csv", np.column_stack([mesh.yc, u_mid]), delimiter=",",
               header="y,u", comments="", fmt="%.17g")
    np.savetxt(f"{stem}_v.csv", np.column_stack([mesh.xc, v_mid]), delimiter=",",
               header="x,v", comments="", fmt="%.17g")
    print(f"cavity Re={args.Re} {mesh.nx}x{mesh.ny}: t={r.t:.2f}, {r.steps} steps, "
          f"{r.wall_time:.0f}s; min u on vertical centreline {u_mid.min():.4f}")


if __name__ == "__main__":
    main()
