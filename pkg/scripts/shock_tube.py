"""Viscous shock tube at t=1: primary vortex height and wall density.

The default N=250 (500x250 cells) takes tens of minutes.

    python3 scripts/shock_tube.py --N 125 --out results/
"""
import argparse
from pathlib import Path

import numpy as np

from relaxflux.analysis import primary_vortex_height, wall_vortices
from relaxflux.cases import register_cases
from relaxflux.driver import advance
from relaxflux.output import write_vtk


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", type=int, default=250)
    p.add_argument("--Re", type=int, default=200, choices=(200, 1000))
    p.add_argument("--out", default="results")
    args = p.parse_args()

    name = "vst" if args.Re == 200 else "vst-1000"
    r = advance(register_cases()[name], args.N)
    Q = r.primitive
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_vtk(Q, r.mesh, out / f"{name}_N{args.N}.vtk", f"{name} t={r.t:.4g}")
    np.savetxt(out / f"{name}_N{args.N}_wall_density.csv",
               np.column_stack([r.mesh.xc, Q[0][:, 0]]), delimiter=",",
               header="x,rho", comments="", fmt="%.17g")
    print(f"{name} {r.mesh.nx}x{r.mesh.ny}: t={r.t:.4f} in {r.steps} steps, {r.wall_time:.0f}s")
    print(f"min density {Q[0].min():.4g}, pressure range "
          f"[{(Q[0] * Q[3]).min():.4g}, {(Q[0] * Q[3]).max():.4g}]")
    for v in wall_vortices(Q, r.mesh)[:3]:
        print(f"  clockwise vortex: circulation {v.circulation:.4f}, "
              f"x in [{v.x_range[0]:.3f}, {v.x_range[1]:.3f}], top {v.top:.4f}")
    print(f"primary vortex height {primary_vortex_height(Q, r.mesh):.4f}")


if __name__ == "__main__":
    main()
