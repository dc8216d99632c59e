"""Flat-plate boundary layer against the Blasius profile.

Runs to the steady-state threshold (long) or a fixed time, then samples
u/u_inf and v sqrt(Re_x)/u_inf at x = 25 and x = 75 in similarity variables.

    python3 scripts/boundary_layer.py --end-time 2000
"""
import argparse

import numpy as np

from relaxflux.blasius import blasius_profile, similarity_coordinates
from relaxflux.cases import register_cases
from relaxflux.driver import advance


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--end-time", type=float, default=None,
                   help="stop at this time instead of waiting for steady state")
    p.add_argument("--stations", default="25,75")
    args = p.parse_args()

    case = register_cases()["boundary-layer"]
    r = advance(case, end_time=args.end_time, progress=None)
    print(f"t={r.t:.1f}, {r.steps} steps, steady={r.steady}, residual={r.residual}")
    u_inf, mu = case.extra["u_inf"], case.mu
    prof = blasius_profile()
    Q = r.primitive
    for x0 in (float(s) for s in args.stations.split(",")):
        i = int(np.argmin(np.abs(r.mesh.xc - x0)))
        eta, re_x = similarity_coordinates(r.mesh.xc[i], r.mesh.yc, u_inf, mu)
        u = Q[1, i] / u_inf
        v = Q[2, i] / u_inf * np.sqrt(re_x)
        ub, vb = prof.velocity_at(eta)
        keep = eta < 8
        print(f"x={r.mesh.xc[i]:.2f}: max |u - u_B| = {np.abs(u - ub)[keep].max():.3e}, "
              f"max |v - v_B| = {np.abs(v - vb)[keep].max():.3e}")
        for e, a, b in zip(eta[keep][::3], u[keep][::3], ub[keep][::3]):
            print(f"   eta {e:6.3f}   u {a:.4f}   blasius {b:.4f}")


if __name__ == "__main__":
    main()
