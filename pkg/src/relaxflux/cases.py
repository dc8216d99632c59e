"""Benchmark cases: meshes, boundary conditions, initial and exact data.

All initial/exact functions take arrays ``x, y`` (and ``t`` for exact
data) and return primitive states ``(rho, u, v, T)`` stacked on axis 0.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .grid import (BoundarySpec, Extrapolation, FixedState, NoSlipWall, Periodic,
                   Segment, SlipWall, StateBC, Symmetry)

GAMMA = 1.4
PR = 0.72


def _state(rho, u, v, p, shape):
    return np.stack([np.full(shape, rho, dtype=float), np.full(shape, u, dtype=float),
                     np.full(shape, v, dtype=float), np.full(shape, p / rho, dtype=float)])


def _rho_u_v_p(rho, u, v, p):
    return np.array([rho, u, v, p / rho], dtype=float)


@dataclass(frozen=True)
class CaseSpec:
    """Everything needed to run one benchmark.

    ``mesh`` maps a resolution ``N`` (or ``None`` for the default) to a
    :func:`grid.build_mesh` description.
    """
    name: str
    mesh: Callable[[Optional[int]], dict]
    bcs: BoundarySpec
    initial: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gamma: float = GAMMA
    Pr: float = PR
    mu: float = 0.0
    C_num: Optional[float] = None
    cfl: float = 0.4
    alpha: float = 1.3
    limiter: bool = True
    exact: Optional[Callable[[np.ndarray, np.ndarray, float], np.ndarray]] = None
    end_time: Optional[float] = None
    steady_tol: Optional[float] = None
    steady_field: str = "T"                 # "T" or "velocity"
    max_time: Optional[float] = None        # give up on steady runs after this time
    init_mode: str = "average"              # "average" (Gauss quadrature) or "point"
    error_fields: Tuple[str, ...] = ("rho",)
    error_mode: str = "average"
    outputs: Tuple[float, ...] = ()
    default_N: Optional[int] = None
    extra: Dict[str, object] = field(default_factory=dict)
    description: str = ""

    def with_overrides(self, **kw) -> "CaseSpec":
        return dataclasses.replace(self, **kw)

    def mesh_description(self, N=None) -> dict:
        return self.mesh(N if N is not None else self.default_N)

    @property
    def reynolds(self):
        return self.extra.get("Re")

    def viscosity_for(self, Re):
        """``mu`` giving Reynolds number ``Re`` (density 1 times ``Re_scale`` over mu)."""
        return self.extra.get("Re_scale", 1.0) / Re


# ----------------------------------------------------------------- inviscid

def advection_case() -> CaseSpec:
    def initial(x, y):
        return exact(x, y, 0.0)

    def exact(x, y, t):
        rho = 1.0 + 0.2 * np.sin(np.pi * (x - t))
        return np.stack([rho, np.ones_like(rho), np.zeros_like(rho), 1.0 / rho])

    return CaseSpec(
        name="advection",
        mesh=lambda N: {"extent": (0.0, 2.0, 0.0, 1.0), "n": (N, 1)},
        bcs=BoundarySpec.all(Periodic()),
        initial=initial, exact=exact, end_time=2.0, cfl=0.6, default_N=80,
        description="1-D density sine wave advected once around a periodic domain",
    )


def vortex_perturbation(x, y, gamma=GAMMA, strength=5.0):
    r2 = x * x + y * y
    amp = strength / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2))
    dT = -(gamma - 1.0) * strength ** 2 / (8.0 * gamma * np.pi ** 2) * np.exp(1.0 - r2)
    return -amp * y, amp * x, dT


def vortex_case(half_width=10.0) -> CaseSpec:
    L = 2.0 * half_width

    def exact(x, y, t):
        xs = np.mod(x - t + half_width, L) - half_width
        ys = np.mod(y - t + half_width, L) - half_width
        du, dv, dT = vortex_perturbation(xs, ys)
        T = 1.0 + dT
        rho = T ** (1.0 / (GAMMA - 1.0))
        return np.stack([rho, 1.0 + du, 1.0 + dv, T])

    return CaseSpec(
        name="vortex",
        mesh=lambda N: {"extent": (-half_width, half_width, -half_width, half_width), "n": (N, N)},
        bcs=BoundarySpec.all(Periodic()),
        initial=lambda x, y: exact(x, y, 0.0), exact=exact, end_time=20.0, default_N=80,
        description="isentropic vortex carried diagonally across a periodic square",
    )


RIEMANN_1 = {  # quadrants: (x > 0.5, y > 0.5) -> state
    (True, True): _rho_u_v_p(1.0, 0.6233, 0.6233, 1.5),
    (False, True): _rho_u_v_p(0.389, -0.6233, 0.6233, 0.4),
    (False, False): _rho_u_v_p(1.0, -0.6233, -0.6233, 1.5),
    (True, False): _rho_u_v_p(0.389, 0.6233, -0.6233, 0.4),
}
RIEMANN_2 = {
    (True, True): _rho_u_v_p(1.0, -0.75, -0.5, 0.75),
    (False, True): _rho_u_v_p(2.0, -0.75, 0.5, 0.75),
    (False, False): _rho_u_v_p(1.0, 0.75, 0.5, 0.75),
    (True, False): _rho_u_v_p(3.0, 0.75, -0.5, 0.75),
}


def _quadrants(states):
    def initial(x, y):
        out = np.empty((4,) + np.broadcast(x, y).shape)
        for (east, north), Q in states.items():
            mask = ((x > 0.5) == east) & ((y > 0.5) == north)
            out[:, mask] = Q[:, None]
        return out
    return initial


def riemann_case(which: int) -> CaseSpec:
    states, t_end = (RIEMANN_1, 0.2) if which == 1 else (RIEMANN_2, 0.25)
    return CaseSpec(
        name=f"riemann2d-{which}",
        mesh=lambda N: {"extent": (0.0, 1.0, 0.0, 1.0), "n": (N, N)},
        bcs=BoundarySpec.all(Extrapolation()),
        initial=_quadrants(states), end_time=t_end, default_N=300, init_mode="point",
        description="four-quadrant 2-D Riemann problem with outflow boundaries",
    )


def double_mach_states(mach=10.0, gamma=GAMMA):
    """Pre- and post-shock primitive states for a shock moving into (1.4, 0, 0, 1)."""
    rho1, p1 = gamma, 1.0
    c1 = np.sqrt(gamma * p1 / rho1)
    m2 = mach * mach
    rho2 = rho1 * (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0)
    p2 = p1 * (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0)
    speed = mach * c1
    un = speed * (1.0 - rho1 / rho2)
    angle = np.pi / 6.0       # post-shock velocity direction below the x-axis
    pre = _rho_u_v_p(rho1, 0.0, 0.0, p1)
    post = _rho_u_v_p(rho2, un * np.cos(angle), -un * np.sin(angle), p2)
    return pre, post, speed


def double_mach_case() -> CaseSpec:
    pre, post, speed = double_mach_states()
    x0 = 1.0 / 6.0
    slope = 1.0 / np.sqrt(3.0)
    horizontal = speed / np.sin(np.pi / 3.0)

    def shock_x(y, t):
        return x0 + y * slope + horizontal * t

    def field_at(x, y, t):
        behind = x < shock_x(y, t)
        return np.where(behind, post.reshape((4,) + (1,) * np.ndim(x)),
                        pre.reshape((4,) + (1,) * np.ndim(x)))

    bcs = BoundarySpec(
        left=FixedState(post),
        right=Extrapolation(),
        bottom=[Segment(0.0, x0, FixedState(post)), Segment(x0, 4.0, SlipWall())],
        top=StateBC(func=field_at, smooth=False),
    )
    return CaseSpec(
        name="double-mach",
        mesh=lambda N: {"extent": (0.0, 4.0, 0.0, 1.0), "n": (4 * N, N)},
        bcs=bcs, initial=lambda x, y: field_at(x, y, 0.0), end_time=0.2, default_N=120,
        init_mode="point", extra={"post_shock": post, "pre_shock": pre},
        description="Mach 10 shock reflecting off a wedge-like wall",
    )


# ------------------------------------------------------------------ viscous

def couette_case() -> CaseSpec:
    gamma, Pr = GAMMA, PR
    U = 0.1 * np.sqrt(gamma)
    Re = 100.0
    mu = U / Re
    Tb, T1 = 0.85, 1.0
    cp = gamma / (gamma - 1.0)

    def exact(x, y, t=0.0):
        y = np.broadcast_to(y, np.broadcast(x, y).shape)
        T = Tb + y * (T1 - Tb) + y * (1.0 - y) * Pr * U * U / (2.0 * cp)
        return np.stack([1.0 / T, U * y, np.zeros_like(T), T])

    def initial(x, y):
        Q = exact(x, y)
        bump = 1e-8 * np.sin(np.pi * y) * np.cos(np.pi * x)
        Q[1] = Q[1] + U * bump
        Q[3] = Q[3] + bump
        return Q

    bc = StateBC(func=lambda x, y, t: exact(x, y, t))
    return CaseSpec(
        name="couette",
        mesh=lambda N: {"extent": (0.0, 2.0, 0.0, 1.0), "n": (2 * N, N)},
        bcs=BoundarySpec.all(bc), initial=initial, exact=exact, mu=mu,
        steady_tol=1e-12, steady_field="T", max_time=2000.0, init_mode="point",
        error_fields=("u", "T"), error_mode="point", default_N=20,
        extra={"U": U, "Re": Re, "Re_scale": U, "T_bottom": Tb, "T_top": T1},
        description="plane Couette flow with heated walls, run to steady state",
    )


def boundary_layer_case() -> CaseSpec:
    gamma = GAMMA
    u_inf, L, Re = 0.15, 100.0, 1e5
    mu = u_inf * L / Re
    h_min = 0.04442
    free = _rho_u_v_p(1.0, u_inf, 0.0, 1.0 / gamma)

    def mesh(N=None):
        return {"x_segments": [(-20.0, 0.0, 34, h_min, "end"), (0.0, 100.0, 52, h_min, "start")],
                "y_segments": [(0.0, 40.0, 43, h_min, "start")]}

    bcs = BoundarySpec(
        left=FixedState(free),
        right=Extrapolation(),
        bottom=[Segment(-20.0, 0.0, Symmetry()), Segment(0.0, 100.0, NoSlipWall())],
        top=Extrapolation(),
    )
    return CaseSpec(
        name="boundary-layer", mesh=mesh, bcs=bcs,
        initial=lambda x, y: _state(1.0, u_inf, 0.0, 1.0 / gamma, np.shape(x)),
        mu=mu, steady_tol=8e-8, steady_field="velocity", max_time=1e5, init_mode="point",
        extra={"u_inf": u_inf, "L": L, "Re": Re, "Re_scale": u_inf * L},
        description="laminar flat-plate boundary layer at Ma 0.15, Re 1e5",
    )


def cavity_case(Re=1000.0) -> CaseSpec:
    gamma = GAMMA
    U = 1.0
    Tb = U * U / (gamma * 0.15 ** 2)
    mu = U / Re
    wall = NoSlipWall(temperature=Tb)
    lid = NoSlipWall(velocity=U, temperature=Tb)
    return CaseSpec(
        name=f"cavity-{int(Re)}",
        mesh=lambda N: {"extent": (0.0, 1.0, 0.0, 1.0), "n": (N, N)},
        bcs=BoundarySpec(wall, wall, wall, lid),
        initial=lambda x, y: _state(1.0, 0.0, 0.0, Tb, np.shape(x)),
        mu=mu, end_time=150.0, default_N=97, init_mode="point",
        extra={"U": U, "T_wall": Tb, "Re": Re, "Mach": U / np.sqrt(gamma * Tb)},
        description="lid-driven cavity at Ma 0.15",
    )


def shock_tube_case(Re=200.0) -> CaseSpec:
    gamma = GAMMA
    mu = 1.0 / Re
    left = _rho_u_v_p(120.0, 0.0, 0.0, 120.0 / gamma)
    right = _rho_u_v_p(1.2, 0.0, 0.0, 1.2 / gamma)

    def initial(x, y):
        shape = (4,) + (1,) * np.ndim(x)
        return np.where(np.asarray(x) < 0.5, left.reshape(shape), right.reshape(shape))

    wall = NoSlipWall()
    return CaseSpec(
        name="vst" if Re == 200.0 else f"vst-{int(Re)}",
        mesh=lambda N: {"extent": (0.0, 1.0, 0.0, 0.5), "n": (2 * N, N)},
        bcs=BoundarySpec(wall, wall, wall, Symmetry()),
        initial=initial, mu=mu, end_time=1.0, default_N=250, init_mode="point",
        extra={"Re": Re, "left": left, "right": right},
        description="viscous shock tube: reflected shock meets the wall boundary layer",
    )


def register_cases() -> Dict[str, CaseSpec]:
    cases = [advection_case(), vortex_case(), riemann_case(1), riemann_case(2),
             double_mach_case(), couette_case(), boundary_layer_case(),
             cavity_case(400.0), cavity_case(1000.0), cavity_case(3200.0),
             shock_tube_case(200.0), shock_tube_case(1000.0)]
    return {c.name: c for c in cases}
