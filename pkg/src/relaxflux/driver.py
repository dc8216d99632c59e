"""Time stepping, error measurement and convergence tables."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import physics
from .cases import CaseSpec
from .grid import Mesh, build_mesh
from .implicit import RFSSolver, SolverConfig
from .physics import TransportCoefficients

log = logging.getLogger(__name__)

FIELDS = {"rho": 0, "u": 1, "v": 2, "T": 3}
GAUSS_POINTS = 3


def compute_dt(Q, mesh: Mesh, lambda_cfl, gamma=1.4):
    """``lambda * min(h) / max(|u| + |v| + c)`` over interior primitive cells ``Q``."""
    speed = np.abs(Q[1]) + np.abs(Q[2]) + physics.sound_speed(Q, gamma)
    return float(lambda_cfl * mesh.hmin / np.max(speed))


def error_norms(field, exact, mesh: Mesh):
    """Area-weighted mean absolute error and max error over cells."""
    e = np.abs(np.asarray(field) - np.asarray(exact))
    total = mesh.area.sum()
    return float(np.sum(e * mesh.area) / total), float(e.max())


def convergence_order(errors: Sequence[float], Ns: Sequence[int]) -> List[float]:
    errors = np.asarray(errors, dtype=float)
    Ns = np.asarray(Ns, dtype=float)
    if errors.shape != Ns.shape:
        raise ValueError("errors and Ns must have matching lengths")
    if np.any(errors <= 0):
        raise ValueError("errors must be positive to define an order")
    return list(np.log(errors[:-1] / errors[1:]) / np.log(Ns[1:] / Ns[:-1]))


def cell_averages(func: Callable, mesh: Mesh, npts=GAUSS_POINTS, gamma=1.4, conserved=True):
    """Tensor Gauss-Legendre averages of ``func(x, y)`` (primitive) over every cell.

    With ``conserved=True`` the averaged quantity is the conserved state,
    which is what the finite-volume unknowns represent.
    """
    g, w = np.polynomial.legendre.leggauss(npts)
    x0, x1 = mesh.x_faces[:-1], mesh.x_faces[1:]
    y0, y1 = mesh.y_faces[:-1], mesh.y_faces[1:]
    acc = 0.0
    for gi, wi in zip(g, w):
        xs = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gi
        for gj, wj in zip(g, w):
            ys = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gj
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            Q = func(X, Y)
            val = physics.conserved_from_primitive(Q, gamma) if conserved else Q
            acc = acc + 0.25 * wi * wj * val
    return acc


def initial_state(case: CaseSpec, mesh: Mesh):
    """Conserved initial averages (or point values) for ``case`` on ``mesh``."""
    if case.init_mode == "average":
        return cell_averages(case.initial, mesh, gamma=case.gamma)
    X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
    return physics.conserved_from_primitive(case.initial(X, Y), case.gamma)


def exact_reference(case: CaseSpec, mesh: Mesh, t):
    """Exact primitive fields matched to how errors are measured for ``case``.

    Density errors compare against exact cell averages; primitive
    velocity/temperature in point mode compare against center values.
    """
    if case.error_mode == "average":
        U = cell_averages(lambda x, y: case.exact(x, y, t), mesh, gamma=case.gamma)
        return physics.primitive_from_conserved(U, case.gamma)
    X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
    return case.exact(X, Y, t)


def solver_config(case: CaseSpec, **overrides) -> SolverConfig:
    cfg = SolverConfig(alpha=case.alpha, limiter=case.limiter, C_num=case.C_num)
    for k, v in overrides.items():
        if not hasattr(cfg, k):
            raise TypeError(f"unknown solver option {k!r}")
        setattr(cfg, k, v)
    return cfg


@dataclass
class RunReport:
    case: str
    N: Optional[int]
    mesh: Mesh
    t: float
    U: np.ndarray
    snapshots: Dict[float, np.ndarray] = field(default_factory=dict)
    errors: Dict[str, tuple] = field(default_factory=dict)
    steps: int = 0
    jacobi_sweeps: int = 0
    flagged_faces: int = 0
    wall_time: float = 0.0
    steady: Optional[bool] = None
    residual: Optional[float] = None
    aborted: Optional[str] = None

    @property
    def primitive(self):
        return physics.primitive_from_conserved(self.U, check=False)


def _residual(Q_old, Q_new, which):
    if which == "T":
        d = Q_new[3] - Q_old[3]
    else:
        d = np.sqrt((Q_new[1] - Q_old[1]) ** 2 + (Q_new[2] - Q_old[2]) ** 2)
    return float(np.sqrt(np.mean(d * d)))


def advance(case: CaseSpec, N=None, end_time=None, solver_options=None,
            progress: Callable = None, max_steps=None) -> RunReport:
    """Run ``case`` at resolution ``N`` to its end time or steady state.

    Errors inside a step propagate after the partial report is attached
    to the exception as ``exc.report``.
    """
    mesh = build_mesh(case.mesh_description(N))
    coeffs = TransportCoefficients(mu=case.mu, gamma=case.gamma, Pr=case.Pr)
    solver = RFSSolver(mesh, case.bcs, coeffs, solver_config(case, **(solver_options or {})))
    U = initial_state(case, mesh)
    t_end = end_time if end_time is not None else case.end_time
    if t_end is None:
        t_end = case.max_time if case.max_time is not None else np.inf
    report = RunReport(case=case.name, N=N, mesh=mesh, t=0.0, U=U)
    pending = sorted(x for x in case.outputs if x <= t_end)
    start = time.perf_counter()
    t = 0.0
    steps = 0
    try:
        while t < t_end * (1 - 1e-14):
            if max_steps is not None and steps >= max_steps:
                break
            Q = physics.primitive_from_conserved(U, case.gamma)
            dt = compute_dt(Q, mesh, case.cfl, case.gamma)
            if pending:
                dt = min(dt, pending[0] - t)
            dt = min(dt, t_end - t)
            U_new, ws = solver.step(U, t, dt)
            steps += 1
            if ws is not None:
                report.jacobi_sweeps += sum(ws.iterations.values())
                report.flagged_faces += ws.flagged
            if case.steady_tol is not None:
                Q_new = physics.primitive_from_conserved(U_new, case.gamma)
                report.residual = _residual(Q, Q_new, case.steady_field)
            U = U_new
            t += dt
            if pending and t >= pending[0] * (1 - 1e-14):
                report.snapshots[pending.pop(0)] = U.copy()
            if progress is not None:
                progress(steps, t, dt, report.residual)
            if case.steady_tol is not None and report.residual < case.steady_tol:
                report.steady = True
                break
    except Exception as exc:
        report.aborted = f"step {steps + 1}, t={t:.6g}: {exc}"
        report.U, report.t, report.steps = U, t, steps
        report.wall_time = time.perf_counter() - start
        exc.report = report
        raise
    if case.steady_tol is not None and report.steady is None:
        report.steady = False
    report.U, report.t, report.steps = U, t, steps
    report.wall_time = time.perf_counter() - start
    if case.exact is not None:
        exact = exact_reference(case, mesh, t)
        Q = physics.primitive_from_conserved(U, case.gamma)
        for name in case.error_fields:
            k = FIELDS[name]
            report.errors[name] = error_norms(Q[k], exact[k], mesh)
    log.info("%s N=%s: %d steps to t=%.6g in %.1fs", case.name, N, steps, t, report.wall_time)
    return report


@dataclass
class TableRow:
    N: int
    L1: float
    L1_order: Optional[float]
    Linf: float
    Linf_order: Optional[float]


def convergence_table(case: CaseSpec, Ns: Sequence[int], field_name=None,
                      solver_options=None, reports=None) -> List[TableRow]:
    """Run ``case`` on each resolution and tabulate errors and orders."""
    field_name = field_name or case.error_fields[0]
    if reports is None:
        reports = [advance(case, N, solver_options=solver_options) for N in Ns]
    l1 = [r.errors[field_name][0] for r in reports]
    linf = [r.errors[field_name][1] for r in reports]
    o1 = [None] + convergence_order(l1, Ns)
    oinf = [None] + convergence_order(linf, Ns)
    return [TableRow(N, a, b, c, d) for N, a, b, c, d in zip(Ns, l1, o1, linf, oinf)]


def format_table(rows: Sequence[TableRow]) -> str:
    lines = [f"{'N':>6}  {'L1 error':>10}  {'order':>6}  {'Linf error':>10}  {'order':>6}"]
    for r in rows:
        o1 = "" if r.L1_order is None else f"{r.L1_order:.3f}"
        oi = "" if r.Linf_order is None else f"{r.Linf_order:.3f}"
        lines.append(f"{r.N:>6}  {r.L1:>10.3e}  {o1:>6}  {r.Linf:>10.3e}  {oi:>6}")
    return "\n".join(lines)
