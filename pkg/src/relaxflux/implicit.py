"""Linear systems for the new velocities and temperature, and the full step.

One time step:

1. reconstruct primitive variables (limited slopes, ghosts filled);
2. solve the relaxation GRP on every x- and y-face;
3. form the GRP cell slopes at ``t^{n+1}`` from the face predictors;
4. update density explicitly;
5. assemble and solve 5-point systems for ``u``, then ``v``, then ``T``;
6. rebuild the conserved averages.

In inviscid mode steps 5-6 collapse into an explicit conservative update.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import physics, recon, rfs
from .grid import G, SIDES, BoundarySpec, Mesh, StateBC, fill_ghosts, pad
from .physics import InadmissibleStateError, TransportCoefficients

log = logging.getLogger(__name__)


class JacobiDivergence(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last update {residual:.3e})")
        self.residual = residual


class TooManyFlaggedFaces(RuntimeError):
    pass


@dataclass
class SolverConfig:
    alpha: float = 1.3
    limiter: bool = True
    C_num: Optional[float] = None          # None: 1 for viscous, 5 for inviscid runs
    eps0: float = rfs.EPS0
    jacobi_tol: float = 1e-12
    jacobi_max_iters: int = 10_000
    predictor_variant: str = rfs.CHARACTERISTIC
    energy_rhs: str = "conservative"       # or "printed"
    max_flagged_fraction: float = 1e-3

    def c_num(self, coeffs: TransportCoefficients) -> float:
        if self.C_num is not None:
            return self.C_num
        return 5.0 if coeffs.inviscid else 1.0


# ----------------------------------------------------------------- systems

@dataclass
class StencilSystem:
    """``diag x_ij - cW x_{i-1,j} - cE x_{i+1,j} - cS x_{i,j-1} - cN x_{i,j+1} = rhs``.

    Neighbour coefficients are stored as non-negative magnitudes; the
    matrix entries are their negatives. Cell ``(i, j)`` maps to unknown
    ``k = i * ny + j``.
    """
    diag: np.ndarray
    west: np.ndarray
    east: np.ndarray
    south: np.ndarray
    north: np.ndarray
    rhs: np.ndarray

    @property
    def shape(self):
        return self.diag.shape

    def dominance_margin(self):
        return self.diag - (np.abs(self.west) + np.abs(self.east)
                            + np.abs(self.south) + np.abs(self.north))

    def is_strictly_dominant(self) -> bool:
        return bool(np.all(self.dominance_margin() > 0))

    def to_dense(self, ghosts: "GhostMap" = None):
        """Dense matrix/rhs with ghost relations folded in (for small oracle checks)."""
        nx, ny = self.shape
        n = nx * ny
        M = np.zeros((n, n))
        b = self.rhs.ravel().copy()
        k = np.arange(n).reshape(nx, ny)
        M[k, k] += self.diag
        gm = {}
        if ghosts is not None:
            for pi, pj, src, sgn, off in zip(*ghosts.arrays()):
                gm[(pi, pj)] = (src, sgn, off)
        shifts = ((-1, 0, self.west), (1, 0, self.east), (0, -1, self.south), (0, 1, self.north))
        for di, dj, c in shifts:
            for i in range(nx):
                for j in range(ny):
                    ii, jj = i + di, j + dj
                    coef = c[i, j]
                    if 0 <= ii < nx and 0 <= jj < ny:
                        M[k[i, j], k[ii, jj]] -= coef
                    elif (ii + 1, jj + 1) in gm:
                        src, sgn, off = gm[(ii + 1, jj + 1)]
                        if sgn != 0:
                            M[k[i, j], src] -= coef * sgn
                        b[k[i, j]] += coef * off
        return M, b


@dataclass
class GhostMap:
    """Affine map from interior unknowns to the first ghost ring.

    ``x_ghost = sign * x_interior.flat[src] + offset`` at padded (ring-1)
    positions ``(pi, pj)`` of an ``(nx + 2, ny + 2)`` array.
    """
    pi: np.ndarray
    pj: np.ndarray
    src: np.ndarray
    sign: np.ndarray
    offset: np.ndarray

    def arrays(self):
        return self.pi, self.pj, self.src, self.sign, self.offset

    def apply(self, xp):
        inner = xp[1:-1, 1:-1]
        xp[self.pi, self.pj] = self.sign * inner.ravel()[self.src] + self.offset
        return xp


def _ring_positions(nx, ny):
    ring = np.zeros((nx + 2, ny + 2), dtype=bool)
    ring[0, 1:-1] = ring[-1, 1:-1] = True
    ring[1:-1, 0] = ring[1:-1, -1] = True
    return np.nonzero(ring)


def ghost_maps(bcs: BoundarySpec, mesh: Mesh, t, comps=(1, 2, 3)) -> Dict[int, GhostMap]:
    """Linearise the boundary treatment of each primitive component in ``comps``.

    Two ghost fills suffice: one with zero interior (offsets) and one with
    interior values ``1 + flat index`` (source cell and sign). This relies
    on every boundary condition acting componentwise.
    """
    nx, ny = mesh.shape
    P0 = np.zeros((4, nx + 2 * G, ny + 2 * G))
    P1 = P0.copy()
    for c in comps:
        P1[c, G:-G, G:-G] = 1.0 + np.arange(nx * ny).reshape(nx, ny)
    fill_ghosts(P0, bcs, mesh, t)
    fill_ghosts(P1, bcs, mesh, t)
    pi, pj = _ring_positions(nx, ny)
    out = {}
    for c in comps:
        d = P1[c, pi + G - 1, pj + G - 1] - P0[c, pi + G - 1, pj + G - 1]
        sign = np.sign(d)
        src = np.where(sign != 0, np.abs(d).round().astype(int) - 1, 0)
        out[c] = GhostMap(pi, pj, src, sign, P0[c, pi + G - 1, pj + G - 1])
    return out


def ghost_map(bcs: BoundarySpec, mesh: Mesh, t, comp) -> GhostMap:
    return ghost_maps(bcs, mesh, t, (comp,))[comp]


def refresh_offsets(maps: Dict[int, GhostMap], bcs: BoundarySpec, mesh: Mesh, t):
    """Re-evaluate the time-dependent offsets of cached ghost maps."""
    nx, ny = mesh.shape
    P0 = fill_ghosts(np.zeros((4, nx + 2 * G, ny + 2 * G)), bcs, mesh, t)
    for c, gm in maps.items():
        gm.offset = P0[c, gm.pi + G - 1, gm.pj + G - 1]
    return maps


def jacobi_solve(system: StencilSystem, ghosts: GhostMap = None, x0=None,
                 tol=1e-12, max_iters=10_000):
    """Jacobi iteration with double buffering.

    Stops when the max-norm of the update is at most ``tol * max(1, |x|_inf)``.
    Returns ``(x, iterations)``; raises :class:`JacobiDivergence` when
    ``max_iters`` is exhausted.
    """
    nx, ny = system.shape
    xp = np.zeros((nx + 2, ny + 2))
    xp[1:-1, 1:-1] = system.rhs / system.diag if x0 is None else x0
    inv = 1.0 / system.diag
    cW, cE, cS, cN, b = system.west, system.east, system.south, system.north, system.rhs
    upd = np.inf
    for it in range(1, max_iters + 1):
        if ghosts is not None:
            ghosts.apply(xp)
        new = (b + cW * xp[:-2, 1:-1] + cE * xp[2:, 1:-1]
               + cS * xp[1:-1, :-2] + cN * xp[1:-1, 2:]) * inv
        upd = np.max(np.abs(new - xp[1:-1, 1:-1]))
        xp[1:-1, 1:-1] = new
        if upd <= tol * max(1.0, np.max(np.abs(new))):
            return new, it
    raise JacobiDivergence(f"Jacobi did not converge in {max_iters} sweeps", upd)


def _divergence(Fx, Fy, mesh: Mesh):
    return ((Fx[..., 1:, :] - Fx[..., :-1, :]) / mesh.dx[:, None]
            + (Fy[..., :, 1:] - Fy[..., :, :-1]) / mesh.dy[None, :])


def assemble_system(mass, wx, wy, rhs, mesh: Mesh, dt) -> StencilSystem:
    """5-point system from face weights ``w`` (flux = -w * jump)."""
    dx = mesh.dx[:, None]
    dy = mesh.dy[None, :]
    cW = dt * wx[:-1, :] / dx
    cE = dt * wx[1:, :] / dx
    cS = dt * wy[:, :-1] / dy
    cN = dt * wy[:, 1:] / dy
    diag = mass + cW + cE + cS + cN
    return StencilSystem(diag, cW, cE, cS, cN, rhs)


# ---------------------------------------------------------------- workspace

@dataclass
class StepWorkspace:
    t: float
    dt: float
    gamma: float
    U: np.ndarray                    # conserved averages at t^n (interior)
    Q: np.ndarray                    # padded primitive centers at t^n
    slopes: tuple                    # padded limited slopes (x, y) at t^n
    rec_x: rfs.FaceRecord
    rec_y: rfs.FaceRecord            # frame coordinates
    grp_slopes: tuple                # padded GRP slopes (x, y) at t^{n+1}
    flux_x: np.ndarray = None        # explicit flux, original row order
    flux_y: np.ndarray = None
    hooks_x: rfs.ImplicitHooks = None
    hooks_y: rfs.ImplicitHooks = None
    rho_new: np.ndarray = None
    u_new: np.ndarray = None
    v_new: np.ndarray = None
    T_new: np.ndarray = None
    energy_x: np.ndarray = None      # viscous energy flux pieces after velocity solve
    energy_y: np.ndarray = None
    iterations: Dict[str, int] = field(default_factory=dict)
    flagged: int = 0
    terms: Dict[str, np.ndarray] = field(default_factory=dict)


def _face_inputs(P, S_normal, S_tang, mesh, axis):
    QL, QR = recon.face_traces(P, S_normal, mesh, axis)
    gLn, gRn = recon.face_neighbors(S_normal, mesh, axis)
    gLt, gRt = recon.face_neighbors(S_tang, mesh, axis)
    dface = mesh.dx_face[:, None] if axis == 0 else mesh.dy_face[None, :]
    f = rfs.to_frame
    return rfs.FaceInput(f(QL, axis), f(QR, axis), f(gLn, axis), f(gLt, axis),
                         f(gRn, axis), f(gRt, axis), dface)


def _neighbor_sizes(mesh, axis):
    if axis == 0:
        d = mesh.dx_padded
        n = mesh.nx
        return d[G - 1:G + n][:, None], d[G:G + n + 1][:, None], mesh.dx_face[:, None]
    d = mesh.dy_padded
    n = mesh.ny
    return d[G - 1:G + n][None, :], d[G:G + n + 1][None, :], mesh.dy_face[None, :]


class RFSSolver:
    """Finite-volume solver advancing conserved averages with the RFS flux.

    Keeps the GRP slopes of the last step, which feed the middle argument
    of the minmod limiter at the next reconstruction.
    """

    def __init__(self, mesh: Mesh, bcs: BoundarySpec, coeffs: TransportCoefficients,
                 config: SolverConfig = None):
        self.mesh = mesh
        self.bcs = bcs
        self.coeffs = coeffs
        self.config = config or SolverConfig()
        self.prev_slopes = None
        self._maps = None
        self._time_dependent = any(isinstance(seg.bc, StateBC) for side in SIDES
                                   for seg in bcs.segments(side))
        bcs.validate(mesh)

    def reset(self):
        self.prev_slopes = None

    def _ghost_maps(self, t):
        if self._maps is None:
            self._maps = ghost_maps(self.bcs, self.mesh, t)
        elif self._time_dependent:
            refresh_offsets(self._maps, self.bcs, self.mesh, t)
        return self._maps

    # -- steps 1-3
    def prepare(self, U, t, dt) -> StepWorkspace:
        mesh, bcs, cfg, coeffs = self.mesh, self.bcs, self.config, self.coeffs
        gamma = coeffs.gamma
        Q = physics.primitive_from_conserved(U, gamma)
        P = fill_ghosts(pad(Q), bcs, mesh, t)

        S = []
        for axis, kind in ((0, "slope_x"), (1, "slope_y")):
            if cfg.limiter:
                mid = None if self.prev_slopes is None else self.prev_slopes[axis]
                s = recon.limited_slopes(P, mesh, axis, cfg.alpha, mid)
            else:
                s = recon.central_slopes(P, mesh, axis)
            S.append(fill_ghosts(pad(s), bcs, mesh, t, kind))
        Sx, Sy = S

        c_num = cfg.c_num(coeffs)
        rec_x = rfs.solve_faces(_face_inputs(P, Sx, Sy, mesh, 0), dt, coeffs, c_num,
                                cfg.eps0, cfg.predictor_variant)
        rec_y = rfs.solve_faces(_face_inputs(P, Sy, Sx, mesh, 1), dt, coeffs, c_num,
                                cfg.eps0, cfg.predictor_variant)
        flagged = int(rec_x.flagged.sum() + rec_y.flagged.sum())
        nfaces = rec_x.flagged.size + rec_y.flagged.size
        if flagged:
            log.debug("t=%.6g: %d predictor states replaced by star states", t, flagged)
        if flagged > cfg.max_flagged_fraction * nfaces:
            idx = np.argwhere(rec_x.flagged)
            where = f"x-face {tuple(idx[0])}" if idx.size else \
                f"y-face {tuple(np.argwhere(rec_y.flagged)[0])}"
            raise TooManyFlaggedFaces(
                f"t={t:.6g}: {flagged}/{nfaces} inadmissible predictor states (first at {where})")

        Qpx = rec_x.Q_pred
        Qpy = rfs.to_frame(rec_y.Q_pred, 1)
        sx = recon.grp_cell_slopes(Qpx, mesh.dx, 0)
        sy = recon.grp_cell_slopes(Qpy, mesh.dy, 1)
        self._next_slopes = (sx, sy)
        grp = (fill_ghosts(pad(sx), bcs, mesh, t + dt, "slope_x"),
               fill_ghosts(pad(sy), bcs, mesh, t + dt, "slope_y"))
        return StepWorkspace(t=t, dt=dt, gamma=gamma, U=U, Q=P, slopes=(Sx, Sy), rec_x=rec_x,
                             rec_y=rec_y, grp_slopes=grp, flagged=flagged)

    # -- steps 4-8
    def step(self, U, t, dt, keep_terms=False):
        """Advance ``U`` by ``dt``; returns ``(U_new, workspace)``."""
        if dt == 0:
            return U.copy(), None
        ws = self.prepare(U, t, dt)
        mesh, coeffs = self.mesh, self.coeffs
        if coeffs.inviscid:
            Fx = ws.rec_x.base_flux
            Fy = rfs.to_frame(ws.rec_y.base_flux, 1)
            ws.flux_x, ws.flux_y = Fx, Fy
            U_new = U - dt * _divergence(Fx, Fy, mesh)
            if keep_terms:
                ws.terms = flux_terms(ws, mesh)
            self._check(U_new, t + dt)
            self.prev_slopes = self._next_slopes
            return U_new, ws

        explicit_fluxes(ws, mesh)
        ws.rho_new = update_density(ws, mesh, dt)
        self._check_density(ws.rho_new, t + dt)
        tol, nmax = self.config.jacobi_tol, self.config.jacobi_max_iters
        t1 = t + dt
        gm = self._ghost_maps(t1)
        Q0 = ws.Q[:, G:-G, G:-G]

        sys_u = assemble_momentum_system(ws, 0, mesh, dt)
        ws.u_new, ws.iterations["u"] = jacobi_solve(sys_u, gm[1], Q0[1], tol, nmax)
        sys_v = assemble_momentum_system(ws, 1, mesh, dt)
        ws.v_new, ws.iterations["v"] = jacobi_solve(sys_v, gm[2], Q0[2], tol, nmax)
        sys_T = assemble_temperature_system(ws, mesh, dt, ws.u_new, ws.v_new,
                                            gm[1], gm[2], self.config.energy_rhs)
        ws.T_new, ws.iterations["T"] = jacobi_solve(sys_T, gm[3], Q0[3], tol, nmax)

        Q_new = np.stack([ws.rho_new, ws.u_new, ws.v_new, ws.T_new])
        self._check(Q_new, t1, primitive=True)
        U_new = physics.conserved_from_primitive(Q_new, coeffs.gamma)
        if keep_terms:
            ws.terms = flux_terms(ws, mesh)
        self.prev_slopes = self._next_slopes
        return U_new, ws

    def _check_density(self, rho, t):
        bad = ~(rho > 0)
        if np.any(bad):
            raise InadmissibleStateError(f"non-positive density at t={t:.6g}",
                                         tuple(int(k) for k in np.argwhere(bad)[0]))

    def _check(self, X, t, primitive=False):
        if primitive:
            bad = ~((X[0] > 0) & (X[3] > 0))
        else:
            bad = ~(X[0] > 0)
            if not np.any(bad):
                e = X[3] - 0.5 * (X[1] ** 2 + X[2] ** 2) / X[0]
                bad = ~(e > 0)
        if np.any(bad):
            raise InadmissibleStateError(f"inadmissible state at t={t:.6g}",
                                         tuple(int(k) for k in np.argwhere(bad)[0]))


def explicit_fluxes(ws: StepWorkspace, mesh: Mesh):
    """Explicit parts of the midpoint fluxes plus implicit weights (viscous mode)."""
    sgx, sgy = ws.grp_slopes
    out = []
    for axis, rec in ((0, ws.rec_x), (1, ws.rec_y)):
        normal, tang = (sgx, sgy) if axis == 0 else (sgy, sgx)
        sL, sR = recon.face_neighbors(normal, mesh, axis)
        tL, tR = recon.face_neighbors(tang, mesh, axis)
        f = rfs.to_frame
        dL, dR, dface = _neighbor_sizes(mesh, axis)
        flux, hooks = rfs.explicit_midpoint_flux(rec, f(sL, axis), f(sR, axis),
                                                 f(tL, axis), f(tR, axis), dL, dR, dface)
        out.append((f(flux, axis), hooks))
    (ws.flux_x, ws.hooks_x), (ws.flux_y, ws.hooks_y) = out
    return ws


def update_density(ws: StepWorkspace, mesh: Mesh, dt):
    """Explicit mass update; the viscous flux has no mass component."""
    Fx = ws.flux_x if ws.flux_x is not None else ws.rec_x.base_flux
    Fy = ws.flux_y if ws.flux_y is not None else rfs.to_frame(ws.rec_y.base_flux, 1)
    return ws.U[0] - dt * _divergence(Fx[0], Fy[0], mesh)


def assemble_momentum_system(ws: StepWorkspace, axis, mesh: Mesh, dt) -> StencilSystem:
    """System for ``u`` (axis 0) or ``v`` (axis 1) at ``t^{n+1}``.

    Normal-stress faces carry the 4/3 factor: x-faces for ``u``, y-faces
    for ``v``.
    """
    row = 1 + axis
    if axis == 0:
        wx, wy = ws.hooks_x.w_n, ws.hooks_y.w_t
    else:
        wx, wy = ws.hooks_x.w_t, ws.hooks_y.w_n
    rhs = ws.U[row] - dt * _divergence(ws.flux_x[row], ws.flux_y[row], mesh)
    system = assemble_system(ws.rho_new, wx, wy, rhs, mesh, dt)
    assert system.is_strictly_dominant(), "momentum system lost diagonal dominance"
    return system


def _face_jumps(x, gmap: GhostMap, mesh):
    nx, ny = mesh.shape
    xp = np.zeros((nx + 2, ny + 2))
    xp[1:-1, 1:-1] = x
    gmap.apply(xp)
    jx = xp[1:, 1:-1] - xp[:-1, 1:-1]
    jy = xp[1:-1, 1:] - xp[1:-1, :-1]
    return jx, jy


def energy_fluxes(ws: StepWorkspace, mesh: Mesh, u_new, v_new, gmap_u, gmap_v):
    """Viscous work and explicit conduction flux at ``t^{n+1}`` on x- and y-faces."""
    jux, juy = _face_jumps(u_new, gmap_u, mesh)
    jvx, jvy = _face_jumps(v_new, gmap_v, mesh)
    ex = rfs.energy_viscous_flux(ws.rec_x, ws.hooks_x, jux, jvx, mesh.dx_face[:, None])
    ey = rfs.energy_viscous_flux(ws.rec_y, ws.hooks_y, jvy, juy, mesh.dy_face[None, :])
    return ex, ey


def assemble_temperature_system(ws: StepWorkspace, mesh: Mesh, dt, u_new, v_new,
                                gmap_u: GhostMap, gmap_v: GhostMap,
                                energy_rhs="conservative") -> StencilSystem:
    """System for ``T`` once the new velocities are known.

    With ``energy_rhs="conservative"`` the right-hand side carries the
    kinetic-energy exchange so the update matches the conservative energy
    equation; ``"printed"`` uses ``rho^n T^n / (gamma - 1)`` alone.
    """
    gamma = ws.gamma
    ws.energy_x, ws.energy_y = energy_fluxes(ws, mesh, u_new, v_new, gmap_u, gmap_v)
    Fx = ws.flux_x[3] + ws.energy_x
    Fy = ws.flux_y[3] + ws.energy_y
    div = _divergence(Fx, Fy, mesh)
    rho0 = ws.U[0]
    if energy_rhs == "conservative":
        start = ws.U[3] - 0.5 * ws.rho_new * (u_new ** 2 + v_new ** 2)
    elif energy_rhs == "printed":
        start = rho0 * ws.Q[3, G:-G, G:-G] / (gamma - 1.0)
    else:
        raise ValueError(f"unknown energy_rhs {energy_rhs!r}")
    rhs = start - dt * div
    system = assemble_system(ws.rho_new / (gamma - 1.0), ws.hooks_x.w_T, ws.hooks_y.w_T,
                             rhs, mesh, dt)
    assert system.is_strictly_dominant(), "temperature system lost diagonal dominance"
    return system


def flux_terms(ws: StepWorkspace, mesh: Mesh):
    """Split ``-div(flux)`` into the six explicit groups, per cell and row.

    1: relaxed star flux, 2: star-gradient correction, 3: equilibrium flux
    at t^n, 4: convective flux of the predictor, 5: tangential and work
    terms of the t^{n+1} viscous flux, 6: slope corrections of its normal
    gradient. Their sum times ``dt`` plus ``U^n`` is the right-hand side of
    the momentum systems.
    """
    pieces = {}
    for axis, rec, hooks in ((0, ws.rec_x, ws.hooks_x), (1, ws.rec_y, ws.hooks_y)):
        w = rec.omega
        dt = ws.dt
        p = {
            1: (1.0 - w) * rec.v_star,
            2: -(1.0 - w) * 0.5 * rec.a ** 2 * dt * rec.ux_star,
            3: 0.5 * w * rec.H_n,
            4: 0.5 * w * physics.convective_flux(rec.Q_pred, 0, ws.gamma),
        }
        p5 = np.zeros_like(rec.v_star)
        p6 = np.zeros_like(rec.v_star)
        if hooks is not None:
            mu = rec.mu_pred
            p5[1] = 0.5 * w * mu * 2.0 / 3.0 * hooks.tang[2]
            p5[2] = -0.5 * w * mu * hooks.tang[1]
            p6[1] = -0.5 * w * mu * 4.0 / 3.0 * hooks.e[1]
            p6[2] = -0.5 * w * mu * hooks.e[2]
            p6[3] = -0.5 * w * rec.kappa_pred * hooks.e[3]
        p[5], p[6] = p5, p6
        for s, val in p.items():
            pieces.setdefault(s, []).append(rfs.to_frame(val, axis))
    if ws.energy_x is not None:
        # viscous work goes to group 5, conduction slope part to group 6
        for k, (e, pl) in enumerate(((ws.energy_x, pieces[5][0]), (ws.energy_y, pieces[5][1]))):
            h = ws.hooks_x if k == 0 else ws.hooks_y
            rec = ws.rec_x if k == 0 else ws.rec_y
            cond = -0.5 * rec.omega * rec.kappa_pred * h.e[3]
            pl[3] = e - cond
    return {f"R{s}": -_divergence(fx, fy, mesh) for s, (fx, fy) in pieces.items()}


def single_step(U, mesh: Mesh, bcs: BoundarySpec, dt, coeffs: TransportCoefficients,
                config: SolverConfig = None, t=0.0, solver: RFSSolver = None):
    """Functional wrapper: one step from ``U`` with a fresh or supplied solver."""
    solver = solver or RFSSolver(mesh, bcs, coeffs, config)
    U_new, _ = solver.step(U, t, dt)
    return U_new
