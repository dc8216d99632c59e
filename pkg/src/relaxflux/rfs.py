"""Relaxation flux solver at cell interfaces.

All routines work in a face-normal frame: component 1 is the normal
velocity, "n" gradients are along the face normal and "t" gradients along
the face. y-faces are handled by permuting ``(rho, u, v, T)`` to
``(rho, v, u, T)`` before the call and permuting the flux rows back
afterwards (see :func:`to_frame`), so both directions share one code path.

The relaxation variables only exist inside these functions: their
initial data are the equilibrium fluxes of the reconstructed state and
nothing about them is stored between steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import physics
from .physics import SWAP, TransportCoefficients

A_FLOOR = 1e-12
EPS0 = 1e-9

# predictor variants: the characteristic-consistent signs (default) and
# the signs exactly as typeset in the source of the method
CHARACTERISTIC = "characteristic"
PRINTED = "printed"


def to_frame(X, axis):
    """Permute a 4-component array into the frame normal to ``axis`` (self-inverse)."""
    return X if axis == 0 else X[SWAP]


@dataclass
class FaceInput:
    """Reconstructed data on both sides of a batch of faces (frame coordinates)."""
    QL: np.ndarray
    QR: np.ndarray
    gL_n: np.ndarray
    gL_t: np.ndarray
    gR_n: np.ndarray
    gR_t: np.ndarray
    dface: np.ndarray    # interface spacing, half the sum of the two cell widths


@dataclass
class RelaxationData:
    uL: np.ndarray
    uR: np.ndarray
    vL: np.ndarray
    vR: np.ndarray
    dxuL: np.ndarray
    dxuR: np.ndarray
    dxvL: np.ndarray
    dxvR: np.ndarray
    dywL: np.ndarray
    dywR: np.ndarray


@dataclass
class FaceRecord:
    a: np.ndarray
    eps: np.ndarray
    omega: np.ndarray
    u_star: np.ndarray
    v_star: np.ndarray
    ux_star: np.ndarray
    u_pred: np.ndarray
    Q_pred: np.ndarray
    H_n: np.ndarray
    base_flux: np.ndarray      # every term not touched by the viscous flux at t^{n+1}
    mu_pred: np.ndarray
    kappa_pred: np.ndarray
    flagged: np.ndarray        # predictor replaced by the star state


def local_wavespeed(QL, QR, gamma=1.4):
    """``max(|u_L| + c_L, |u_R| + c_R)`` using the face-normal velocity."""
    a = np.maximum(np.abs(QL[1]) + physics.sound_speed(QL, gamma),
                   np.abs(QR[1]) + physics.sound_speed(QR, gamma))
    return np.maximum(a, A_FLOOR)


def relaxation_epsilon(pL, pR, dt, C_num, eps0=EPS0):
    return eps0 + C_num * np.abs(pR - pL) / (pR + pL) * dt


def implicitness(eps, dt):
    """Weight ``dt / (2 eps + dt)`` of the equilibrium part of the flux."""
    return dt / (2.0 * eps + dt)


def _side_data(Q, g_n, g_t, coeffs: TransportCoefficients):
    gamma = coeffs.gamma
    u = physics.conserved_from_primitive(Q, gamma, check=False)
    v = physics.convective_flux(Q, 0, gamma)
    dxu = np.einsum("ij...,j...->i...", physics.dU_dQ(Q, gamma), g_n)
    dyu = np.einsum("ij...,j...->i...", physics.dU_dQ(Q, gamma), g_t)
    dxv = np.einsum("ij...,j...->i...", physics.convective_jacobian(Q, 0, gamma), dxu)
    dyw = np.einsum("ij...,j...->i...", physics.convective_jacobian(Q, 1, gamma), dyu)
    if not coeffs.inviscid:
        v = v - physics.viscous_flux(Q, g_n, g_t, coeffs, 0)
        dxv = dxv - physics.viscous_flux_derivative(Q, g_n, g_t, g_n, coeffs, 0)
        dyw = dyw - physics.viscous_flux_derivative(Q, g_n, g_t, g_t, coeffs, 1)
    return u, v, dxu, dxv, dyw


def equilibrium_relaxation_data(inp: FaceInput, coeffs: TransportCoefficients):
    """Relaxation-variable data set to equilibrium with the reconstruction.

    ``v = f_c - f_v`` on each side; its normal derivative is the convective
    Jacobian applied to ``du/dx`` minus the derivative of the viscous flux
    along the linear data. ``dyw`` is the tangential analogue for ``g``.
    """
    uL, vL, dxuL, dxvL, dywL = _side_data(inp.QL, inp.gL_n, inp.gL_t, coeffs)
    uR, vR, dxuR, dxvR, dywR = _side_data(inp.QR, inp.gR_n, inp.gR_t, coeffs)
    return RelaxationData(uL, uR, vL, vR, dxuL, dxuR, dxvL, dxvR, dywL, dywR)


def riemann_star(uL, uR, vL, vR, a):
    u_star = 0.5 * (uL + uR) - (vR - vL) / (2.0 * a)
    v_star = 0.5 * (vL + vR) - 0.5 * a * (uR - uL)
    return u_star, v_star


def star_gradient(rd: RelaxationData, a):
    return (0.5 * (rd.dxuL + rd.dxuR)
            - (rd.dxvR - rd.dxvL) / (2.0 * a)
            - (rd.dywR - rd.dywL) / (2.0 * a))


def predictor_state(u_star, rd: RelaxationData, a, dt, variant=CHARACTERISTIC):
    """Interface state at the end of the step from the characteristic solution.

    The default variant integrates both characteristic families with their
    own transversal source signs, which reduces to ``u_t = -v_x - w_y`` for
    smooth equilibrium data. ``variant="printed"`` flips all three
    derivative terms; it is kept only for A/B comparison.
    """
    jump = 0.5 * a * dt * (rd.dxuR - rd.dxuL)
    vsum = 0.5 * dt * (rd.dxvR + rd.dxvL)
    wsum = 0.5 * dt * (rd.dywR + rd.dywL)
    if variant == CHARACTERISTIC:
        return u_star + jump - vsum - wsum
    if variant == PRINTED:
        return u_star - jump + vsum + wsum
    raise ValueError(f"unknown predictor variant {variant!r}")


def ddg_interface_gradient(Q_minus, Q_plus, slope_minus, slope_plus, spacing,
                           tangential_minus, tangential_plus):
    """Face gradient: slope average plus jump penalty normal, plain average along."""
    normal = 0.5 * (slope_minus + slope_plus) + (Q_plus - Q_minus) / spacing
    tangential = 0.5 * (tangential_minus + tangential_plus)
    return normal, tangential


def solve_faces(inp: FaceInput, dt, coeffs: TransportCoefficients, C_num,
                eps0=EPS0, variant=CHARACTERISTIC) -> FaceRecord:
    """Everything the flux needs from step-n data at a batch of faces."""
    gamma = coeffs.gamma
    a = local_wavespeed(inp.QL, inp.QR, gamma)
    eps = relaxation_epsilon(physics.pressure(inp.QL), physics.pressure(inp.QR),
                             dt, C_num, eps0)
    omega = implicitness(eps, dt)

    rd = equilibrium_relaxation_data(inp, coeffs)
    u_star, v_star = riemann_star(rd.uL, rd.uR, rd.vL, rd.vR, a)
    ux_star = star_gradient(rd, a)
    Q_star = physics.primitive_from_conserved(u_star, gamma)

    u_pred = predictor_state(u_star, rd, a, dt, variant)
    Q_pred = physics.primitive_from_conserved(u_pred, gamma, check=False)
    bad = ~((Q_pred[0] > 0) & (Q_pred[3] > 0) & np.all(np.isfinite(Q_pred), axis=0))
    if np.any(bad):
        u_pred = np.where(bad, u_star, u_pred)
        Q_pred = np.where(bad, Q_star, Q_pred)

    H_n = physics.convective_flux(Q_star, 0, gamma)
    if not coeffs.inviscid:
        gn, gt = ddg_interface_gradient(inp.QL, inp.QR, inp.gL_n, inp.gR_n, inp.dface,
                                        inp.gL_t, inp.gR_t)
        H_n = H_n - physics.viscous_flux(Q_star, gn, gt, coeffs, 0)

    fc_pred = physics.convective_flux(Q_pred, 0, gamma)
    base = ((1.0 - omega) * (v_star - 0.5 * a * a * dt * ux_star)
            + 0.5 * omega * (H_n + fc_pred))
    mu_pred = coeffs.viscosity(Q_pred[3])
    return FaceRecord(a=a, eps=eps, omega=omega, u_star=u_star, v_star=v_star,
                      ux_star=ux_star, u_pred=u_pred, Q_pred=Q_pred, H_n=H_n,
                      base_flux=base, mu_pred=mu_pred,
                      kappa_pred=coeffs.kappa_factor * mu_pred, flagged=bad)


@dataclass
class ImplicitHooks:
    """Data the linear systems need from one batch of faces (frame coordinates).

    The viscous flux at ``t^{n+1}`` is ``(w_n J(u_n), w_t J(u_t), 0)`` in the
    velocity rows plus explicit terms, where ``J(q) = q_R - q_L`` of the new
    cell centers; ``w_T`` plays the same role for temperature. Slope
    corrections ``e`` and tangential averages are step-n data.
    """
    w_n: np.ndarray
    w_t: np.ndarray
    w_T: np.ndarray
    e: np.ndarray          # slope part of the normal face gradient, per primitive
    tang: np.ndarray       # tangential face gradient, per primitive


def explicit_midpoint_flux(rec: FaceRecord, sigL, sigR, tanL, tanR, dL, dR, dface):
    """Explicit part of the midpoint flux in the mass and momentum rows.

    ``sigL/sigR`` are the normal GRP cell slopes at ``t^{n+1}`` of the two
    neighbours, ``tanL/tanR`` their tangential slopes and ``dL/dR`` their
    widths along the normal. The normal face gradient at ``t^{n+1}`` is
    ``J / dface + e`` once the linear-interpolated traces are substituted.
    Returns ``(flux, hooks)``; the energy row of ``flux`` still lacks its
    viscous part (see :func:`energy_viscous_flux`).
    """
    e = sigL * (0.5 - 0.5 * dL / dface) + sigR * (0.5 - 0.5 * dR / dface)
    tang = 0.5 * (tanL + tanR)
    half_w = 0.5 * rec.omega
    mu = rec.mu_pred
    flux = rec.base_flux.copy()
    flux[1] -= half_w * mu * (4.0 / 3.0 * e[1] - 2.0 / 3.0 * tang[2])
    flux[2] -= half_w * mu * (e[2] + tang[1])
    hooks = ImplicitHooks(w_n=half_w * 4.0 / 3.0 * mu / dface,
                          w_t=half_w * mu / dface,
                          w_T=half_w * rec.kappa_pred / dface,
                          e=e, tang=tang)
    return flux, hooks


def energy_viscous_flux(rec: FaceRecord, hooks: ImplicitHooks, jump_un, jump_ut, dface):
    """Explicit energy-row contribution once the new velocities are known.

    Returns ``-(omega/2) (u tau_nn + v tau_nt + kappa e_T)`` evaluated with
    the predictor velocities; the implicit conduction term is left out.
    """
    mu = rec.mu_pred
    dun = jump_un / dface + hooks.e[1]
    dut = jump_ut / dface + hooks.e[2]
    tau_nn = mu * (4.0 / 3.0 * dun - 2.0 / 3.0 * hooks.tang[2])
    tau_nt = mu * (hooks.tang[1] + dut)
    u, v = rec.Q_pred[1], rec.Q_pred[2]
    return -0.5 * rec.omega * (u * tau_nn + v * tau_nt + rec.kappa_pred * hooks.e[3])
