"""Pointwise gas dynamics: equation of state, fluxes, homogeneity tensors.

Every function here works on arrays whose leading axis holds the four
components, so ``Q`` may be a single 4-vector or a ``(4, nx, ny)`` field.

Primitive ordering is ``(rho, u, v, T)`` with ``T = p / rho``; conserved
ordering is ``(rho, rho*u, rho*v, rho*E)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

ViscosityLaw = Union[float, Callable[[np.ndarray], np.ndarray]]

# swaps x<->y for states, gradients and flux rows
SWAP = np.array([0, 2, 1, 3])


class InadmissibleStateError(ValueError):
    """Raised when a state has non-positive density or internal energy."""

    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} at {index}")
        self.index = index


@dataclass(frozen=True)
class TransportCoefficients:
    """Viscosity law plus the constants that fix conductivity.

    ``mu`` is either a constant or a callable ``mu(T)``. ``dmu_dT`` is only
    consulted for callables; when omitted a central difference is used.
    """

    mu: ViscosityLaw = 0.0
    gamma: float = 1.4
    Pr: float = 0.72
    dmu_dT: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def inviscid(self) -> bool:
        return not callable(self.mu) and self.mu == 0.0

    def viscosity(self, T):
        if callable(self.mu):
            return self.mu(T)
        return np.full_like(np.asarray(T, dtype=float), self.mu)

    def viscosity_derivative(self, T):
        T = np.asarray(T, dtype=float)
        if not callable(self.mu):
            return np.zeros_like(T)
        if self.dmu_dT is not None:
            return self.dmu_dT(T)
        h = 1e-7 * np.maximum(np.abs(T), 1.0)
        return (self.mu(T + h) - self.mu(T - h)) / (2 * h)

    @property
    def kappa_factor(self) -> float:
        """kappa / mu = gamma / (Pr (gamma - 1))."""
        return self.gamma / (self.Pr * (self.gamma - 1.0))

    def conductivity(self, T):
        return self.kappa_factor * self.viscosity(T)


def _first_bad(mask):
    idx = np.argwhere(mask)
    if idx.size == 0:
        return None
    return tuple(int(k) for k in idx[0])


def primitive_from_conserved(U, gamma=1.4, check=True):
    """Convert conserved ``(rho, mx, my, rhoE)`` to primitive ``(rho, u, v, T)``."""
    U = np.asarray(U, dtype=float)
    rho = U[0]
    if check and np.any(~(rho > 0)):
        raise InadmissibleStateError("inadmissible state: rho <= 0",
                                     _first_bad(~(rho > 0)))
    u = U[1] / rho
    v = U[2] / rho
    e_int = U[3] - 0.5 * rho * (u * u + v * v)
    if check and np.any(~(e_int > 0)):
        raise InadmissibleStateError("inadmissible state: internal energy <= 0",
                                     _first_bad(~(e_int > 0)))
    T = (gamma - 1.0) * e_int / rho
    return np.stack([rho, u, v, T])


def conserved_from_primitive(Q, gamma=1.4, check=True):
    """Inverse of :func:`primitive_from_conserved`."""
    Q = np.asarray(Q, dtype=float)
    rho, u, v, T = Q
    if check and (np.any(~(rho > 0)) or np.any(~(T > 0))):
        raise InadmissibleStateError("inadmissible state: rho or T <= 0",
                                     _first_bad(~((rho > 0) & (T > 0))))
    rhoE = rho * T / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return np.stack([rho, rho * u, rho * v, rhoE])


def pressure(Q):
    return Q[0] * Q[3]


def sound_speed(Q, gamma=1.4):
    return np.sqrt(gamma * np.asarray(Q)[3])


def convective_flux(Q, axis=0, gamma=1.4):
    """Euler flux ``f_c`` (axis 0) or ``g_c`` (axis 1) of a primitive state."""
    rho, u, v, T = Q
    p = rho * T
    rhoE = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    vn = u if axis == 0 else v
    mass = rho * vn
    return np.stack([mass,
                     mass * u + (p if axis == 0 else 0.0 * p),
                     mass * v + (p if axis == 1 else 0.0 * p),
                     (rhoE + p) * vn])


def stresses(Q, dQdx, dQdy, coeffs: TransportCoefficients):
    """Return ``(tau11, tau12, tau22, q1, q2)`` for Newtonian gas + Fourier law."""
    T = Q[3]
    mu = coeffs.viscosity(T)
    kappa = coeffs.kappa_factor * mu
    ux, vx, Tx = dQdx[1], dQdx[2], dQdx[3]
    uy, vy, Ty = dQdy[1], dQdy[2], dQdy[3]
    tau11 = mu * (4.0 / 3.0 * ux - 2.0 / 3.0 * vy)
    tau12 = mu * (uy + vx)
    tau22 = mu * (4.0 / 3.0 * vy - 2.0 / 3.0 * ux)
    return tau11, tau12, tau22, kappa * Tx, kappa * Ty


def viscous_flux(Q, dQdx, dQdy, coeffs: TransportCoefficients, axis=0):
    """Viscous flux ``f_v`` / ``g_v`` from primitive state and gradients."""
    Q = np.asarray(Q, dtype=float)
    tau11, tau12, tau22, q1, q2 = stresses(Q, dQdx, dQdy, coeffs)
    u, v = Q[1], Q[2]
    zero = np.zeros_like(tau11)
    if axis == 0:
        return np.stack([zero, tau11, tau12, u * tau11 + v * tau12 + q1])
    return np.stack([zero, tau12, tau22, u * tau12 + v * tau22 + q2])


def viscous_flux_derivative(Q, dQdx, dQdy, dQds, coeffs: TransportCoefficients,
                            axis=0):
    """Derivative of the viscous flux along a linear reconstruction.

    The state varies with rate ``dQds`` along the chosen direction while the
    gradients stay frozen (second derivatives of the linear data vanish), so
    only the explicit state dependence of the flux contributes.
    """
    Q = np.asarray(Q, dtype=float)
    T = Q[3]
    mu = coeffs.viscosity(T)
    dmu = coeffs.viscosity_derivative(T) * dQds[3]
    tau11, tau12, tau22, q1, q2 = stresses(Q, dQdx, dQdy, coeffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        rate = np.where(mu != 0, dmu / np.where(mu != 0, mu, 1.0), 0.0)
    u, v = Q[1], Q[2]
    du, dv = dQds[1], dQds[2]
    zero = np.zeros_like(tau11)
    if axis == 0:
        t_n, t_t, q = tau11, tau12, q1
    else:
        t_n, t_t, q = tau22, tau12, q2
    if axis == 0:
        energy = (du * t_n + dv * t_t) + rate * (u * t_n + v * t_t + q)
        return np.stack([zero, rate * t_n, rate * t_t, energy])
    energy = (du * t_t + dv * t_n) + rate * (u * t_t + v * t_n + q)
    return np.stack([zero, rate * t_t, rate * t_n, energy])


def dU_dQ(Q, gamma=1.4):
    """Jacobian of the conserved state with respect to primitives, shape (4, 4, ...)."""
    rho, u, v, T = Q
    one = np.ones_like(rho)
    zero = np.zeros_like(rho)
    cv = 1.0 / (gamma - 1.0)
    return np.array([
        [one, zero, zero, zero],
        [u, rho, zero, zero],
        [v, zero, rho, zero],
        [cv * T + 0.5 * (u * u + v * v), rho * u, rho * v, cv * rho],
    ])


def dQ_dU(Q, gamma=1.4):
    """Jacobian of primitives with respect to the conserved state."""
    rho, u, v, T = Q
    zero = np.zeros_like(rho)
    inv = 1.0 / rho
    g1 = gamma - 1.0
    return np.array([
        [np.ones_like(rho), zero, zero, zero],
        [-u * inv, inv, zero, zero],
        [-v * inv, zero, inv, zero],
        [inv * (g1 * 0.5 * (u * u + v * v) - T), -g1 * u * inv, -g1 * v * inv,
         g1 * inv],
    ])


def convective_jacobian(Q, axis=0, gamma=1.4):
    """``d f_c / d u`` (axis 0) or ``d g_c / d u`` (axis 1) in conserved basis."""
    rho, u, v, T = Q
    g1 = gamma - 1.0
    q2 = u * u + v * v
    H = gamma / g1 * T + 0.5 * q2
    zero = np.zeros_like(rho)
    one = np.ones_like(rho)
    if axis == 0:
        return np.array([
            [zero, one, zero, zero],
            [0.5 * g1 * q2 - u * u, (3 - gamma) * u, -g1 * v, g1 * one],
            [-u * v, v, u, zero],
            [u * (0.5 * g1 * q2 - H), H - g1 * u * u, -g1 * u * v, gamma * u],
        ])
    return np.array([
        [zero, zero, one, zero],
        [-u * v, v, u, zero],
        [0.5 * g1 * q2 - v * v, -g1 * u, (3 - gamma) * v, g1 * one],
        [v * (0.5 * g1 * q2 - H), -g1 * u * v, H - g1 * v * v, gamma * v],
    ])


def homogeneity_matrices(U, coeffs: TransportCoefficients):
    """Return ``(B11, B12, B21, B22)`` for conserved state(s) ``U``."""
    U = np.asarray(U, dtype=float)
    gamma = coeffs.gamma
    Q = primitive_from_conserved(U, gamma)
    rho, u, v, _ = Q
    E = U[3] / rho
    s = coeffs.viscosity(Q[3]) / rho
    g = gamma / coeffs.Pr
    zero = np.zeros_like(rho)
    one = np.ones_like(rho)
    c43 = 4.0 / 3.0
    c23 = 2.0 / 3.0
    uu, vv = u * u, v * v
    B11 = np.array([
        [zero, zero, zero, zero],
        [-c43 * u, c43 * one, zero, zero],
        [-v, zero, one, zero],
        [-c43 * uu - vv - g * (E - (uu + vv)), (c43 - g) * u, (1 - g) * v, g * one],
    ])
    B22 = np.array([
        [zero, zero, zero, zero],
        [-u, one, zero, zero],
        [-c43 * v, zero, c43 * one, zero],
        [-uu - c43 * vv - g * (E - (uu + vv)), (1 - g) * u, (c43 - g) * v, g * one],
    ])
    B12 = np.array([
        [zero, zero, zero, zero],
        [c23 * v, zero, -c23 * one, zero],
        [-u, one, zero, zero],
        [-u * v / 3.0, v, -c23 * u, zero],
    ])
    B21 = np.array([
        [zero, zero, zero, zero],
        [-v, zero, one, zero],
        [c23 * u, -c23 * one, zero, zero],
        [-u * v / 3.0, -c23 * v, u, zero],
    ])
    return tuple(B * s for B in (B11, B12, B21, B22))


def homogeneity_apply(U, dUdx, dUdy, coeffs: TransportCoefficients, row=0):
    """Viscous flux written as ``B_r1 du/dx + B_r2 du/dy`` (row 0 -> f_v, 1 -> g_v)."""
    B11, B12, B21, B22 = homogeneity_matrices(U, coeffs)
    Bx, By = (B11, B12) if row == 0 else (B21, B22)
    return (np.einsum("ij...,j...->i...", Bx, np.asarray(dUdx, dtype=float))
            + np.einsum("ij...,j...->i...", By, np.asarray(dUdy, dtype=float)))
