"""Blasius flat-plate profile by shooting on ``f''' + f f'' / 2 = 0``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def _rhs(eta, z):
    f, fp, fpp = z
    return [fp, fpp, -0.5 * f * fpp]


def _far_field_slope(curvature, eta_max):
    sol = solve_ivp(_rhs, (0.0, eta_max), [0.0, 0.0, curvature], rtol=1e-12, atol=1e-14)
    return sol.y[1, -1] - 1.0


def wall_curvature(eta_max=12.0) -> float:
    """``f''(0)`` such that ``f'(eta_max) = 1`` (about 0.33206)."""
    return brentq(_far_field_slope, 0.1, 1.0, args=(eta_max,), xtol=1e-15)


@dataclass(frozen=True)
class BlasiusProfile:
    eta: np.ndarray
    f: np.ndarray
    u: np.ndarray        # f' = u / u_inf
    v: np.ndarray        # v sqrt(Re_x) / u_inf = (eta f' - f) / 2

    def velocity_at(self, eta):
        """Interpolated scaled velocities ``(u*, v*)`` at similarity coordinates ``eta``."""
        return np.interp(eta, self.eta, self.u), np.interp(eta, self.eta, self.v)


def blasius_profile(eta_max=12.0, n=601) -> BlasiusProfile:
    fpp0 = wall_curvature(eta_max)
    eta = np.linspace(0.0, eta_max, n)
    sol = solve_ivp(_rhs, (0.0, eta_max), [0.0, 0.0, fpp0], t_eval=eta,
                    rtol=1e-12, atol=1e-14)
    f, fp = sol.y[0], sol.y[1]
    return BlasiusProfile(eta=eta, f=f, u=fp, v=0.5 * (eta * fp - f))


def similarity_coordinates(x, y, u_inf, mu, rho=1.0):
    """``eta = y / x * sqrt(Re_x)`` with ``Re_x = rho u_inf x / mu``."""
    re_x = rho * u_inf * x / mu
    return y / x * np.sqrt(re_x), re_x
