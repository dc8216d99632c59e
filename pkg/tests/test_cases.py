import numpy as np
import pytest

from relaxflux import physics
from relaxflux.cases import (RIEMANN_1, RIEMANN_2, double_mach_states, register_cases,
                             vortex_perturbation)
from relaxflux.grid import build_mesh

CASES = register_cases()

EXPECTED = {"advection", "vortex", "riemann2d-1", "riemann2d-2", "double-mach", "couette",
            "boundary-layer", "cavity-400", "cavity-1000", "cavity-3200", "vst", "vst-1000"}


def test_registry_names():
    assert set(CASES) == EXPECTED
    assert all(name == case.name for name, case in CASES.items())
    assert all(case.description for case in CASES.values())


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_shared_parameters(name):
    case = CASES[name]
    assert case.gamma == 1.4
    assert case.Pr == 0.72
    assert case.alpha == 1.3
    assert case.limiter
    assert case.cfl == (0.6 if name == "advection" else 0.4)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_initial_data_is_admissible(name):
    case = CASES[name]
    mesh = build_mesh(case.mesh_description(case.default_N or 8))
    X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
    Q = case.initial(X, Y)
    assert Q.shape == (4,) + mesh.shape
    assert np.all(Q[0] > 0) and np.all(Q[3] > 0)


def test_riemann_quadrant_states():
    assert RIEMANN_1[(True, True)] == pytest.approx([1.0, 0.6233, 0.6233, 1.5])
    assert RIEMANN_1[(False, True)] == pytest.approx([0.389, -0.6233, 0.6233, 0.4 / 0.389])
    init = CASES["riemann2d-1"].initial
    assert init(np.array([0.75]), np.array([0.75]))[:, 0] == pytest.approx([1, 0.6233, 0.6233, 1.5])
    assert init(np.array([0.25]), np.array([0.25]))[:, 0] == pytest.approx([1, -0.6233, -0.6233, 1.5])
    # second configuration has uniform pressure
    p = [Q[0] * Q[3] for Q in RIEMANN_2.values()]
    assert p == pytest.approx([0.75] * 4)


def test_riemann_one_is_symmetric_about_diagonal():
    for (east, north), Q in RIEMANN_1.items():
        mirror = RIEMANN_1[(north, east)]
        assert mirror == pytest.approx(Q[[0, 2, 1, 3]])


def test_double_mach_post_shock_state():
    pre, post, speed = double_mach_states()
    rho, u, v, T = post
    assert rho == pytest.approx(8.0)
    assert rho * T == pytest.approx(116.5)
    assert u == pytest.approx(8.25 * np.cos(np.pi / 6))
    assert v == pytest.approx(-8.25 * np.sin(np.pi / 6))
    assert pre == pytest.approx([1.4, 0, 0, 1 / 1.4])
    assert speed == pytest.approx(10.0)


def test_double_mach_rankine_hugoniot():
    pre, post, speed = double_mach_states()
    g = 1.4
    # shock-normal direction (cos 30, -sin 30); frame moving with the shock
    n = np.array([np.cos(np.pi / 6), -np.sin(np.pi / 6)])
    w = [Q[1:3] @ n - speed for Q in (pre, post)]
    flux = [(Q[0] * wi, Q[0] * wi * wi + Q[0] * Q[3]) for Q, wi in zip((pre, post), w)]
    assert flux[0][0] == pytest.approx(flux[1][0], rel=1e-12)
    assert flux[0][1] == pytest.approx(flux[1][1], rel=1e-12)
    # total enthalpy in the shock frame is conserved
    h = [g / (g - 1) * Q[3] + 0.5 * w * w for Q, w in zip((pre, post), w)]
    assert h[0] == pytest.approx(h[1], rel=1e-12)
    # no tangential jump
    t = np.array([np.sin(np.pi / 6), np.cos(np.pi / 6)])
    assert pre[1:3] @ t == pytest.approx(post[1:3] @ t, abs=1e-12)


def test_vst_states():
    extra = CASES["vst"].extra
    assert extra["left"] == pytest.approx([120.0, 0, 0, 1 / 1.4])
    assert extra["right"] == pytest.approx([1.2, 0, 0, 1 / 1.4])
    assert CASES["vst"].mu == pytest.approx(1 / 200)
    assert CASES["vst-1000"].mu == pytest.approx(1 / 1000)
    assert CASES["vst"].mesh_description(125)["n"] == (250, 125)


@pytest.mark.parametrize("Re", [400, 1000, 3200])
def test_cavity_mach_and_viscosity(Re):
    case = CASES[f"cavity-{Re}"]
    Tw = case.extra["T_wall"]
    assert 1.0 / np.sqrt(1.4 * Tw) == pytest.approx(0.15)
    assert case.mu == pytest.approx(1.0 / Re)


def test_boundary_layer_parameters():
    case = CASES["boundary-layer"]
    assert case.extra["u_inf"] / np.sqrt(1.4 * (1 / 1.4)) == pytest.approx(0.15)
    assert case.extra["u_inf"] * case.extra["L"] / case.mu == pytest.approx(1e5)


def test_couette_exact_solution_solves_steady_equations():
    case = CASES["couette"]
    U = case.extra["U"]
    y = np.linspace(0, 1, 11)
    Q = case.exact(np.zeros_like(y), y)
    rho, u, v, T = Q
    assert np.allclose(rho * T, 1.0)
    assert u == pytest.approx(U * y)
    assert np.all(v == 0)
    assert T[0] == pytest.approx(0.85) and T[-1] == pytest.approx(1.0)
    # energy balance k T'' + mu u'^2 = 0 with k = mu cp / Pr
    cp = 1.4 / 0.4
    curvature = np.polyfit(y, T, 2)[0] * 2
    assert curvature == pytest.approx(-0.72 * U * U / cp, rel=1e-10)
    assert case.mu == pytest.approx(U / 100)


def test_vortex_is_isentropic_and_divergence_free():
    case = CASES["vortex"]
    x, y = np.meshgrid(np.linspace(-3, 3, 61), np.linspace(-3, 3, 61), indexing="ij")
    Q = case.exact(x, y, 0.0)
    p = Q[0] * Q[3]
    assert np.allclose(p, Q[0] ** 1.4)
    du, dv, _ = vortex_perturbation(x, y)
    h = x[1, 0] - x[0, 0]
    div = np.gradient(du, h, axis=0) + np.gradient(dv, h, axis=1)
    assert np.max(np.abs(div[1:-1, 1:-1])) < 1e-2 * np.max(np.abs(du))
    # exact data moves with the unit diagonal velocity and wraps
    assert case.exact(x + 2.0, y + 2.0, 2.0) == pytest.approx(Q)
    assert case.exact(x, y, 20.0) == pytest.approx(Q)


def test_vortex_radial_momentum_balance():
    # dp/dr = rho u_theta^2 / r for the steady rotating part
    r = np.linspace(0.2, 4.0, 4001)
    du, dv, dT = vortex_perturbation(r, 0 * r)
    T = 1 + dT
    rho = T ** 2.5
    p = rho * T
    dpdr = np.gradient(p, r)
    assert np.allclose(dpdr[1:-1], (rho * dv * dv / r)[1:-1], atol=1e-5)


def test_advection_exact_solution():
    case = CASES["advection"]
    x = np.linspace(0, 2, 9)
    Q = case.exact(x, 0 * x, 0.5)
    assert Q[0] == pytest.approx(1 + 0.2 * np.sin(np.pi * (x - 0.5)))
    assert np.allclose(Q[0] * Q[3], 1.0)
    assert np.allclose(physics.conserved_from_primitive(Q)[1], Q[0])
