import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxflux import physics, rfs
from relaxflux.implicit import SolverConfig
from relaxflux.physics import TransportCoefficients

from conftest import gradients, primitive_states

SQRT14 = np.sqrt(1.4)


def face_input(QL, QR, gLn, gLt, gRn, gRt, dface=0.1):
    return rfs.FaceInput(*(np.asarray(x, dtype=float) for x in (QL, QR, gLn, gLt, gRn, gRt)),
                         dface=dface)


def sutherland():
    mu = lambda T: 0.05 * T ** 0.7                     # noqa: E731
    return TransportCoefficients(mu=mu, dmu_dT=lambda T: 0.035 * T ** -0.3)


class TestParameters:
    def test_wavespeed_rest(self):
        Q = np.array([1.0, 0, 0, 1])
        assert rfs.local_wavespeed(Q, Q) == pytest.approx(SQRT14, rel=1e-15)

    def test_wavespeed_moving(self):
        QL, QR = np.array([1.0, 0.5, 0, 1]), np.array([1.0, -0.2, 0, 1])
        assert rfs.local_wavespeed(QL, QR) == pytest.approx(0.5 + SQRT14, rel=1e-15)
        assert rfs.local_wavespeed(QR, QL) == rfs.local_wavespeed(QL, QR)

    def test_wavespeed_floor(self):
        Q = np.array([1.0, 0, 0, 0.0])
        assert rfs.local_wavespeed(Q, Q) == rfs.A_FLOOR

    def test_epsilon(self):
        assert rfs.relaxation_epsilon(2.0, 2.0, 0.1, 5) == 1e-9
        assert rfs.relaxation_epsilon(1.0, 3.0, 0.01, 5) == pytest.approx(0.025000001, rel=1e-15)

    def test_c_num_defaults(self):
        cfg = SolverConfig()
        assert cfg.c_num(TransportCoefficients(mu=0.0)) == 5.0
        assert cfg.c_num(TransportCoefficients(mu=1e-3)) == 1.0
        assert SolverConfig(C_num=2.0).c_num(TransportCoefficients()) == 2.0

    @given(st.floats(0, 10), st.floats(1e-8, 1.0))
    def test_omega_identities(self, eps, dt):
        w = rfs.implicitness(eps, dt)
        assert 1 - w == pytest.approx(2 * eps / (2 * eps + dt), rel=1e-13, abs=1e-15)
        assert eps * dt / (2 * eps + dt) == pytest.approx((1 - w) * dt / 2, rel=1e-13, abs=1e-15 * dt)
        assert 0 < w <= 1


class TestEquilibriumData:
    def test_uniform_inviscid(self):
        Q = np.array([1.2, 0.3, -0.4, 0.9])
        z = np.zeros(4)
        rd = rfs.equilibrium_relaxation_data(face_input(Q, Q, z, z, z, z), TransportCoefficients())
        np.testing.assert_allclose(rd.vL, physics.convective_flux(Q))
        np.testing.assert_array_equal(rd.vL, rd.vR)
        for name in ("dxuL", "dxuR", "dxvL", "dxvR", "dywL", "dywR"):
            assert np.all(getattr(rd, name) == 0)

    def test_inviscid_density_gradient(self):
        Q = np.array([1.0, 0.4, 0.1, 1.3])
        g = np.array([1.0, 0, 0, 0])
        z = np.zeros(4)
        rd = rfs.equilibrium_relaxation_data(face_input(Q, Q, g, z, g, z), TransportCoefficients())
        A = physics.convective_jacobian(Q, 0)
        np.testing.assert_allclose(rd.dxvL, A @ rd.dxuL, rtol=1e-15)

    @given(primitive_states(), gradients(1.0), gradients(1.0))
    @settings(max_examples=100, deadline=None)
    def test_finite_difference_oracle(self, Q, gn, gt):
        coeffs = sutherland()
        z = np.zeros(4)
        rd = rfs.equilibrium_relaxation_data(face_input(Q, Q, gn, gt, z, z), coeffs)
        h = 1e-6 * max(1.0, np.abs(Q).max())

        def v_along(s):
            q = Q + s * gn
            return physics.convective_flux(q) - physics.viscous_flux(q, gn, gt, coeffs, 0)

        def w_along(s):
            q = Q + s * gt
            return physics.convective_flux(q, 1) - physics.viscous_flux(q, gn, gt, coeffs, 1)

        fd_v = (v_along(h) - v_along(-h)) / (2 * h)
        fd_w = (w_along(h) - w_along(-h)) / (2 * h)
        scale = max(1.0, np.abs(fd_v).max(), np.abs(fd_w).max())
        np.testing.assert_allclose(rd.dxvL, fd_v, rtol=1e-6, atol=1e-6 * scale)
        np.testing.assert_allclose(rd.dywL, fd_w, rtol=1e-6, atol=1e-6 * scale)
        fd_u = (physics.conserved_from_primitive(Q + h * gn, check=False)
                - physics.conserved_from_primitive(Q - h * gn, check=False)) / (2 * h)
        np.testing.assert_allclose(rd.dxuL, fd_u, rtol=1e-6, atol=1e-6 * scale)


class TestStar:
    def test_equal_states(self):
        u, v = np.array([1.0, 2, 3, 4]), np.array([0.5, 0.1, 0.2, 0.3])
        us, vs = rfs.riemann_star(u, u, v, v, 1.7)
        np.testing.assert_array_equal(us, u)
        np.testing.assert_array_equal(vs, v)

    def test_scalar_example(self):
        us, vs = rfs.riemann_star(1.0, 0.0, 0.5, 0.5, 2.0)
        assert (us, vs) == (0.5, 1.5)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 5))
    def test_mirror_symmetry(self, uL, uR, v, a):
        assert rfs.riemann_star(uL, uR, v, v, a)[0] == pytest.approx(
            rfs.riemann_star(uR, uL, v, v, a)[0], rel=1e-15)

    def _data(self, rng):
        return rfs.RelaxationData(*(rng.normal(size=4) for _ in range(10)))

    def test_gradient_zero(self):
        z = np.zeros(4)
        rd = rfs.RelaxationData(*(z for _ in range(10)))
        np.testing.assert_array_equal(rfs.star_gradient(rd, 1.3), 0)

    def test_gradient_equal_slopes(self, rng):
        rd = self._data(rng)
        rd.dxvR, rd.dywR = rd.dxvL, rd.dywL
        np.testing.assert_allclose(rfs.star_gradient(rd, 2.0), 0.5 * (rd.dxuL + rd.dxuR))

    def test_gradient_direct_evaluation(self, rng):
        rd = self._data(rng)
        a = 1.7
        expected = np.empty(4)
        for k in range(4):
            expected[k] = (0.5 * (rd.dxuL[k] + rd.dxuR[k]) - (rd.dxvR[k] - rd.dxvL[k]) / (2 * a)
                           - (rd.dywR[k] - rd.dywL[k]) / (2 * a))
        np.testing.assert_allclose(rfs.star_gradient(rd, a), expected, rtol=1e-15)


class TestPredictor:
    def test_uniform(self):
        Q = np.array([1.0, 0.3, 0.2, 1.1])
        z = np.zeros(4)
        rec = rfs.solve_faces(face_input(Q, Q, z, z, z, z), 0.01, TransportCoefficients(), 5.0)
        uL = physics.conserved_from_primitive(Q)
        np.testing.assert_allclose(rec.u_pred, uL, rtol=1e-15)
        np.testing.assert_allclose(rec.u_star, uL, rtol=1e-15)

    def test_zero_slopes(self, rng):
        rd = rfs.RelaxationData(rng.normal(size=4), rng.normal(size=4), rng.normal(size=4),
                                rng.normal(size=4), *(np.zeros(4) for _ in range(6)))
        u_star = rng.normal(size=4)
        for variant in (rfs.CHARACTERISTIC, rfs.PRINTED):
            np.testing.assert_array_equal(rfs.predictor_state(u_star, rd, 1.5, 0.1, variant), u_star)

    def test_unknown_variant(self):
        z = np.zeros(4)
        rd = rfs.RelaxationData(*(z for _ in range(10)))
        with pytest.raises(ValueError):
            rfs.predictor_state(z, rd, 1.0, 0.1, "sideways")

    @staticmethod
    def _advection_error(dt, variant):
        # rho = 1 + 0.2 sin(pi x), u = 1, p = 1: density is carried at unit speed
        x = 0.3
        rho = 1 + 0.2 * np.sin(np.pi * x)
        drho = 0.2 * np.pi * np.cos(np.pi * x)
        Q = np.array([rho, 1.0, 0.0, 1.0 / rho])
        gn = np.array([drho, 0.0, 0.0, -drho / rho ** 2])
        z = np.zeros(4)
        rec = rfs.solve_faces(face_input(Q, Q, gn, z, gn, z), dt, TransportCoefficients(), 5.0,
                              variant=variant)
        exact = 1 + 0.2 * np.sin(np.pi * (x - dt))
        return abs(rec.Q_pred[0] - exact)

    def test_linear_advection_second_order(self):
        e1 = self._advection_error(1e-2, rfs.CHARACTERISTIC)
        e2 = self._advection_error(5e-3, rfs.CHARACTERISTIC)
        # the leading error is the curvature term dt^2 / 2 rho''
        assert e1 <= 0.5 * 1e-4 * 0.2 * np.pi ** 2 * 1.01
        assert e1 / e2 == pytest.approx(4.0, rel=0.05)

    def test_printed_signs_first_order(self):
        e1 = self._advection_error(1e-2, rfs.PRINTED)
        e2 = self._advection_error(5e-3, rfs.PRINTED)
        assert e1 / e2 == pytest.approx(2.0, rel=0.05)


class TestDDG:
    def test_continuous_linear(self):
        n, t = rfs.ddg_interface_gradient(np.array(1.0), np.array(1.0), np.array(2.0),
                                          np.array(2.0), 0.1, np.array(3.0), np.array(3.0))
        assert (n, t) == (2.0, 3.0)

    def test_jump(self):
        n, _ = rfs.ddg_interface_gradient(0.0, 1.0, 0.0, 0.0, 0.1, 0.0, 0.0)
        assert n == pytest.approx(10.0)

    def test_direct_evaluation(self, rng):
        qm, qp, sm, sp, tm, tp = rng.normal(size=(6, 4))
        n, t = rfs.ddg_interface_gradient(qm, qp, sm, sp, 0.25, tm, tp)
        np.testing.assert_allclose(n, [(sm[k] + sp[k]) / 2 + (qp[k] - qm[k]) / 0.25 for k in range(4)])
        np.testing.assert_allclose(t, (tm + tp) / 2)


def _random_input(rng, viscous_slopes=True):
    QL = np.array([1.0, 0.2, -0.1, 1.0]) + 0.05 * rng.normal(size=4)
    QR = np.array([1.0, 0.2, -0.1, 1.0]) + 0.05 * rng.normal(size=4)
    g = 0.3 * rng.normal(size=(4, 4)) if viscous_slopes else np.zeros((4, 4))
    return face_input(QL, QR, *g)


class TestFlux:
    @given(primitive_states(), st.floats(1e-6, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_uniform_flux_any_omega(self, Q, dt):
        z = np.zeros(4)
        for eps0 in (0.0, 1e-9, 10.0):
            rec = rfs.solve_faces(face_input(Q, Q, z, z, z, z), dt, TransportCoefficients(), 5.0,
                                  eps0=eps0)
            f = physics.convective_flux(Q)
            np.testing.assert_allclose(rec.base_flux, f, rtol=1e-13, atol=1e-13 * np.abs(f).max())

    def test_crank_nicolson_limit(self, rng):
        inp = _random_input(rng)
        inp.QR = inp.QL.copy()
        inp.QR[0] *= 1.1
        inp.QR[3] = inp.QL[0] * inp.QL[3] / inp.QR[0]      # equal pressures: eps = eps0
        rec = rfs.solve_faces(inp, 1e-3, TransportCoefficients(mu=0.01), 1.0, eps0=0.0)
        assert rec.omega == 1.0
        fc = physics.convective_flux(rec.Q_pred)
        np.testing.assert_allclose(rec.base_flux, 0.5 * (rec.H_n + fc), rtol=1e-13)

    def test_hyperbolic_limit(self, rng):
        inp = _random_input(rng)
        dt = 1e-3
        rec = rfs.solve_faces(inp, dt, TransportCoefficients(mu=0.01), 1.0, eps0=1e12)
        target = rec.v_star - 0.5 * rec.a ** 2 * dt * rec.ux_star
        assert rec.omega < 1e-14
        np.testing.assert_allclose(rec.base_flux, target, rtol=1e-13,
                                   atol=1e-13 * np.abs(target).max())

    def test_consistency_small_dt(self):
        # smooth linear data through the face; the midpoint flux tends to f_c - f_v
        Q = np.array([1.1, 0.3, -0.2, 0.9])
        gn = np.array([0.2, 0.5, -0.3, 0.1])
        gt = np.array([-0.1, 0.2, 0.4, -0.2])
        dface = 0.1
        coeffs = TransportCoefficients(mu=0.02)
        QL, QR = Q.copy(), Q.copy()
        target = physics.convective_flux(Q) - physics.viscous_flux(Q, gn, gt, coeffs, 0)
        errs = []
        for dt in (1e-3, 1e-4, 1e-5):
            rec = rfs.solve_faces(face_input(QL, QR, gn, gt, gn, gt, dface), dt, coeffs, 1.0)
            flux, hooks = rfs.explicit_midpoint_flux(rec, gn, gn, gt, gt, dface, dface, dface)
            # implicit parts with cell-center jumps of the linear data
            jump = gn * dface
            flux[1] -= hooks.w_n * jump[1]
            flux[2] -= hooks.w_t * jump[2]
            flux[3] += rfs.energy_viscous_flux(rec, hooks, jump[1], jump[2], dface) - hooks.w_T * jump[3]
            errs.append(np.abs(flux - target).max())
        # first order: the midpoint flux differs from the point flux by dt/2 df/dt
        assert errs[2] < 1e-4
        assert errs[0] / errs[1] == pytest.approx(10, rel=0.2)
        assert errs[1] / errs[2] == pytest.approx(10, rel=0.2)

    def test_slope_correction_vanishes_on_uniform_mesh(self, rng):
        rec = rfs.solve_faces(_random_input(rng), 1e-3, TransportCoefficients(mu=0.01), 1.0)
        s = rng.normal(size=(4, 4))
        _, hooks = rfs.explicit_midpoint_flux(rec, s[0], s[1], s[2], s[3], 0.2, 0.2, 0.2)
        np.testing.assert_array_equal(hooks.e, 0.0)
        _, hooks = rfs.explicit_midpoint_flux(rec, s[0], s[1], s[2], s[3], 0.1, 0.3, 0.2)
        np.testing.assert_allclose(hooks.e, s[0] * 0.25 + s[1] * -0.25)

    def test_inadmissible_predictor_falls_back(self):
        QL = np.array([1.0, -3.0, 0.0, 0.05])
        QR = np.array([1.0, 3.0, 0.0, 0.05])
        g = np.array([-30.0, 0.0, 0.0, 0.0])
        z = np.zeros(4)
        rec = rfs.solve_faces(face_input(QL, QR, g, z, g, z), 0.2, TransportCoefficients(), 5.0)
        if rec.flagged:
            np.testing.assert_array_equal(rec.u_pred, rec.u_star)
        assert rec.Q_pred[0] > 0 and rec.Q_pred[3] > 0

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_frame_is_self_inverse(self, seed):
        X = np.random.default_rng(seed).normal(size=(4, 3))
        np.testing.assert_array_equal(rfs.to_frame(rfs.to_frame(X, 1), 1), X)
        assert rfs.to_frame(X, 0) is X
