import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxflux import recon
from relaxflux.grid import G, BoundarySpec, Extrapolation, Mesh, Periodic, fill_ghosts, pad

from conftest import uniform_mesh

finite = st.floats(-100, 100, allow_nan=False)


def padded_line(values, dx=1.0):
    """Cells along x with given centers, one row in y, ghosts from extrapolation."""
    values = np.asarray(values, dtype=float)
    n = values.size
    m = Mesh(np.arange(n + 1) * dx, np.array([0.0, 1.0]))
    P = pad(np.broadcast_to(values[:, None], (4, n, 1)).copy())
    fill_ghosts(P, BoundarySpec.all(Extrapolation()), m)
    return m, P


class TestMinmod:
    @pytest.mark.parametrize("args, out", [((1, 2, 3), 1), ((-1, 2, 3), 0), ((-3, -2, -1), -1),
                                           ((0, 1, 2), 0), ((2, 1, 3), 1)])
    def test_examples(self, args, out):
        assert recon.minmod3(*args) == out

    @given(finite, finite, finite)
    def test_bounded_and_sign_consistent(self, a, b, c):
        m = float(recon.minmod3(a, b, c))
        assert abs(m) <= min(abs(a), abs(b), abs(c))
        if m != 0:
            assert np.sign(m) == np.sign(a) == np.sign(b) == np.sign(c)

    @given(finite, finite, finite)
    def test_symmetric(self, a, b, c):
        assert recon.minmod3(a, b, c) == recon.minmod3(c, a, b) == recon.minmod3(b, c, a)


class TestLimitedSlopes:
    def test_linear_field(self):
        m, P = padded_line([0.0, 1.0, 2.0, 3.0, 4.0])
        s = recon.limited_slopes(P, m, 0, alpha=1.0, middle=np.ones((4, 5, 1)))
        np.testing.assert_allclose(s[0, 1:-1, 0], 1.0)

    def test_extremum(self):
        m, P = padded_line([0.0, 1.0, 0.0])
        s = recon.limited_slopes(P, m, 0, alpha=1.3)
        assert s[0, 1, 0] == 0.0

    def test_middle_argument(self):
        m, P = padded_line([0.0, 1.0, 3.0])
        mid = np.full((4, 3, 1), 2.0)
        s = recon.limited_slopes(P, m, 0, alpha=1.3, middle=mid)
        # minmod3(1.3 * 2, 2, 1.3 * 1)
        assert s[0, 1, 0] == pytest.approx(1.3)

    def test_first_step_uses_central_middle(self):
        m, P = padded_line([0.0, 1.0, 3.0])
        s = recon.limited_slopes(P, m, 0, alpha=1.3)
        assert s[0, 1, 0] == pytest.approx(1.3)
        m, P = padded_line([0.0, 1.0, 1.5])
        s = recon.limited_slopes(P, m, 0, alpha=2.0)
        assert s[0, 1, 0] == pytest.approx(0.75)

    def test_tvd_random_triples(self):
        rng = np.random.default_rng(3)
        for alpha in (1.0, 1.3, 2.0):
            triples = rng.normal(size=(1000, 3))
            mids = rng.normal(size=1000) * 3
            for (a, b, c), mid in zip(triples, mids):
                m, P = padded_line([a, b, c])
                s = recon.limited_slopes(P, m, 0, alpha, middle=np.full((4, 3, 1), mid))[0, 1, 0]
                left, right = b - 0.5 * s, b + 0.5 * s
                assert min(a, b) - 1e-12 <= left <= max(a, b) + 1e-12
                assert min(b, c) - 1e-12 <= right <= max(b, c) + 1e-12

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(1.0, 1.99))
    @settings(max_examples=50, deadline=None)
    def test_affine_exactness(self, c0, cx, cy, alpha):
        m = Mesh(np.cumsum(np.r_[0, np.random.default_rng(1).uniform(0.5, 1.5, 6)]),
                 np.linspace(0, 2, 6))
        X, Y = np.meshgrid(m.xc_padded, m.yc_padded, indexing="ij")
        P = np.broadcast_to(c0 + cx * X + cy * Y, (4,) + X.shape).copy()
        for axis, slope in ((0, cx), (1, cy)):
            mid = np.full((4, m.nx, m.ny), slope)
            lim = recon.limited_slopes(P, m, axis, alpha, middle=mid)
            np.testing.assert_allclose(lim, slope, atol=1e-13 * max(1, abs(c0) + 10 * (abs(cx) + abs(cy))))
        # central differences are exact on uniform spacing
        np.testing.assert_allclose(recon.central_slopes(P, m, 1), cy, atol=1e-12)

    def test_constant_field_zero_slopes(self):
        m = uniform_mesh(4, 3)
        P = np.full((4, 4 + 2 * G, 3 + 2 * G), 2.7)
        for axis in (0, 1):
            assert np.all(recon.limited_slopes(P, m, axis) == 0)
            assert np.all(recon.central_slopes(P, m, axis) == 0)
        faces = np.full((4, 5, 3), 2.7)
        assert np.all(recon.grp_cell_slopes(faces, m.dx, 0) == 0)


class TestCentralSlopes:
    def test_linear(self):
        m, P = padded_line([1.0, 3.0, 5.0, 7.0], dx=2.0)
        np.testing.assert_allclose(recon.central_slopes(P, m, 0)[0, 1:-1, 0], 1.0)

    def test_quadratic_at_origin(self):
        m, P = padded_line([1.0, 0.0, 1.0])
        assert recon.central_slopes(P, m, 0)[0, 1, 0] == 0.0

    def test_example(self):
        m, P = padded_line([1.0, 2.0, 4.0])
        assert recon.central_slopes(P, m, 0)[0, 1, 0] == pytest.approx(1.5)


class TestGrpSlopes:
    def test_equal_faces(self):
        assert np.all(recon.grp_cell_slopes(np.ones((4, 3, 2)), np.array([0.5, 0.5]), 0) == 0)

    def test_example(self):
        faces = np.zeros((4, 2, 1))
        faces[:, 0], faces[:, 1] = 1.0, 2.0
        np.testing.assert_allclose(recon.grp_cell_slopes(faces, np.array([0.5]), 0), 2.0)

    def test_y_direction(self):
        faces = np.zeros((4, 1, 3))
        faces[:, :, 1], faces[:, :, 2] = 1.0, 4.0
        np.testing.assert_allclose(recon.grp_cell_slopes(faces, np.array([1.0, 0.5]), 1)[0, 0],
                                   [1.0, 6.0])


class TestTraces:
    def test_zero_slope(self):
        assert recon.interface_extrapolation(1.5, 0.0, 0.3) == 1.5

    def test_left_face(self):
        assert recon.interface_extrapolation(1.0, 2.0, -0.25) == 0.5

    def test_linear_data_agree(self):
        m = Mesh(np.array([0.0, 0.5, 1.5, 2.0, 3.0]), np.linspace(0, 1, 3))
        X, Y = np.meshgrid(m.xc_padded, m.yc_padded, indexing="ij")
        P = np.broadcast_to(1 + 2 * X - Y, (4,) + X.shape).copy()
        S = np.full_like(P, 2.0)
        QL, QR = recon.face_traces(P, S, m, 0)
        np.testing.assert_allclose(QL, QR, atol=1e-14)
        np.testing.assert_allclose(QL[0, :, 0], 1 + 2 * m.x_faces - m.yc[0], atol=1e-14)

    def test_face_neighbors_shape(self):
        m = uniform_mesh(3, 2)
        S = np.arange(4 * 7 * 6, dtype=float).reshape(4, 7, 6)
        L, R = recon.face_neighbors(S, m, 1)
        assert L.shape == R.shape == (4, 3, 3)
        np.testing.assert_array_equal(R[:, :, :-1], L[:, :, 1:])
