import math

import numpy as np
import pytest

from holoport.linalg import dagger, max_norm, unitarity_defect
from holoport.manifold import (ControlPoint, LoopSpec, c1_loop, c2_loop,
                               c3_loop, c4_loop, closed_form_holonomy,
                               connection_at, elliptic_vertices, holonomy,
                               path_holonomy, rectangle_vertices,
                               sheared_vertices, squeezed_loop, unitary_at)

TEST_STEPS = 256


def point(n, thetas, phis):
    return ControlPoint(n=n, thetas=thetas, phis=phis)


class TestUnitaryAt:
    def test_origin_is_identity(self):
        for n in (1, 2, 3):
            p = point(n, [0.0] * n, [0.0] * n)
            assert max_norm(unitary_at(p) - np.eye(n + 1)) < 1e-15

    def test_single_coordinate_rotation(self):
        theta = 0.7
        u = unitary_at(point(1, [theta], [0.0]))
        want = np.array([[math.cos(theta), math.sin(theta)],
                         [-math.sin(theta), math.cos(theta)]])
        assert max_norm(u - want) < 1e-14

    def test_matches_generator_exponential(self):
        # per-factor closed form vs exp(G) by eigendecomposition
        from holoport.linalg import expm_anti_hermitian
        theta, phi = 1.1, 2.3
        z = theta * np.exp(1j * phi)
        g = np.zeros((2, 2), dtype=complex)
        g[0, 1], g[1, 0] = z, -np.conj(z)
        assert max_norm(unitary_at(point(1, [theta], [phi]))
                        - expm_anti_hermitian(g)) < 1e-12

    def test_unitary_at_random_points(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n = int(rng.integers(1, 4))
            p = point(n, rng.uniform(0, math.pi, n), rng.uniform(0, 2 * math.pi, n))
            assert unitarity_defect(unitary_at(p)) < 1e-10


class TestConnection:
    def test_vanishes_at_origin(self):
        p = point(2, [0.0, 0.0], [0.0, 0.0])
        for coord in ("theta_1", "theta_2", "phi_1", "phi_2"):
            assert max_norm(connection_at(p, coord)) < 1e-9

    def test_anti_hermitian_to_fd_order(self):
        rng = np.random.default_rng(3)
        h = 1e-4
        for _ in range(10):
            p = point(2, rng.uniform(0.2, 3.0, 2), rng.uniform(0, 2 * math.pi, 2))
            for coord in ("theta_1", "phi_2"):
                a = connection_at(p, coord, fd_step=h)
                assert max_norm(a + dagger(a)) <= 10 * h * h

    def test_phi_component_against_analytic_derivative(self):
        # symbolic oracle for n=1: U = [[cos t, e^{i p} sin t],
        # [-e^{-i p} sin t, cos t]]; differentiate the entries by hand and
        # contract with U^dag to get the degenerate block
        def symbolic_block(theta, phi):
            c, s, e = math.cos(theta), math.sin(theta), np.exp(1j * phi)
            du = np.array([[0.0, 1j * e * s], [1j * s / e, 0.0]])
            u = np.array([[c, e * s], [-s / e, c]])
            return (u.conj().T @ du)[0, 0]

        for theta, phi in ((math.pi / 2, 0.4), (0.9, 2.2), (0.2, 5.5)):
            a = connection_at(point(1, [theta], [phi]), "phi_1")
            assert abs(a[0, 0] - symbolic_block(theta, phi)) < 1e-9
            assert abs(a[0, 0] - (-1j * math.sin(theta) ** 2)) < 1e-9

    def test_fd_step_bounds(self):
        p = point(1, [0.3], [0.0])
        with pytest.raises(ValueError, match="fd_step"):
            connection_at(p, "theta_1", fd_step=1e-2)

    def test_unknown_coordinate(self):
        with pytest.raises(ValueError, match="coordinate"):
            connection_at(point(1, [0.3], [0.0]), "theta_2")


class TestLoopSpecValidation:
    def test_minimum_steps(self):
        with pytest.raises(ValueError, match="steps"):
            LoopSpec(n=1, plane=("theta_1", "phi_1"),
                     bounds=((0, 1), (0, 1)), steps=8)

    def test_orientation(self):
        with pytest.raises(ValueError, match="orientation"):
            LoopSpec(n=1, plane=("theta_1", "phi_1"),
                     bounds=((0, 1), (0, 1)), orientation=2)

    def test_theta_domain(self):
        with pytest.raises(ValueError, match=r"\[0, pi\]"):
            LoopSpec(n=1, plane=("theta_1", "phi_1"), bounds=((0, 4.0), (0, 1)))

    def test_distinct_plane(self):
        with pytest.raises(ValueError, match="distinct"):
            LoopSpec(n=1, plane=("theta_1", "theta_1"), bounds=((0, 1), (0, 1)))

    def test_kind_inference(self):
        assert c1_loop(1.0, 1.0).kind == "sphere-cosine"
        assert c3_loop(1.0, 1.0).kind == "plane-cosine"
        assert squeezed_loop(1.0, 0.0, 4.0).kind == "squeezed-exponential"

    def test_control_point_count(self):
        with pytest.raises(ValueError, match="count"):
            ControlPoint(n=2, thetas=[0.1], phis=[0.0, 0.0])


class TestHolonomy:
    def test_degenerate_loop_is_identity(self):
        loop = LoopSpec(n=2, plane=("theta_1", "phi_1"),
                        bounds=((0.3, 0.3), (0.0, 2.0)), steps=32)
        res = holonomy(loop)
        assert max_norm(res.matrix - np.eye(2)) < 1e-12
        assert res.error_estimate < 1e-12

    def test_c1_rectangle_matches_closed_form(self):
        loop = c1_loop(math.pi / 3, math.pi / 2, steps=TEST_STEPS)
        res = holonomy(loop)
        assert max_norm(res.matrix - closed_form_holonomy(loop)) < 1e-8
        # sign check: phase is exp(-i Sigma) on |beta> with orientation +1
        sigma = (math.pi / 2) * math.sin(math.pi / 3) ** 2
        assert abs(res.matrix[0, 0] - np.exp(-1j * sigma)) < 1e-8
        assert abs(res.matrix[1, 1] - 1.0) < 1e-8

    def test_c3_rectangle_matches_closed_form(self):
        loop = c3_loop(math.pi / 4, math.pi / 2, steps=TEST_STEPS)
        got = holonomy(loop, error_estimate=False).matrix
        c = math.cos(math.pi / 4)
        want = np.array([[c, -c], [c, c]])
        assert max_norm(got - want) < 1e-8

    def test_c4_rectangle_matches_closed_form(self):
        loop = c4_loop(math.pi / 4, math.pi / 2, steps=TEST_STEPS)
        got = holonomy(loop, error_estimate=False).matrix
        s = math.pi / 4
        want = np.array([[math.cos(s), -1j * math.sin(s)],
                         [-1j * math.sin(s), math.cos(s)]])
        assert max_norm(got - want) < 1e-8

    def test_general_rectangles_match_closed_forms(self):
        # bounds away from the origin: both legs of the varying coordinate
        # contribute, the closed forms still hold exactly
        c1 = LoopSpec(n=2, plane=("theta_1", "phi_1"),
                      bounds=((0.4, 1.2), (0.5, 2.1)), steps=128, orientation=+1)
        c3 = LoopSpec(n=2, plane=("theta_1", "theta_2"),
                      bounds=((0.3, 1.1), (0.2, 1.4)), steps=128, orientation=-1)
        for loop in (c1, c3):
            got = holonomy(loop, error_estimate=False).matrix
            assert max_norm(got - closed_form_holonomy(loop)) < 1e-8

    def test_c2_diagonal_geometry(self):
        # (theta_beta, phi_beta_bar) loop at theta_bb = pi/2, theta spanning
        # [0, pi/2]: diagonal with phase e^{+i Sigma2} on |beta_bar>,
        # Sigma2 = 2 * Delta(phi); the |beta> entry carries the opposite
        # phase rather than staying at 1
        dphi = 0.4
        loop = c2_loop(dphi, steps=TEST_STEPS)
        got = holonomy(loop, error_estimate=False).matrix
        off_diag = got - np.diag(np.diag(got))
        assert max_norm(off_diag) < 1e-8
        assert abs(got[1, 1] - np.exp(+1j * 2 * dphi)) < 1e-8
        assert abs(got[0, 0] - np.exp(-1j * 2 * dphi)) < 1e-8

    def test_result_unitary(self):
        res = holonomy(c3_loop(0.9, 1.1, steps=64), error_estimate=False)
        assert unitarity_defect(res.matrix) <= 1e-8

    def test_orientation_reversal_inverts(self):
        loop = c3_loop(0.8, 1.0, steps=64)
        fwd = holonomy(loop)
        rev = holonomy(LoopSpec(n=2, plane=loop.plane, bounds=loop.bounds,
                                fixed=loop.fixed, steps=64, orientation=+1))
        tol = max(fwd.error_estimate, rev.error_estimate, 1e-10)
        assert max_norm(fwd.matrix - dagger(rev.matrix)) < 10 * tol

    def test_concatenation(self):
        # running C then C' (sharing the base point) equals the product
        # holonomy(C') @ holonomy(C)
        first = LoopSpec(n=2, plane=("theta_1", "theta_2"),
                         bounds=((0.0, 0.7), (0.0, 0.5)), steps=64)
        second = LoopSpec(n=2, plane=("theta_1", "phi_1"),
                          bounds=((0.0, 0.4), (0.0, 0.9)), steps=64)
        va = rectangle_vertices(first)
        vb = rectangle_vertices(second)
        joint = np.vstack([va, vb[1:]])
        got = path_holonomy(2, joint)
        want = path_holonomy(2, vb) @ path_holonomy(2, va)
        assert max_norm(got - want) < 1e-10

    def test_equal_area_rectangles_same_gate(self):
        # two rectangles with the same cos(theta_2) flux give the same gate
        a = c3_loop(math.pi / 4, math.pi / 2, steps=128)
        width = (math.pi / 4) / math.sin(math.pi / 6)
        b = LoopSpec(n=2, plane=("theta_1", "theta_2"),
                     bounds=((0.0, width), (0.0, math.pi / 6)),
                     steps=128, orientation=-1)
        ga = holonomy(a, error_estimate=False).matrix
        gb = holonomy(b, error_estimate=False).matrix
        assert max_norm(ga - gb) < 1e-8

    def test_sheared_loop_preserves_gate(self):
        loop = c3_loop(math.pi / 4, math.pi / 2, steps=128)
        sheared = path_holonomy(2, sheared_vertices(loop, 0.35))
        assert max_norm(sheared - closed_form_holonomy(loop)) < 1e-8

    def test_convergence_order_on_elliptic_paths(self):
        # axis-aligned rectangle legs see a constant connection and are
        # integrated exactly; the inscribed ellipse exposes the order
        for loop in (c1_loop(math.pi / 3, math.pi / 2),
                     c3_loop(math.pi / 4, math.pi / 2)):
            ref = path_holonomy(2, elliptic_vertices(loop, 2048))
            e1 = max_norm(path_holonomy(2, elliptic_vertices(loop, 64)) - ref)
            e2 = max_norm(path_holonomy(2, elliptic_vertices(loop, 128)) - ref)
            assert math.log2(e1 / e2) >= 1.0

    def test_error_estimate_bounds_true_error(self):
        loop = c1_loop(math.pi / 3, math.pi / 2, steps=64)
        res = holonomy(loop)
        true_err = max_norm(res.matrix - closed_form_holonomy(loop))
        assert res.error_estimate < 1e-8
        assert true_err < 1e-8

    def test_open_path_rejected(self):
        verts = rectangle_vertices(c1_loop(1.0, 1.0, steps=16))[:-1]
        with pytest.raises(ValueError, match="closed"):
            path_holonomy(2, verts)

    def test_optical_loop_rejected(self):
        with pytest.raises(ValueError, match="optical"):
            rectangle_vertices(squeezed_loop(1.0, 0.0, 5.0))


class TestClosedForms:
    def test_c1_requires_zero_spectators(self):
        loop = LoopSpec(n=2, plane=("theta_1", "phi_1"),
                        bounds=((0.0, 1.0), (0.0, 1.0)),
                        fixed={"theta_2": 0.5}, steps=32)
        assert closed_form_holonomy(loop) is None

    def test_c2_off_template_returns_none(self):
        loop = LoopSpec(n=2, plane=("theta_1", "phi_2"),
                        bounds=((0.0, 1.0), (0.0, 1.0)), steps=32)
        assert closed_form_holonomy(loop) is None

    def test_squeezed_has_no_closed_form(self):
        assert closed_form_holonomy(squeezed_loop(1.0, 0.0, 5.0)) is None
