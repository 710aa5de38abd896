import math

import pytest
from scipy.integrate import dblquad

from holoport.areas import (area, enclosed_rotation_angle, flux_sensitivity,
                            perturbed_area, perturbed_area_gradient)
from holoport.manifold import LoopSpec, c1_loop, c3_loop, squeezed_loop

HADAMARD_RECT = c3_loop(math.pi / 2, math.pi / 4)   # {theta_1 <= pi/2, theta_2 <= pi/4}
CN_RECT = c3_loop(math.pi / 2, math.pi / 2)


def quad_oracle(integrand, bounds):
    (lo1, hi1), (lo2, hi2) = bounds
    val, err = dblquad(lambda y, x: integrand(x, y), lo1, hi1, lo2, hi2,
                       epsabs=1e-12, epsrel=1e-12)
    assert err < 1e-9
    return val


class TestArea:
    def test_hadamard_rectangle_first_axis_cosine(self):
        assert abs(area(HADAMARD_RECT, "plane-cosine", axis=0) - math.pi / 4) < 1e-15

    def test_c1_rectangle_sphere(self):
        loop = c1_loop(math.pi / 2, math.pi)
        assert abs(area(loop, "sphere-cosine") - math.pi) < 1e-14

    def test_squeezed_closed_form(self):
        loop = squeezed_loop(1.3, 0.2, 2.5)
        want = 1.3 * (math.exp(-0.4) - math.exp(-5.0))
        assert abs(area(loop) - want) < 1e-14

    def test_against_quadrature(self):
        # independent numerical-integration oracle for all three kinds
        loop = LoopSpec(n=2, plane=("theta_1", "theta_2"),
                        bounds=((0.2, 1.4), (0.1, 1.0)), steps=32)
        assert abs(area(loop, "plane-cosine", axis=0)
                   - quad_oracle(lambda x, y: math.cos(x), loop.bounds)) < 1e-10
        assert abs(area(loop, "plane-cosine", axis=1)
                   - quad_oracle(lambda x, y: math.cos(y), loop.bounds)) < 1e-10
        sphere = LoopSpec(n=1, plane=("theta_1", "phi_1"),
                          bounds=((0.2, 1.2), (0.3, 2.0)), steps=32)
        assert abs(area(sphere, "sphere-cosine")
                   - quad_oracle(lambda x, y: math.sin(2 * x), sphere.bounds)) < 1e-10
        sq = squeezed_loop(0.7, 0.1, 3.0)
        assert abs(area(sq)
                   - quad_oracle(lambda x, y: 2 * math.exp(-2 * y), sq.bounds)) < 1e-10

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            area(HADAMARD_RECT, "volume")

    def test_engine_angle_uses_second_axis(self):
        loop = c3_loop(math.pi / 4, math.pi / 2)
        assert abs(enclosed_rotation_angle(loop) - math.pi / 4) < 1e-15
        with pytest.raises(ValueError, match="engine"):
            enclosed_rotation_angle(squeezed_loop(1.0, 0.0, 2.0))


class TestPerturbedArea:
    def test_hadamard_alpha_insensitive(self):
        da, db = perturbed_area_gradient(HADAMARD_RECT, "plane-cosine", axis=0)
        assert abs(da) <= 1e-12
        assert abs(db - 1.0) <= 1e-12

    def test_hadamard_beta_first_order(self):
        beta = 1e-3
        got = perturbed_area(HADAMARD_RECT, 0.0, beta, "plane-cosine", axis=0)
        assert abs(got - (math.pi / 4 + beta)) < 1e-12

    def test_cn_rectangle_delta_shift(self):
        delta = 0.05
        got = perturbed_area(CN_RECT, 0.0, delta, "plane-cosine", axis=0)
        assert abs(got - (math.pi / 2 + delta)) < 1e-14

    def test_gradient_matches_finite_difference(self):
        h = 1e-6
        for kind, axis in (("plane-cosine", 0), ("plane-cosine", 1),
                           ("sphere-cosine", 0)):
            loop = (c1_loop(1.0, 1.2) if kind == "sphere-cosine"
                    else c3_loop(1.0, 0.8))
            da, db = perturbed_area_gradient(loop, kind, axis)
            fa = (perturbed_area(loop, h, 0, kind, axis)
                  - perturbed_area(loop, -h, 0, kind, axis)) / (2 * h)
            fb = (perturbed_area(loop, 0, h, kind, axis)
                  - perturbed_area(loop, 0, -h, kind, axis)) / (2 * h)
            assert abs(da - fa) < 1e-8
            assert abs(db - fb) < 1e-8

    def test_guard_on_large_translations(self):
        with pytest.raises(ValueError, match="0.1"):
            perturbed_area(HADAMARD_RECT, 0.2, 0.0)

    def test_domain_violation(self):
        loop = c3_loop(math.pi - 0.05, 1.0)
        with pytest.raises(ValueError, match="leaves"):
            perturbed_area(loop, 0.1, 0.0)


class TestFluxSensitivity:
    def test_squeezed_far_edge_exponentially_insensitive(self):
        loop = squeezed_loop(1.0, 0.0, 5.0)
        change = flux_sensitivity(loop, "hi2", 0.5)
        assert change <= 1.0 * math.exp(-10.0)
        assert change == pytest.approx(math.exp(-10.0) * (1 - math.exp(-1.0)), rel=1e-12)

    def test_plane_cosine_pi_half_edge_first_order_zero(self):
        # quadratic scaling of the change as the shift shrinks
        c1_change = flux_sensitivity(HADAMARD_RECT, "hi1", 1e-3, "plane-cosine", 0)
        c2_change = flux_sensitivity(HADAMARD_RECT, "hi1", 5e-4, "plane-cosine", 0)
        assert c1_change < 1e-6
        assert c1_change / c2_change == pytest.approx(4.0, rel=1e-2)

    def test_zero_shift(self):
        assert flux_sensitivity(HADAMARD_RECT, "hi2", 0.0) == 0.0

    def test_unknown_edge(self):
        with pytest.raises(ValueError, match="edge"):
            flux_sensitivity(HADAMARD_RECT, "top", 0.1)
