import math

import numpy as np
import pytest

from holoport.areas import enclosed_rotation_angle
from holoport.gates import (GateErrorParams, HADAMARD_ERROR_TERM, cnot_ideal,
                            cnot_imperfect, hadamard_ideal, hadamard_imperfect,
                            phase_distance, phase_gate_from_c1, reflection,
                            synthesize_hadamard)
from holoport.linalg import max_norm, unitarity_defect
from holoport.manifold import LoopSpec, c1_loop, holonomy

SQRT2 = math.sqrt(2)


class TestHadamard:
    def test_entries(self):
        h = hadamard_ideal()
        assert max_norm(np.abs(h) - 1 / SQRT2) < 1e-15
        assert max_norm(h - np.array([[1, 1], [1, -1]]) / SQRT2) < 1e-15

    def test_involution(self):
        h = hadamard_ideal()
        assert max_norm(h @ h - np.eye(2)) < 1e-15

    def test_zero_error_in_both_modes(self):
        for mode in ("first-order", "exact-area"):
            assert max_norm(hadamard_imperfect(0.0, mode) - hadamard_ideal()) < 1e-15

    def test_first_order_unitarity_defect(self):
        for eps in (0.01, 0.05, 0.1):
            u = hadamard_imperfect(eps, "first-order")
            assert unitarity_defect(u) <= 2 * eps * eps

    def test_exact_area_matches_first_order_to_second_order(self):
        eps = 1e-3
        diff = max_norm(hadamard_imperfect(eps, "exact-area")
                        - (hadamard_ideal() + eps * HADAMARD_ERROR_TERM))
        assert diff <= eps * eps

    def test_exact_vs_first_order_constant(self):
        # measured second-order constant C <= 1 on a grid of eps
        for eps in np.linspace(-0.2, 0.2, 9):
            if eps == 0:
                continue
            diff = max_norm(hadamard_imperfect(eps, "exact-area")
                            - hadamard_imperfect(eps, "first-order"))
            assert diff <= 1.0 * eps * eps

    def test_first_order_guard(self):
        with pytest.raises(ValueError, match="0.2"):
            hadamard_imperfect(0.3, "first-order")
        hadamard_imperfect(0.3, "exact-area")   # exact mode has no guard

    def test_error_term_is_area_derivative(self):
        h = 1e-6
        fd = (reflection(math.pi / 4 + h) - reflection(math.pi / 4 - h)) / (2 * h)
        assert max_norm(fd - HADAMARD_ERROR_TERM) < 1e-9


class TestCnot:
    def test_zero_error(self):
        assert max_norm(cnot_imperfect(0.0) - cnot_ideal()) < 1e-15

    def test_action_on_control_one(self):
        # U_CN(d)|10> = |11> - i d |10>: the error term is the projector on
        # the control, so the deviation stays in the |10> component
        d = 0.05
        vec = np.zeros(4, dtype=complex)
        vec[0b10] = 1.0
        out = cnot_imperfect(d) @ vec
        want = np.zeros(4, dtype=complex)
        want[0b11] = 1.0
        want[0b10] = -1j * d
        assert max_norm(out - want) < 1e-15

    def test_first_order_unitarity_defect(self):
        for d in (0.01, 0.05, 0.2):
            assert unitarity_defect(cnot_imperfect(d)) <= 2 * d * d

    def test_exact_mode_unitary_at_large_delta(self):
        u = cnot_imperfect(0.7, "exact")
        assert unitarity_defect(u) < 1e-14
        fd = max_norm(cnot_imperfect(1e-4, "exact") - cnot_imperfect(1e-4))
        assert fd < 1e-7

    def test_first_order_guard(self):
        with pytest.raises(ValueError, match="0.2"):
            cnot_imperfect(0.25)


class TestGateErrorParams:
    def test_guard(self):
        with pytest.raises(ValueError):
            GateErrorParams(epsilon=0.3)
        GateErrorParams(epsilon=0.3, exact=True)
        with pytest.raises(ValueError):
            GateErrorParams(lam=-1.0)


class TestIdealGateUnitarity:
    def test_all_ideal_gates(self):
        for g in (hadamard_ideal(), cnot_ideal(), phase_gate_from_c1(0.37),
                  reflection(1.2)):
            assert unitarity_defect(g) <= 1e-12


class TestPhaseGate:
    def test_full_turn_is_identity(self):
        assert max_norm(phase_gate_from_c1(2 * math.pi) - np.eye(2)) < 1e-15

    def test_pi_gives_diag_minus_one(self):
        assert max_norm(phase_gate_from_c1(math.pi) - np.diag([-1, 1])) < 1e-15

    def test_matches_holonomy_engine(self):
        # a C1 rectangle whose sphere flux equals the requested phase
        sigma = 1.1
        theta_hi = math.asin(math.sqrt(sigma / math.pi))
        loop = c1_loop(theta_hi, math.pi, steps=256)
        got = holonomy(loop, error_estimate=False).matrix
        assert max_norm(got - phase_gate_from_c1(sigma)) < 1e-8


class TestSynthesis:
    def test_equals_hadamard_up_to_phase(self):
        matrix, info = synthesize_hadamard(steps=512)
        assert info["phase_distance"] < 1e-6
        assert phase_distance(matrix, hadamard_ideal()) < 1e-6

    def test_reversed_order_differs(self):
        _, info = synthesize_hadamard(steps=256)
        assert info["order"] == "rotation @ phase"
        assert info["rejected_distance"] > 0.5

    def test_area_perturbed_synthesis(self):
        # rotation loop with flux pi/4 + beta composes to U_H + beta*h up
        # to a global phase, to first order in beta
        beta = 1e-3
        rot_loop = LoopSpec(n=2, plane=("theta_1", "theta_2"),
                            bounds=((0.0, math.pi / 4 + beta), (0.0, math.pi / 2)),
                            steps=512, orientation=-1)
        assert abs(enclosed_rotation_angle(rot_loop) - (math.pi / 4 + beta)) < 1e-14
        rot = holonomy(rot_loop, error_estimate=False).matrix
        phase = holonomy(c1_loop(math.pi / 2, math.pi, steps=512),
                         error_estimate=False).matrix
        got = rot @ phase
        want = hadamard_ideal() + beta * HADAMARD_ERROR_TERM
        assert phase_distance(got, want) < 1e-5


class TestPhaseDistance:
    def test_zero_for_phase_related(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert phase_distance(np.exp(1j * 0.73) * a, a) < 1e-10

    def test_positive_for_unrelated(self):
        assert phase_distance(hadamard_ideal(), np.eye(2)) > 0.5
