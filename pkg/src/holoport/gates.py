"""One- and two-qubit gates, ideal and with area-error imperfections.

The Hadamard family is the reflection ``[[cos S, sin S], [sin S, -cos S]]``
with S = pi/4 + eps; its first-order form is ``U_H + eps * h`` with
``h = [[-1, 1], [1, 1]] / sqrt(2)``.  The imperfect controlled-not is the
first-order form ``U_CN - i delta |1><1| (x) 1`` (projector on the control);
the exact-exponential completion with the same derivative is the controlled
over-rotation ``|0><0| (x) 1 + |1><1| (x) exp(-i delta X) X``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .linalg import I2, P0, P1, PAULI_X, kron, max_norm
from . import manifold
from .areas import enclosed_rotation_angle

FIRST_ORDER_LIMIT = 0.2

SQRT2 = math.sqrt(2.0)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
HADAMARD_ERROR_TERM = np.array([[-1, 1], [1, 1]], dtype=complex) / SQRT2


@dataclass(frozen=True)
class GateErrorParams:
    """Area-error pair for the two gate families plus a dissipation strength.

    First-order gate forms are only trustworthy for |epsilon|, |delta|
    <= 0.2; construction enforces the guard unless ``exact`` is set (the
    exact-exponential gate modes stay unitary at any value).
    """

    epsilon: float = 0.0
    delta: float = 0.0
    lam: float = 0.0
    exact: bool = False

    def __post_init__(self):
        if not self.exact:
            if abs(self.epsilon) > FIRST_ORDER_LIMIT or abs(self.delta) > FIRST_ORDER_LIMIT:
                raise ValueError(
                    f"|epsilon|, |delta| must be <= {FIRST_ORDER_LIMIT} in first-order mode")
        if self.lam < 0:
            raise ValueError("dissipation strength must be >= 0")


def reflection(angle: float) -> np.ndarray:
    """[[cos a, sin a], [sin a, -cos a]] — the Hadamard family member at a."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def hadamard_ideal() -> np.ndarray:
    return HADAMARD.copy()


def hadamard_imperfect(eps: float, mode: str = "first-order") -> np.ndarray:
    if mode == "first-order":
        if abs(eps) > FIRST_ORDER_LIMIT:
            raise ValueError(f"first-order mode requires |eps| <= {FIRST_ORDER_LIMIT}")
        return HADAMARD + eps * HADAMARD_ERROR_TERM
    if mode == "exact-area":
        return reflection(math.pi / 4 + eps)
    raise ValueError(f"unknown mode {mode!r}")


def cnot_ideal() -> np.ndarray:
    return kron(P0, I2) + kron(P1, PAULI_X)


def cnot_imperfect(delta: float, mode: str = "first-order") -> np.ndarray:
    """Control-not with area error delta on the controlled rotation.

    ``first-order``: U_CN - i delta |1><1| (x) 1, exactly the first-order
    expression (so U_CN(delta)|10> = |11> - i delta |10>).
    ``exact``: the unitary controlled-(exp(-i delta X) X) with the same
    first derivative.
    """
    if mode == "first-order":
        if abs(delta) > FIRST_ORDER_LIMIT:
            raise ValueError(f"first-order mode requires |delta| <= {FIRST_ORDER_LIMIT}")
        return cnot_ideal() - 1j * delta * kron(P1, I2)
    if mode == "exact":
        c, s = math.cos(delta), math.sin(delta)
        over = (c * I2 - 1j * s * PAULI_X) @ PAULI_X
        return kron(P0, I2) + kron(P1, over)
    raise ValueError(f"unknown mode {mode!r}")


def phase_gate_from_c1(sigma1: float) -> np.ndarray:
    """diag(exp(-i Sigma1), 1) — the abelian phase gate of a C1 loop."""
    return np.diag([np.exp(-1j * sigma1), 1.0]).astype(complex)


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over phi of ||exp(i phi) A - B||_max (global-phase equivalence)."""
    tr = np.trace(b.conj().T @ a)
    seed = -np.angle(tr) if abs(tr) > 1e-14 else 0.0

    def cost(phi):
        return max_norm(np.exp(1j * phi) * a - b)

    res = minimize_scalar(cost, bounds=(seed - 0.5, seed + 0.5),
                          method="bounded", options={"xatol": 1e-14})
    return float(min(cost(seed), res.fun))


def synthesize_hadamard(steps: int = manifold.VERIFY_STEPS):
    """Hadamard from loops: the pi/4 rotation loop composed with a Sigma1 = pi
    phase loop, both integrated numerically on the n=2 model.

    Returns ``(matrix, info)``; the composition order with the phase
    correction applied first (rightmost) is the one equivalent to the
    ideal Hadamard up to a global phase, and is the one returned.
    """
    rot_loop = manifold.c3_loop(math.pi / 4, math.pi / 2, steps=steps)
    assert abs(enclosed_rotation_angle(rot_loop) - math.pi / 4) < 1e-12
    phase_loop = manifold.c1_loop(math.pi / 2, math.pi, steps=steps)
    rot = manifold.holonomy(rot_loop, error_estimate=False).matrix
    phase = manifold.holonomy(phase_loop, error_estimate=False).matrix
    candidates = {
        "rotation @ phase": rot @ phase,
        "phase @ rotation": phase @ rot,
    }
    dists = {k: phase_distance(m, HADAMARD) for k, m in candidates.items()}
    order = min(dists, key=dists.get)
    info = {"order": order, "phase_distance": dists[order],
            "rejected_distance": max(dists.values()), "steps": steps}
    return candidates[order], info
