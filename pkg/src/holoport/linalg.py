"""Dense complex matrix backbone.

Everything downstream (control-manifold integration, circuit assembly,
channels) works on plain ``numpy.ndarray`` values with ``complex128``
entries.  Qubit registers use the convention that **qubit 1 is the most
significant bit** of the computational basis label, i.e. basis index
``b`` of an ``n``-qubit register carries the bit string
``(b >> (n-1)) & 1, ..., b & 1`` on qubits ``1..n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def max_norm(a: np.ndarray) -> float:
    """Entrywise max-modulus norm (the tolerance norm used throughout)."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(*matrices: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not matrices:
        raise ValueError("kron requires at least one factor")
    return reduce(np.kron, matrices)


def unitarity_defect(u: np.ndarray) -> float:
    return max_norm(dagger(u) @ u - np.eye(u.shape[0]))


def assert_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: ||U^dag U - I||_max = {defect:.3e} > {tol:.1e}")


def expm_anti_hermitian(g: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """exp(G) for anti-Hermitian G via eigendecomposition of the Hermitian iG.

    Exact (to roundoff) at the matrix dimensions used here, unlike a
    truncated series.  Rejects input with ``||G + G^dag||_max > tol``.
    """
    g = np.asarray(g, dtype=complex)
    defect = max_norm(g + dagger(g))
    if defect > tol:
        raise ValueError(
            f"generator is not anti-Hermitian: ||G + G^dag||_max = {defect:.3e} > {tol:.1e}")
    w, v = np.linalg.eigh(1j * g)
    return (v * np.exp(-1j * w)) @ dagger(v)


def expm_anti_hermitian_batch(g: np.ndarray) -> np.ndarray:
    """Batched exp(G) over the leading axes of ``g`` (shape (..., m, m)).

    No anti-Hermiticity check; callers construct the generators themselves.
    """
    w, v = np.linalg.eigh(1j * g)
    phases = np.exp(-1j * w)
    return np.einsum("...ik,...k,...jk->...ij", v, phases, v.conj())


@dataclass(frozen=True)
class QubitRegister:
    """Fixed-size qubit register; qubit 1 is the most significant bit."""

    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("register needs at least one qubit")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def index_of(self, bits) -> int:
        bits = tuple(bits)
        if len(bits) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} bits, got {len(bits)}")
        idx = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            idx = (idx << 1) | b
        return idx

    def bits_of(self, index: int):
        if not 0 <= index < self.dim:
            raise ValueError("basis label out of range")
        return tuple((index >> (self.n_qubits - q)) & 1 for q in range(1, self.n_qubits + 1))


def embed(gate: np.ndarray, targets, register: QubitRegister | int) -> np.ndarray:
    """Embed ``gate`` so it acts on ``targets`` (1-based) and as identity elsewhere.

    ``targets`` is ordered: the first target receives the gate's most
    significant factor.
    """
    n = register.n_qubits if isinstance(register, QubitRegister) else int(register)
    targets = tuple(int(t) for t in targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate targets {targets}")
    if any(not 1 <= t <= n for t in targets):
        raise ValueError(f"targets {targets} outside register of {n} qubits")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2 ** k, 2 ** k):
        raise ValueError(f"gate shape {gate.shape} does not match {k} targets")
    if k == n and targets == tuple(range(1, n + 1)):
        return gate.copy()
    rest = [q for q in range(1, n + 1) if q not in targets]
    full = np.kron(gate, np.eye(2 ** (n - k), dtype=complex))
    # full's tensor axes are ordered (targets..., rest...); permute to 1..n
    order = list(targets) + rest
    perm = [order.index(q) for q in range(1, n + 1)]
    tens = full.reshape([2] * (2 * n))
    tens = tens.transpose(perm + [p + n for p in perm])
    return np.ascontiguousarray(tens.reshape(2 ** n, 2 ** n))
