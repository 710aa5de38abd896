"""Kraus channels, the dissipative circuit map, and entangled-fraction bounds.

Dissipation acts on the receiving qubit (qubit 3) between the state
preparation and the circuit: the map is

    mu(rho) = U(delta, eps) . s_lam(rho) . U(delta, eps)^dag ,
    s_lam(rho) = sum_i W_i rho W_i^dag,   W_i = 1 (x) 1 (x) V_i ,

the commuted form of interleaving the channel between Alice's and Bob's
gate groups (the interleaved form is retained as a consistency check).
The dissipative branch fidelity is the trace overlap
``Tr[ mu(|Psi><Psi| (x) P_EPR) |x y Psi><x y Psi| ]`` minimized over the
Bloch sphere, evaluated here entirely in density-operator form — an
independent route from the state-vector amplitudes of
:mod:`holoport.teleport`, against which it is cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import dagger, embed, kron, max_norm
from .optimize import minimize_bloch
from .teleport import (EPR, FidelityReport, alice_bob_split, build_teleport,
                       payload_with_epr)

COMPLETENESS_TOL = 1e-12

EPR_PROJECTOR = np.outer(EPR, EPR.conj())


@dataclass(frozen=True)
class KrausChannel:
    """Single-qubit operator-sum map; operators must satisfy sum V^dag V = 1."""

    ops: tuple
    lam: float = 0.0

    def __post_init__(self):
        ops = tuple(np.asarray(v, dtype=complex) for v in self.ops)
        object.__setattr__(self, "ops", ops)
        if self.lam < 0:
            raise ValueError("dissipation strength must be >= 0")
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        total = sum(dagger(v) @ v for v in ops)
        defect = max_norm(total - np.eye(dim))
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness violated: {defect:.3e}")


def phase_damping(lam: float) -> KrausChannel:
    """The two-operator dephasing channel diag(1, e^-lam), diag(0, sqrt(1-e^-2lam)).

    At lam = 0 this is {identity, 0}; coherences decay as e^-lam while
    populations are untouched.
    """
    if lam < 0:
        raise ValueError("dissipation strength must be >= 0")
    q = math.exp(-lam)
    v1 = np.diag([1.0, q]).astype(complex)
    v2 = np.diag([0.0, math.sqrt(max(0.0, 1.0 - q * q))]).astype(complex)
    return KrausChannel(ops=(v1, v2), lam=lam)


def validate_density(rho: np.ndarray, trace_tol: float = 1e-12,
                     eig_tol: float = 1e-10) -> None:
    rho = np.asarray(rho)
    if abs(np.trace(rho) - 1.0) > trace_tol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if max_norm(rho - dagger(rho)) > 1e-10:
        raise ValueError("density operator is not Hermitian")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -eig_tol:
        raise ValueError(f"negative eigenvalue {w.min():.3e}")


def apply_channel(rho: np.ndarray, channel: KrausChannel, target: int) -> np.ndarray:
    """sum_i (embedded V_i) rho (embedded V_i)^dag on the given qubit."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    n = int(round(math.log2(dim)))
    if 2 ** n != dim or rho.shape != (dim, dim):
        raise ValueError("rho must be square with power-of-two dimension")
    if not 1 <= target <= n:
        raise ValueError(f"target {target} outside register of {n} qubits")
    out = np.zeros_like(rho)
    for v in channel.ops:
        w = embed(v, (target,), n)
        out += w @ rho @ dagger(w)
    return out


def initial_state(psi: np.ndarray) -> np.ndarray:
    """rho_I = |Psi><Psi| (x) P_EPR on the three-qubit register."""
    psi = np.asarray(psi, dtype=complex)
    return kron(np.outer(psi, psi.conj()), EPR_PROJECTOR)


def povm_map(rho_i: np.ndarray, delta: float, eps: float, lam: float,
             mode: str = "first-order") -> np.ndarray:
    """mu(rho) = U . s_lam(rho) . U^dag, channel on qubit 3 (simplified form)."""
    if rho_i.shape != (8, 8):
        raise ValueError("rho_i must act on three qubits")
    u = build_teleport(delta, eps, mode)
    damped = apply_channel(rho_i, phase_damping(lam), target=3)
    return u @ damped @ dagger(u)


def povm_map_interleaved(rho_i: np.ndarray, delta: float, eps: float, lam: float,
                         mode: str = "first-order") -> np.ndarray:
    """sum_i Ad(U_Bob) Ad(W_i) Ad(U_Alice) rho — the uncommuted form.

    Equal to :func:`povm_map` because the channel on qubit 3 commutes with
    Alice's gates (slots 1-2, qubits 1-2 only); kept as a consistency
    surface.
    """
    alice, bob = alice_bob_split(delta, eps, mode)
    rotated = alice @ rho_i @ dagger(alice)
    damped = apply_channel(rotated, phase_damping(lam), target=3)
    return bob @ damped @ dagger(bob)


def _mu_batch(psis: np.ndarray, delta: float, eps: float, lam: float,
              mode: str) -> np.ndarray:
    """mu(rho_I) for a (2, M) stack of payloads, shape (M, 8, 8)."""
    u = build_teleport(delta, eps, mode)
    ch = phase_damping(lam)
    ws = [embed(v, (3,), 3) for v in ch.ops]
    basis_kets = [payload_with_epr(np.eye(2)[j].astype(complex)) for j in (0, 1)]
    kets = (psis[0][:, None] * basis_kets[0][None, :]
            + psis[1][:, None] * basis_kets[1][None, :])
    rho = np.einsum("mi,mj->mij", kets, kets.conj())
    damped = np.zeros_like(rho)
    for w in ws:
        damped += np.einsum("ij,mjk,lk->mil", w, rho, w.conj())
    return np.einsum("ij,mjk,lk->mil", u, damped, u.conj())


def _branch_value_batch(mu: np.ndarray, psis: np.ndarray, x: int, y: int) -> np.ndarray:
    bra = np.zeros((psis.shape[1], 8), dtype=complex)
    base = 4 * x + 2 * y
    bra[:, base] = psis[0]
    bra[:, base + 1] = psis[1]
    return np.einsum("mi,mij,mj->m", bra.conj(), mu, bra).real


def dissipative_fidelity(delta: float, eps: float, lam: float,
                         mode: str = "first-order",
                         grid_n: int = 64) -> FidelityReport:
    """Branch-minimized trace-overlap fidelity of the dissipative circuit.

    At lam = 0 this coincides with :func:`holoport.teleport.fidelity`
    (trace overlap with a pure projector equals the squared amplitude);
    the two are computed through independent routes.
    """
    if lam < 0:
        raise ValueError("dissipation strength must be >= 0")
    u = build_teleport(delta, eps, mode)
    ch = phase_damping(lam)

    def make_fns(x, y):
        def batch(psis):
            mu = _mu_batch(psis, delta, eps, lam, mode)
            return _branch_value_batch(mu, psis, x, y)

        def scalar(theta, phi):
            psi = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
            mu = u @ apply_channel(initial_state(psi), ch, 3) @ dagger(u)
            bra = kron(np.eye(2)[x].astype(complex), np.eye(2)[y].astype(complex), psi)
            return float((bra.conj() @ mu @ bra).real)

        return batch, scalar

    per_branch, argmin, iters, sizes, conv = {}, {}, {}, {}, {}
    for x in (0, 1):
        for y in (0, 1):
            batch, scalar = make_fns(x, y)
            out = minimize_bloch(batch, scalar, grid_n)
            per_branch[(x, y)] = out.value
            argmin[(x, y)] = out.params
            iters[(x, y)] = out.iterations
            sizes[(x, y)] = out.simplex_size
            conv[(x, y)] = out.converged
    return FidelityReport(sum(per_branch.values()), per_branch, argmin,
                          iters, sizes, conv, mode, False)


def entangled_fraction(rho: np.ndarray) -> float:
    """Overlap <EPR| rho |EPR> of a two-qubit state with the entangled projector.

    Evaluated for the state as given: the caller applies whatever local
    channel is under study first (maximizing over all local channels is a
    separate problem and out of scope here).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a two-qubit density operator")
    return float((EPR.conj() @ rho @ EPR).real)


def optimal_fidelity(f: float) -> float:
    """Optimal-protocol teleportation fidelity (2f + 1)/3 from the fraction f.

    This bounds what an adapted protocol could achieve through the shared
    state; it beats classical communication (2/3) whenever f > 1/2.  It is
    a different quantity from the fixed-circuit fidelity computed by
    :func:`dissipative_fidelity`, whose large-damping asymptote is 1/2 —
    the two answer different questions and are deliberately not reconciled.
    """
    return (2.0 * f + 1.0) / 3.0
