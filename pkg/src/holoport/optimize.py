"""Derivative-free minimization over pure-state manifolds.

One-qubit payloads are minimized over the Bloch sphere with a coarse
64 x 64 (theta, phi) grid seed followed by Nelder-Mead refinement;
two-qubit payloads over a 6-parameter chart (three nesting angles, three
relative phases) seeded by an unscrambled Sobol sequence capped at 4096
points.  Everything is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

GRID_N = 64
NM_MAXITER = 500
NM_FATOL = 1e-12
NM_XATOL = 1e-8
SOBOL_CAP = 4096
NM_MAXITER_6D = 2000


@dataclass(frozen=True)
class MinimizeOutcome:
    value: float
    params: tuple
    iterations: int
    simplex_size: float
    converged: bool


def bloch_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


@lru_cache(maxsize=8)
def _bloch_grid(n: int):
    thetas = np.linspace(0.0, np.pi, n)
    phis = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    t, p = tt.ravel(), pp.ravel()
    psis = np.stack([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)])
    return t, p, psis


def minimize_bloch(batch_fn, scalar_fn, grid_n: int = GRID_N) -> MinimizeOutcome:
    """Grid seed + Nelder-Mead over (theta, phi).

    ``batch_fn`` maps a (2, M) stack of states to M values; ``scalar_fn``
    maps (theta, phi) to a value.
    """
    t, p, psis = _bloch_grid(grid_n)
    vals = np.asarray(batch_fn(psis))
    i = int(np.argmin(vals))
    res = minimize(lambda x: scalar_fn(x[0], x[1]), [t[i], p[i]],
                   method="Nelder-Mead",
                   options={"fatol": NM_FATOL, "xatol": NM_XATOL,
                            "maxiter": NM_MAXITER})
    spread = float(np.ptp(res.final_simplex[1])) if res.final_simplex else float("nan")
    if res.fun <= vals[i]:
        return MinimizeOutcome(float(res.fun), (float(res.x[0]), float(res.x[1])),
                               int(res.nit), spread, bool(res.success))
    return MinimizeOutcome(float(vals[i]), (float(t[i]), float(p[i])),
                           int(res.nit), spread, bool(res.success))


def state4(params: np.ndarray) -> np.ndarray:
    """Two-qubit pure state from the 6-parameter chart (global phase fixed)."""
    x1, x2, x3, m1, m2, m3 = params
    s1, c1 = np.sin(x1), np.cos(x1)
    s2, c2 = np.sin(x2), np.cos(x2)
    s3, c3 = np.sin(x3), np.cos(x3)
    return np.array([c1,
                     np.exp(1j * m1) * s1 * c2,
                     np.exp(1j * m2) * s1 * s2 * c3,
                     np.exp(1j * m3) * s1 * s2 * s3])


def _state4_batch(params: np.ndarray) -> np.ndarray:
    x1, x2, x3 = params[:, 0], params[:, 1], params[:, 2]
    m1, m2, m3 = params[:, 3], params[:, 4], params[:, 5]
    s1, c1 = np.sin(x1), np.cos(x1)
    s2, c2 = np.sin(x2), np.cos(x2)
    s3, c3 = np.sin(x3), np.cos(x3)
    return np.stack([c1 + 0j,
                     np.exp(1j * m1) * s1 * c2,
                     np.exp(1j * m2) * s1 * s2 * c3,
                     np.exp(1j * m3) * s1 * s2 * s3])


@lru_cache(maxsize=4)
def _sobol_seed(cap: int):
    eng = qmc.Sobol(d=6, scramble=False)
    u = eng.random(cap)
    params = np.empty_like(u)
    params[:, :3] = u[:, :3] * (np.pi / 2)
    params[:, 3:] = u[:, 3:] * (2 * np.pi)
    return params, _state4_batch(params)


def minimize_state4(batch_fn, scalar_fn, cap: int = SOBOL_CAP) -> MinimizeOutcome:
    """Sobol seed + Nelder-Mead over the 6-parameter two-qubit chart."""
    params, psis = _sobol_seed(cap)
    vals = np.asarray(batch_fn(psis))
    i = int(np.argmin(vals))
    res = minimize(lambda x: scalar_fn(state4(x)), params[i],
                   method="Nelder-Mead",
                   options={"fatol": NM_FATOL, "xatol": NM_XATOL,
                            "maxiter": NM_MAXITER_6D})
    spread = float(np.ptp(res.final_simplex[1])) if res.final_simplex else float("nan")
    if res.fun <= vals[i]:
        return MinimizeOutcome(float(res.fun), tuple(float(v) for v in res.x),
                               int(res.nit), spread, bool(res.success))
    return MinimizeOutcome(float(vals[i]), tuple(float(v) for v in params[i]),
                           int(res.nit), spread, bool(res.success))
