"""Control manifold of iso-spectral transformations and its loop holonomies.

A point of the manifold is a set of complex coordinates ``z_k = theta_k *
exp(i phi_k)`` (k = 1..n) fixing the unitary ``U(z) = U_1(z_1) ... U_n(z_n)``
with ``U_k = exp(G_k)``, ``G_k = z_k |k><n+1| - conj(z_k) |n+1><k|``.  The
degenerate n-dimensional level acquires, after a closed adiabatic loop C, the
holonomy

    Gamma(C) = P exp  integral_C A,     A^mu = <j| U^dag dU/dmu |k>  (j,k <= n)

computed here as an ordered product of per-step exponentials of the
finite-difference-sampled connection (Wilson-line scheme; every partial
product is unitary).  Path ordering accumulates later steps on the left.

Orientation conventions (verified numerically, see the test suite): with
``orientation=+1`` the first plane coordinate is traversed first.  The
closed-form signs quoted for the standard loop families correspond to
orientation +1 for the (theta, phi) families C1/C2 and orientation -1 for
the (theta, theta') families C3/C4; the template constructors below bake
this in.

The planar area integrand that reproduces the engine on (theta, theta')
planes is the cosine of the *second* plane coordinate (the general
definition); the rotation produced by a rectangle [a,b] x [c,d] at zero
phases is exactly (b - a) * (sin d - sin c).  On (theta, phi) planes the
exact abelian phase is the "doubled-angle sphere" area
``Delta_phi * (sin^2 hi - sin^2 lo)``.  See ``holoport.areas``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import expm_anti_hermitian_batch, max_norm

FD_STEP_DEFAULT = 1e-5
FD_STEP_RANGE = (1e-7, 1e-3)
DEFAULT_STEPS = 1024
VERIFY_STEPS = 4096
MIN_STEPS = 16

OPTICAL_COORDS = ("x", "y", "r1")

_COORD_RE = re.compile(r"^(theta|phi)_(\d+)$")


def _parse_coord(coord: str, n: int):
    """Return ('theta'|'phi', zero-based index) for a CP^n coordinate id."""
    m = _COORD_RE.match(coord)
    if not m:
        raise ValueError(f"unknown coordinate id {coord!r}")
    kind, idx = m.group(1), int(m.group(2))
    if not 1 <= idx <= n:
        raise ValueError(f"coordinate {coord!r} outside model with n={n}")
    return kind, idx - 1


def is_optical_plane(plane) -> bool:
    return any(c in OPTICAL_COORDS for c in plane)


@dataclass(frozen=True)
class ControlPoint:
    """A point z of the control manifold, theta_k in [0, pi], phi_k in [0, 2pi).

    ``energy_scale`` is the reference level splitting of the underlying
    Hamiltonian; it plays no dynamical role in the adiabatic limit and is
    carried only as model metadata.
    """

    n: int
    thetas: tuple
    phis: tuple
    energy_scale: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("degeneracy dimension n must be >= 1")
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        if len(self.thetas) != self.n or len(self.phis) != self.n:
            raise ValueError("coordinate count must equal n")
        for t in self.thetas:
            if not -1e-12 <= t <= math.pi + 1e-12:
                raise ValueError(f"theta={t} outside [0, pi]")
        for p in self.phis:
            if not np.isfinite(p):
                raise ValueError("phi must be finite")

    def coordinate(self, coord: str) -> float:
        kind, i = _parse_coord(coord, self.n)
        return self.thetas[i] if kind == "theta" else self.phis[i]


@dataclass(frozen=True)
class LoopSpec:
    """A rectangle loop on a coordinate plane, all other coordinates pinned.

    ``steps`` is the number of discretization steps per edge.  The path is
    closed by construction (first and last polyline points coincide).
    """

    n: int
    plane: tuple
    bounds: tuple              # ((lo1, hi1), (lo2, hi2))
    fixed: dict = field(default_factory=dict)
    steps: int = DEFAULT_STEPS
    orientation: int = 1
    kind: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "plane", tuple(self.plane))
        b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", b)
        object.__setattr__(self, "fixed", dict(self.fixed))
        if len(self.plane) != 2 or self.plane[0] == self.plane[1]:
            raise ValueError("plane must name two distinct coordinates")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.steps < MIN_STEPS:
            raise ValueError(f"steps must be >= {MIN_STEPS}")
        if not all(np.isfinite(v) for pair in b for v in pair):
            raise ValueError("bounds must be finite")
        optical = is_optical_plane(self.plane)
        if optical:
            if not all(c in OPTICAL_COORDS for c in self.plane):
                raise ValueError("optical planes may not mix CP^n coordinates")
        else:
            for c in self.plane:
                _parse_coord(c, self.n)
            for c, v in self.fixed.items():
                _parse_coord(c, self.n)
                if not np.isfinite(v):
                    raise ValueError(f"fixed value for {c!r} must be finite")
            for c, (lo, hi) in zip(self.plane, b):
                kind, _ = _parse_coord(c, self.n)
                if kind == "theta" and not (-1e-12 <= lo and hi <= math.pi + 1e-12):
                    raise ValueError(f"{c} bounds [{lo}, {hi}] leave [0, pi]")
        if self.kind is None:
            object.__setattr__(self, "kind", infer_kind(self.plane))

    def with_steps(self, steps: int) -> "LoopSpec":
        return replace(self, steps=int(steps))

    def fixed_value(self, coord: str) -> float:
        return float(self.fixed.get(coord, 0.0))


def infer_kind(plane) -> str | None:
    if is_optical_plane(plane):
        return "squeezed-exponential"
    k0 = _COORD_RE.match(plane[0])
    k1 = _COORD_RE.match(plane[1])
    if not (k0 and k1):
        return None
    if k0.group(1) == "theta" and k1.group(1) == "phi" and k0.group(2) == k1.group(2):
        return "sphere-cosine"
    if k0.group(1) == "theta" and k1.group(1) == "theta":
        return "plane-cosine"
    return None


@dataclass(frozen=True)
class HolonomyResult:
    """Degenerate-block holonomy with integrator diagnostics."""

    matrix: np.ndarray
    steps: int
    error_estimate: float


# ---------------------------------------------------------------------------
# U(z) and the connection
# ---------------------------------------------------------------------------

def _unitary_batch(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """U(z) for a batch of points; thetas/phis have shape (B, n)."""
    thetas = np.atleast_2d(thetas)
    phis = np.atleast_2d(phis)
    batch, n = thetas.shape
    dim = n + 1
    u = np.zeros((batch, dim, dim), dtype=complex)
    u[:, range(dim), range(dim)] = 1.0
    m = n  # row/col of |n+1>
    for a in range(n):
        th = thetas[:, a]
        ph = phis[:, a]
        f = np.zeros((batch, dim, dim), dtype=complex)
        f[:, range(dim), range(dim)] = 1.0
        c, s = np.cos(th), np.sin(th)
        f[:, a, a] = c
        f[:, m, m] = c
        f[:, a, m] = np.exp(1j * ph) * s
        f[:, m, a] = -np.exp(-1j * ph) * s
        u = u @ f
    return u


def unitary_at(p: ControlPoint) -> np.ndarray:
    """The (n+1)x(n+1) unitary U(z) = U_1(z_1) ... U_n(z_n)."""
    return _unitary_batch(np.array([p.thetas]), np.array([p.phis]))[0]


def _connection_batch(thetas, phis, coord_kind: str, coord_index: int,
                      fd_step: float) -> np.ndarray:
    """Degenerate-block connection A^mu at a batch of points, shape (B, n, n)."""
    n = thetas.shape[1]
    shift = np.zeros_like(thetas if coord_kind == "theta" else phis)
    shift[:, coord_index] = fd_step
    if coord_kind == "theta":
        up = _unitary_batch(thetas + shift, phis)
        dn = _unitary_batch(thetas - shift, phis)
    else:
        up = _unitary_batch(thetas, phis + shift)
        dn = _unitary_batch(thetas, phis - shift)
    u0 = _unitary_batch(thetas, phis)
    du = (up - dn) / (2.0 * fd_step)
    full = np.einsum("bji,bjk->bik", u0.conj(), du)
    return full[:, :n, :n]


def connection_at(p: ControlPoint, coord: str, fd_step: float = FD_STEP_DEFAULT) -> np.ndarray:
    """Central-finite-difference sample of the degenerate-block connection A^mu.

    Anti-Hermitian to O(fd_step^2).  ``fd_step`` must lie in
    ``FD_STEP_RANGE``; ``coord`` must name a coordinate of the model.
    """
    if not FD_STEP_RANGE[0] <= fd_step <= FD_STEP_RANGE[1]:
        raise ValueError(f"fd_step {fd_step} outside {FD_STEP_RANGE}")
    kind, idx = _parse_coord(coord, p.n)
    return _connection_batch(np.array([p.thetas]), np.array([p.phis]),
                             kind, idx, fd_step)[0]


# ---------------------------------------------------------------------------
# Path-ordered integration
# ---------------------------------------------------------------------------

def rectangle_vertices(loop: LoopSpec, steps: int | None = None) -> np.ndarray:
    """Discretized closed polyline of the rectangle, shape (4*steps + 1, 2n).

    Columns are ordered (theta_1..theta_n, phi_1..phi_n).  The first and
    last rows coincide exactly.
    """
    if is_optical_plane(loop.plane):
        raise ValueError("optical loops have no CP^n path (area functionals only)")
    steps = loop.steps if steps is None else int(steps)
    n = loop.n
    base = np.zeros(2 * n)
    for a in range(n):
        base[a] = loop.fixed_value(f"theta_{a + 1}")
        base[n + a] = loop.fixed_value(f"phi_{a + 1}")

    def col(coord):
        kind, i = _parse_coord(coord, n)
        return i if kind == "theta" else n + i

    c1, c2 = col(loop.plane[0]), col(loop.plane[1])
    (lo1, hi1), (lo2, hi2) = loop.bounds
    corners = [(lo1, lo2), (hi1, lo2), (hi1, hi2), (lo1, hi2), (lo1, lo2)]
    pts = [np.array([lo1, lo2])]
    for (a1, a2), (b1, b2) in zip(corners[:-1], corners[1:]):
        seg = np.linspace(0.0, 1.0, steps + 1)[1:]
        edge = np.stack([a1 + seg * (b1 - a1), a2 + seg * (b2 - a2)], axis=1)
        pts.append(edge)
    plane_path = np.vstack([pts[0][None, :], *pts[1:]])
    plane_path[-1] = plane_path[0]          # exact closure against roundoff
    if loop.orientation == -1:
        plane_path = plane_path[::-1]
    verts = np.tile(base, (plane_path.shape[0], 1))
    verts[:, c1] = plane_path[:, 0]
    verts[:, c2] = plane_path[:, 1]
    return verts


def sheared_vertices(loop: LoopSpec, shear: float,
                     steps: int | None = None) -> np.ndarray:
    """Equal-flux parallelogram deformation of the rectangle.

    The coordinate the flux integrand does not depend on is displaced
    proportionally to the other one (phi for sphere-cosine loops, the
    first theta for plane-cosine loops), so the Fubini slices keep their
    extent and the enclosed flux — hence the holonomy — is unchanged.
    """
    verts = rectangle_vertices(loop, steps)
    n = loop.n

    def col(coord):
        kind, i = _parse_coord(coord, n)
        return i if kind == "theta" else n + i

    c1, c2 = col(loop.plane[0]), col(loop.plane[1])
    if loop.kind == "sphere-cosine":
        moved, other, base = c2, c1, loop.bounds[0][0]
    else:
        moved, other, base = c1, c2, loop.bounds[1][0]
    out = verts.copy()
    out[:, moved] = verts[:, moved] + shear * (verts[:, other] - base)
    moved_name = loop.plane[0] if moved == c1 else loop.plane[1]
    if moved_name.startswith("theta") and (out[:, moved].min() < -1e-12
                                           or out[:, moved].max() > math.pi + 1e-12):
        raise ValueError("shear pushes a theta coordinate outside [0, pi]")
    return out


def elliptic_vertices(loop: LoopSpec, steps: int | None = None) -> np.ndarray:
    """Closed elliptic polyline inscribed in the rectangle's plane box.

    Rectangle legs see a constant connection and are integrated exactly
    at any step count; the inscribed ellipse has a genuinely varying
    step generator and exposes the integrator's convergence order.
    Traversal respects ``loop.orientation`` (+1 starts along the first
    plane coordinate).
    """
    steps = loop.steps if steps is None else int(steps)
    n = loop.n
    base = np.zeros(2 * n)
    for a in range(n):
        base[a] = loop.fixed_value(f"theta_{a + 1}")
        base[n + a] = loop.fixed_value(f"phi_{a + 1}")

    def col(coord):
        kind, i = _parse_coord(coord, n)
        return i if kind == "theta" else n + i

    c1, c2 = col(loop.plane[0]), col(loop.plane[1])
    (lo1, hi1), (lo2, hi2) = loop.bounds
    m1, r1 = 0.5 * (lo1 + hi1), 0.5 * (hi1 - lo1)
    m2, r2 = 0.5 * (lo2 + hi2), 0.5 * (hi2 - lo2)
    t = np.linspace(0.0, 2 * math.pi, 4 * steps + 1)
    verts = np.tile(base, (t.size, 1))
    verts[:, c1] = m1 + r1 * np.sin(loop.orientation * t)
    verts[:, c2] = m2 - r2 * np.cos(t)
    verts[-1] = verts[0]
    return verts


def path_holonomy(n: int, vertices: np.ndarray,
                  fd_step: float = FD_STEP_DEFAULT) -> np.ndarray:
    """Ordered product of per-step exponentials along an arbitrary polyline.

    ``vertices`` has shape (M+1, 2n) with columns (thetas..., phis...).
    The path must be closed; later steps multiply on the left.
    """
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 2 * n:
        raise ValueError("vertices must have shape (M+1, 2n)")
    if max_norm(vertices[0] - vertices[-1]) > 0.0:
        raise ValueError("path is not closed")
    mids = 0.5 * (vertices[1:] + vertices[:-1])
    deltas = vertices[1:] - vertices[:-1]
    nsteps = mids.shape[0]
    gen = np.zeros((nsteps, n, n), dtype=complex)
    for c in range(2 * n):
        mask = deltas[:, c] != 0.0
        if not np.any(mask):
            continue
        kind = "theta" if c < n else "phi"
        idx = c if c < n else c - n
        a = _connection_batch(mids[mask, :n], mids[mask, n:], kind, idx, fd_step)
        gen[mask] += a * deltas[mask, c][:, None, None]
    # enforce exact anti-Hermiticity of each step generator (kills the
    # O(fd_step^2) Hermitian residue so every partial product is unitary)
    gen = 0.5 * (gen - np.conj(np.swapaxes(gen, 1, 2)))
    factors = expm_anti_hermitian_batch(gen)
    out = np.eye(n, dtype=complex)
    for k in range(nsteps):
        out = factors[k] @ out
    return out


def holonomy(loop: LoopSpec, steps: int | None = None,
             error_estimate: bool = True,
             fd_step: float = FD_STEP_DEFAULT) -> HolonomyResult:
    """Path-ordered holonomy of a rectangle loop on the degenerate block.

    The discretization error is estimated by rerunning at twice the step
    count and taking the max-norm difference.
    """
    steps = loop.steps if steps is None else int(steps)
    mat = path_holonomy(loop.n, rectangle_vertices(loop, steps), fd_step)
    err = float("nan")
    if error_estimate:
        refined = path_holonomy(loop.n, rectangle_vertices(loop, 2 * steps), fd_step)
        err = max_norm(mat - refined)
    return HolonomyResult(matrix=mat, steps=steps, error_estimate=err)


# ---------------------------------------------------------------------------
# Standard loop families and their closed forms
# ---------------------------------------------------------------------------

def c1_loop(theta_hi: float, phi_hi: float, n: int = 2, beta: int = 1,
            theta_lo: float = 0.0, phi_lo: float = 0.0,
            steps: int = DEFAULT_STEPS) -> LoopSpec:
    """Abelian loop on (theta_beta, phi_beta); orientation +1 gives exp(-i Sigma)."""
    return LoopSpec(n=n, plane=(f"theta_{beta}", f"phi_{beta}"),
                    bounds=((theta_lo, theta_hi), (phi_lo, phi_hi)),
                    steps=steps, orientation=+1, kind="sphere-cosine")


def c2_loop(phi_hi: float, n: int = 2, beta: int = 1, beta_bar: int = 2,
            steps: int = DEFAULT_STEPS) -> LoopSpec:
    """Mixed loop on (theta_beta, phi_beta_bar) in its diagonal geometry.

    theta_beta spans [0, pi/2] with theta_beta_bar pinned at pi/2; the
    holonomy is then diagonal with phase exp(+i Sigma2) on |beta_bar>,
    Sigma2 = 2 * phi_hi (and a compensating phase on |beta>).
    """
    return LoopSpec(n=n, plane=(f"theta_{beta}", f"phi_{beta_bar}"),
                    bounds=((0.0, math.pi / 2), (0.0, phi_hi)),
                    fixed={f"theta_{beta_bar}": math.pi / 2},
                    steps=steps, orientation=+1, kind=None)


def c3_loop(theta1_hi: float, theta2_hi: float, n: int = 2,
            beta: int = 1, beta_bar: int = 2,
            steps: int = DEFAULT_STEPS) -> LoopSpec:
    """Rotation loop on (theta_beta, theta_beta_bar) at zero phases.

    Orientation -1 matches the closed-form sign
    exp[ Sigma * (|beta_bar><beta| - |beta><beta_bar|) ].
    """
    return LoopSpec(n=n, plane=(f"theta_{beta}", f"theta_{beta_bar}"),
                    bounds=((0.0, theta1_hi), (0.0, theta2_hi)),
                    steps=steps, orientation=-1, kind="plane-cosine")


def c4_loop(theta1_hi: float, theta2_hi: float, n: int = 2,
            beta: int = 1, beta_bar: int = 2,
            steps: int = DEFAULT_STEPS) -> LoopSpec:
    """As c3_loop but at phi_beta = pi/2: generator |beta><beta_bar| + h.c."""
    return LoopSpec(n=n, plane=(f"theta_{beta}", f"theta_{beta_bar}"),
                    bounds=((0.0, theta1_hi), (0.0, theta2_hi)),
                    fixed={f"phi_{beta}": math.pi / 2},
                    steps=steps, orientation=-1, kind="plane-cosine")


def squeezed_loop(x_hi: float, r_lo: float, r_hi: float,
                  steps: int = DEFAULT_STEPS) -> LoopSpec:
    """Optical-mode rectangle on (x, r1); area functionals only, no engine."""
    return LoopSpec(n=1, plane=("x", "r1"),
                    bounds=((0.0, x_hi), (r_lo, r_hi)),
                    steps=steps, orientation=+1, kind="squeezed-exponential")


def _plane_roles(loop: LoopSpec):
    """(family, beta_index, beta_bar_index) for a recognized template, else None."""
    if is_optical_plane(loop.plane):
        return None
    k0 = _COORD_RE.match(loop.plane[0])
    k1 = _COORD_RE.match(loop.plane[1])
    i0, i1 = int(k0.group(2)) - 1, int(k1.group(2)) - 1
    if k0.group(1) == "theta" and k1.group(1) == "phi":
        if i0 == i1:
            return ("c1", i0, None)
        if i1 > i0:
            return ("c2", i0, i1)
        return None
    if k0.group(1) == "theta" and k1.group(1) == "theta" and i1 > i0:
        phi_b = loop.fixed_value(f"phi_{i0 + 1}")
        phi_bb = loop.fixed_value(f"phi_{i1 + 1}")
        if abs(phi_bb) < 1e-12 and abs(phi_b) < 1e-12:
            return ("c3", i0, i1)
        if abs(phi_bb) < 1e-12 and abs(phi_b - math.pi / 2) < 1e-12:
            return ("c4", i0, i1)
    return None


def closed_form_holonomy(loop: LoopSpec) -> np.ndarray | None:
    """Exact holonomy for the recognized C1-C4 templates, else None.

    The rotation/phase magnitudes use the engine-matching integrands: the
    doubled-angle sphere area for C1 and the cos(second coordinate) planar
    integrand for C3/C4 (the resolution of the integrand ambiguity).
    """
    roles = _plane_roles(loop)
    if roles is None:
        return None
    family, b, bb = roles
    (lo1, hi1), (lo2, hi2) = loop.bounds
    n, o = loop.n, loop.orientation
    eye = np.eye(n, dtype=complex)
    if family == "c1":
        for c, v in loop.fixed.items():
            if abs(v) > 1e-12:
                return None
        sigma = (hi2 - lo2) * (math.sin(hi1) ** 2 - math.sin(lo1) ** 2)
        out = eye.copy()
        out[b, b] = np.exp(-1j * o * sigma)
        return out
    if family == "c2":
        if abs(loop.fixed_value(f"theta_{bb + 1}") - math.pi / 2) > 1e-12:
            return None
        if abs(lo1) > 1e-12 or abs(hi1 - math.pi / 2) > 1e-12:
            return None
        sigma2 = 2.0 * (hi2 - lo2)
        out = eye.copy()
        out[b, b] = np.exp(-1j * o * sigma2)
        out[bb, bb] = np.exp(+1j * o * sigma2)
        return out
    # c3 / c4: exact rotation angle from the cos(second coordinate) integrand
    sigma = (hi1 - lo1) * (math.sin(hi2) - math.sin(lo2))
    gen = np.zeros((n, n), dtype=complex)
    if family == "c3":
        gen[b, bb], gen[bb, b] = -1.0, 1.0          # -|b><bb| + |bb><b|
        return expm_anti_hermitian_batch((-o * sigma * gen)[None])[0]
    gen[b, bb], gen[bb, b] = 1.0, 1.0               # |b><bb| + |bb><b|
    return expm_anti_hermitian_batch((o * 1j * sigma * gen)[None])[0]
