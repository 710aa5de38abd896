"""Closed-form area/flux functionals of rectangle loops and their sensitivities.

Three integrand families are supported, all with exact antiderivatives:

``sphere-cosine``
    The abelian flux of a (theta, phi) rectangle,
    ``Sigma = Delta_phi * (sin^2 t_hi - sin^2 t_lo)`` — the area enclosed on
    the sphere with doubled polar angle, whose planar integrand is
    ``sin(2 theta)``.  This is the form the holonomy engine reproduces
    exactly; on a [0, pi/2] theta range it coincides with the plain
    ``integral cos`` value (e.g. the [0, pi/2] x [0, pi] rectangle gives pi).

``plane-cosine``
    ``integral cos(coordinate[axis])`` over a (theta, theta') rectangle.
    ``axis=0`` (the default) integrates the cosine of the *first* plane
    coordinate — the convention of the rectangle-error analysis, whose
    sensitivities at a pi/2 edge vanish to first order.  The holonomy
    engine itself is reproduced by ``axis=1`` (cosine of the second
    coordinate); use ``enclosed_rotation_angle`` for that.

``squeezed-exponential``
    ``integral 2 exp(-2 r)`` over an (x, r) rectangle:
    ``x_extent * (exp(-2 r_lo) - exp(-2 r_hi))``.  Deformations of the far
    r-edge change the flux by at most ``x_extent * exp(-2 r_lo_edge)``,
    exponentially small in the squeezing parameter.
"""

from __future__ import annotations

import math

from .manifold import LoopSpec

KINDS = ("sphere-cosine", "plane-cosine", "squeezed-exponential")

EDGES = ("lo1", "hi1", "lo2", "hi2")


def _resolve(loop: LoopSpec, kind: str | None) -> str:
    kind = kind if kind is not None else loop.kind
    if kind not in KINDS:
        raise ValueError(f"unknown area kind {kind!r}")
    return kind


def _area_from_bounds(kind: str, lo1, hi1, lo2, hi2, axis: int) -> float:
    if kind == "sphere-cosine":
        return (hi2 - lo2) * (math.sin(hi1) ** 2 - math.sin(lo1) ** 2)
    if kind == "plane-cosine":
        if axis == 0:
            return (math.sin(hi1) - math.sin(lo1)) * (hi2 - lo2)
        if axis == 1:
            return (hi1 - lo1) * (math.sin(hi2) - math.sin(lo2))
        raise ValueError("axis must be 0 or 1")
    # squeezed-exponential; r is the second coordinate
    return (hi1 - lo1) * (math.exp(-2.0 * lo2) - math.exp(-2.0 * hi2))


def area(loop: LoopSpec, kind: str | None = None, axis: int = 0) -> float:
    """Exact double integral of the kind's integrand over the rectangle."""
    kind = _resolve(loop, kind)
    (lo1, hi1), (lo2, hi2) = loop.bounds
    return _area_from_bounds(kind, lo1, hi1, lo2, hi2, axis)


def enclosed_rotation_angle(loop: LoopSpec) -> float:
    """The exact angle the holonomy engine produces for this rectangle.

    (theta, phi) planes use the sphere-cosine flux; (theta, theta') planes
    the cos(second coordinate) integrand.  This is the quantity to compare
    against the closed-form exponentials.
    """
    kind = _resolve(loop, None)
    if kind == "sphere-cosine":
        return area(loop, "sphere-cosine")
    if kind == "plane-cosine":
        return area(loop, "plane-cosine", axis=1)
    raise ValueError("no holonomy engine for squeezed loops")


def _check_domain(loop: LoopSpec, kind: str, lo1, hi1, lo2, hi2) -> None:
    if kind == "squeezed-exponential":
        return
    names = loop.plane
    for name, v in ((names[0], lo1), (names[0], hi1)):
        if name.startswith("theta") and not -1e-12 <= v <= math.pi + 1e-12:
            raise ValueError(f"perturbed bound {v} for {name} leaves [0, pi]")
    if names[1].startswith("theta"):
        for v in (lo2, hi2):
            if not -1e-12 <= v <= math.pi + 1e-12:
                raise ValueError(f"perturbed bound {v} for {names[1]} leaves [0, pi]")
    if names[1].startswith("phi"):
        for v in (lo2, hi2):
            if not -1e-12 <= v <= 2 * math.pi + 1e-12:
                raise ValueError(f"perturbed bound {v} for {names[1]} leaves [0, 2pi]")


def perturbed_area(loop: LoopSpec, alpha: float, beta: float,
                   kind: str | None = None, axis: int = 0) -> float:
    """Area with the upper edges translated: hi1 -> hi1+alpha, hi2 -> hi2+beta."""
    if abs(alpha) > 0.1 or abs(beta) > 0.1:
        raise ValueError("edge translations are limited to |alpha|, |beta| <= 0.1")
    kind = _resolve(loop, kind)
    (lo1, hi1), (lo2, hi2) = loop.bounds
    hi1, hi2 = hi1 + alpha, hi2 + beta
    _check_domain(loop, kind, lo1, hi1, lo2, hi2)
    return _area_from_bounds(kind, lo1, hi1, lo2, hi2, axis)


def perturbed_area_gradient(loop: LoopSpec, kind: str | None = None,
                            axis: int = 0) -> tuple:
    """Analytic (d Sigma/d alpha, d Sigma/d beta) at alpha = beta = 0."""
    kind = _resolve(loop, kind)
    (lo1, hi1), (lo2, hi2) = loop.bounds
    if kind == "sphere-cosine":
        return (math.sin(2 * hi1) * (hi2 - lo2),
                math.sin(hi1) ** 2 - math.sin(lo1) ** 2)
    if kind == "plane-cosine":
        if axis == 0:
            return (math.cos(hi1) * (hi2 - lo2), math.sin(hi1) - math.sin(lo1))
        return (math.sin(hi2) - math.sin(lo2), (hi1 - lo1) * math.cos(hi2))
    return (math.exp(-2.0 * lo2) - math.exp(-2.0 * hi2),
            (hi1 - lo1) * 2.0 * math.exp(-2.0 * hi2))


def flux_sensitivity(loop: LoopSpec, edge: str, shift: float,
                     kind: str | None = None, axis: int = 0) -> float:
    """|area(one edge shifted) - area(original)|: the flux change of a deformation."""
    if edge not in EDGES:
        raise ValueError(f"edge must be one of {EDGES}")
    kind = _resolve(loop, kind)
    (lo1, hi1), (lo2, hi2) = loop.bounds
    shifted = {"lo1": (lo1 + shift, hi1, lo2, hi2),
               "hi1": (lo1, hi1 + shift, lo2, hi2),
               "lo2": (lo1, hi1, lo2 + shift, hi2),
               "hi2": (lo1, hi1, lo2, hi2 + shift)}[edge]
    _check_domain(loop, kind, *shifted)
    base = _area_from_bounds(kind, lo1, hi1, lo2, hi2, axis)
    moved = _area_from_bounds(kind, *shifted, axis)
    return abs(moved - base)
