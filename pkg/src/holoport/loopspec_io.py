"""Structured-text round-trip for loop specs and sweep configs.

The format is line-oriented ``key = value`` with ``#`` comments.  Floats
are serialized with ``repr`` so that parse -> serialize -> parse is
idempotent bit for bit.  Example loop spec::

    n = 2
    plane = theta_1 theta_2
    bounds = 0.0 0.7853981633974483 0.0 1.5707963267948966
    fixed = phi_1 0.0 phi_2 0.0
    steps = 1024
    orientation = -1
    kind = plane-cosine

A sweep config uses the keys ``eps``, ``delta``, ``lambda`` (each
``start stop count``), ``mode``, ``format``, ``out``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .manifold import LoopSpec

LOOP_KEYS = ("n", "plane", "bounds", "fixed", "steps", "orientation", "kind")
SWEEP_KEYS = ("eps", "delta", "lambda", "mode", "format", "out")

GUARD = 0.2  # first-order regime bound on |eps|, |delta|


class LoopSpecError(ValueError):
    """Parse/validation failure; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"field {field_name!r}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SweepConfig:
    """Axis ranges and output options for a fidelity sweep."""

    eps: tuple = (0.0, 0.0, 1)
    delta: tuple = (0.0, 0.0, 1)
    lam: tuple = (0.0, 0.0, 1)
    mode: str = "first-order"
    out_format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        for name, (start, stop, count) in (("eps", self.eps), ("delta", self.delta),
                                           ("lambda", self.lam)):
            if count < 1:
                raise LoopSpecError(name, "count must be >= 1")
            limit = GUARD if name in ("eps", "delta") else float("inf")
            for v in (start, stop):
                if abs(v) > limit:
                    raise LoopSpecError(name, f"range value {v} outside guard |{name}| <= {limit}")
            if name == "lambda" and (start < 0 or stop < 0):
                raise LoopSpecError(name, "dissipation strength must be >= 0")
        if self.mode not in ("first-order", "exact-area"):
            raise LoopSpecError("mode", f"unknown mode {self.mode!r}")
        if self.out_format not in ("csv", "json"):
            raise LoopSpecError("format", f"unknown format {self.out_format!r}")

    def axis_values(self, name: str):
        start, stop, count = {"eps": self.eps, "delta": self.delta,
                              "lambda": self.lam}[name]
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + k * step for k in range(count)]


def _key_values(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LoopSpecError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise LoopSpecError(key, "duplicate key")
        out[key] = value
    return out


def _parse_float(field_name: str, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise LoopSpecError(field_name, f"not a number: {token!r}") from None


def _parse_int(field_name: str, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise LoopSpecError(field_name, f"not an integer: {token!r}") from None


def parse_loop_spec(text: str) -> LoopSpec:
    kv = _key_values(text)
    unknown = set(kv) - set(LOOP_KEYS)
    if unknown:
        raise LoopSpecError(sorted(unknown)[0], "unknown key")
    for required in ("n", "plane", "bounds", "steps", "orientation"):
        if required not in kv:
            raise LoopSpecError(required, "missing")
    n = _parse_int("n", kv["n"])
    plane = tuple(kv["plane"].split())
    if len(plane) != 2:
        raise LoopSpecError("plane", "expected two coordinate ids")
    btoks = kv["bounds"].split()
    if len(btoks) != 4:
        raise LoopSpecError("bounds", "expected 'lo1 hi1 lo2 hi2'")
    lo1, hi1, lo2, hi2 = (_parse_float("bounds", t) for t in btoks)
    fixed = {}
    ftoks = kv.get("fixed", "").split()
    if len(ftoks) % 2:
        raise LoopSpecError("fixed", "expected 'coord value' pairs")
    for cname, vtok in zip(ftoks[::2], ftoks[1::2]):
        fixed[cname] = _parse_float("fixed", vtok)
    kind = kv.get("kind") or None
    steps = _parse_int("steps", kv["steps"])
    orientation = _parse_int("orientation", kv["orientation"])
    try:
        return LoopSpec(n=n, plane=plane, bounds=((lo1, hi1), (lo2, hi2)),
                        fixed=fixed, steps=steps, orientation=orientation,
                        kind=kind)
    except LoopSpecError:
        raise
    except ValueError as exc:
        message = str(exc)
        for name, needles in (("steps", ("steps",)),
                              ("orientation", ("orientation",)),
                              ("kind", ("kind",)),
                              ("fixed", ("fixed",)),
                              ("bounds", ("bounds", "[0, pi]", "finite")),
                              ("plane", ("plane", "coordinate"))):
            if any(s in message for s in needles):
                raise LoopSpecError(name, message) from exc
        raise LoopSpecError("spec", message) from exc


def serialize_loop_spec(spec: LoopSpec) -> str:
    (lo1, hi1), (lo2, hi2) = spec.bounds
    lines = [
        f"n = {spec.n}",
        f"plane = {spec.plane[0]} {spec.plane[1]}",
        f"bounds = {lo1!r} {hi1!r} {lo2!r} {hi2!r}",
    ]
    if spec.fixed:
        pairs = " ".join(f"{k} {v!r}" for k, v in sorted(spec.fixed.items()))
        lines.append(f"fixed = {pairs}")
    lines.append(f"steps = {spec.steps}")
    lines.append(f"orientation = {spec.orientation:+d}")
    if spec.kind is not None:
        lines.append(f"kind = {spec.kind}")
    return "\n".join(lines) + "\n"


def parse_sweep_config(text: str) -> SweepConfig:
    kv = _key_values(text)
    unknown = set(kv) - set(SWEEP_KEYS)
    if unknown:
        raise LoopSpecError(sorted(unknown)[0], "unknown key")

    def axis(name: str):
        if name not in kv:
            return (0.0, 0.0, 1)
        toks = kv[name].split()
        if len(toks) != 3:
            raise LoopSpecError(name, "expected 'start stop count'")
        return (_parse_float(name, toks[0]), _parse_float(name, toks[1]),
                _parse_int(name, toks[2]))

    return SweepConfig(eps=axis("eps"), delta=axis("delta"), lam=axis("lambda"),
                       mode=kv.get("mode", "first-order"),
                       out_format=kv.get("format", "csv"),
                       out=kv.get("out") or None)


def serialize_sweep_config(cfg: SweepConfig) -> str:
    lines = []
    for name, (start, stop, count) in (("eps", cfg.eps), ("delta", cfg.delta),
                                       ("lambda", cfg.lam)):
        lines.append(f"{name} = {start!r} {stop!r} {count}")
    lines.append(f"mode = {cfg.mode}")
    lines.append(f"format = {cfg.out_format}")
    if cfg.out:
        lines.append(f"out = {cfg.out}")
    return "\n".join(lines) + "\n"
