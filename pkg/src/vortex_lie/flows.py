"""External velocity fields F(x, t) and their spatial Jacobians.

Every builtin kind has a position-independent Jacobian.  The ``linear`` kind
grows without bound at infinity; filaments stay in bounded sets over finite
horizons, which is where the fields are used.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError

KINDS = ("zero", "uniform", "rigid_rotation", "linear", "time_modulated")


def skew(w):
    """Matrix of the map x -> w x x."""
    w1, w2, w3 = w
    return np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])


@dataclass(frozen=True)
class Modulation:
    """g(t) = offset + amplitude * sin(2 pi frequency t + phase)."""

    offset: float = 1.0
    amplitude: float = 0.0
    frequency: float = 0.0
    phase: float = 0.0

    def __call__(self, t):
        return self.offset + self.amplitude * np.sin(2 * np.pi * self.frequency * t + self.phase)


@dataclass(frozen=True)
class FlowField:
    kind: str = "zero"
    velocity: tuple = (0.0, 0.0, 0.0)
    angular_velocity: tuple = (0.0, 0.0, 0.0)
    center: tuple = (0.0, 0.0, 0.0)
    matrix: tuple = ((0.0, 0.0, 0.0),) * 3
    offset: tuple = (0.0, 0.0, 0.0)
    inner: Optional["FlowField"] = None
    modulation: Optional[Modulation] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown flow kind {self.kind!r}; expected one of {KINDS}")
        for name in ("velocity", "angular_velocity", "center", "offset"):
            vec = tuple(float(c) for c in getattr(self, name))
            if len(vec) != 3 or not np.all(np.isfinite(vec)):
                raise ConfigurationError(f"flow.{name} must be 3 finite numbers")
            object.__setattr__(self, name, vec)
        mat = np.asarray(self.matrix, dtype=float)
        if mat.shape != (3, 3) or not np.all(np.isfinite(mat)):
            raise ConfigurationError("flow.matrix must be a finite 3x3 array")
        object.__setattr__(self, "matrix", tuple(map(tuple, mat)))
        if self.kind == "time_modulated":
            if self.inner is None or self.modulation is None:
                raise ConfigurationError("time_modulated flow needs 'inner' and 'modulation'")

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "uniform":
            d["velocity"] = list(self.velocity)
        elif self.kind == "rigid_rotation":
            d["angular_velocity"] = list(self.angular_velocity)
            d["center"] = list(self.center)
        elif self.kind == "linear":
            d["matrix"] = [list(r) for r in self.matrix]
            d["offset"] = list(self.offset)
        elif self.kind == "time_modulated":
            d["inner"] = self.inner.to_dict()
            m = self.modulation
            d["modulation"] = {
                "offset": m.offset,
                "amplitude": m.amplitude,
                "frequency": m.frequency,
                "phase": m.phase,
            }
        return d


def zero_flow():
    return FlowField("zero")


def uniform(velocity):
    return FlowField("uniform", velocity=tuple(velocity))


def rigid_rotation(angular_velocity, center=(0.0, 0.0, 0.0)):
    return FlowField("rigid_rotation", angular_velocity=tuple(angular_velocity), center=tuple(center))


def linear(matrix, offset=(0.0, 0.0, 0.0)):
    return FlowField("linear", matrix=matrix, offset=tuple(offset))


def planar_strain(rate=1.0):
    return linear(np.diag([rate, -rate, 0.0]))


def time_modulated(inner, modulation):
    return FlowField("time_modulated", inner=inner, modulation=modulation)


_ALLOWED_KEYS = {
    "zero": set(),
    "uniform": {"velocity"},
    "rigid_rotation": {"angular_velocity", "center"},
    "linear": {"matrix", "offset"},
    "time_modulated": {"inner", "modulation"},
}


def flow_from_dict(d, where="flow"):
    if not isinstance(d, dict):
        raise ConfigurationError(f"{where} must be an object")
    kind = d.get("kind", "zero")
    if kind not in _ALLOWED_KEYS:
        raise ConfigurationError(f"{where}.kind: unknown flow kind {kind!r}")
    extra = set(d) - _ALLOWED_KEYS[kind] - {"kind"}
    if extra:
        raise ConfigurationError(f"{where}.{sorted(extra)[0]}: not a parameter of flow kind {kind!r}")
    try:
        if kind == "time_modulated":
            if "inner" not in d:
                raise ConfigurationError(f"{where}.inner is required for time_modulated")
            mod = d.get("modulation", {})
            bad = set(mod) - {"offset", "amplitude", "frequency", "phase"}
            if bad:
                raise ConfigurationError(f"{where}.modulation.{sorted(bad)[0]}: unknown key")
            return time_modulated(
                flow_from_dict(d["inner"], where + ".inner"),
                Modulation(**{k: float(v) for k, v in mod.items()}),
            )
        params = {k: v for k, v in d.items() if k != "kind"}
        return FlowField(kind, **params)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{where}: {exc}") from exc


def evaluate(flow, x, t):
    """F(x, t) for a point (3,) or a batch of points (..., 3)."""
    x = np.asarray(x, dtype=float)
    kind = flow.kind
    if kind == "zero":
        return np.zeros_like(x)
    if kind == "uniform":
        return np.broadcast_to(np.asarray(flow.velocity), x.shape).copy()
    if kind == "rigid_rotation":
        return np.cross(np.asarray(flow.angular_velocity), x - np.asarray(flow.center))
    if kind == "linear":
        return x @ np.asarray(flow.matrix).T + np.asarray(flow.offset)
    return flow.modulation(t) * evaluate(flow.inner, x, t)


def jacobian(flow, x, t):
    """DF(x, t) as a 3x3 matrix (the same at every point for all builtin kinds)."""
    kind = flow.kind
    if kind in ("zero", "uniform"):
        return np.zeros((3, 3))
    if kind == "rigid_rotation":
        return skew(flow.angular_velocity)
    if kind == "linear":
        return np.array(flow.matrix)
    return flow.modulation(t) * jacobian(flow.inner, x, t)


def is_skew(flow):
    """Structural test DF + DF^T == 0 (exact, not up to a tolerance)."""
    if flow.kind == "time_modulated":
        return is_skew(flow.inner)
    j = jacobian(flow, np.zeros(3), 0.0)
    return bool(np.all(j + j.T == 0.0))
