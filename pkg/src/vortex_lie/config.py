"""Run configuration: a JSON document validated into a RunConfig.

Schema (every key optional; defaults shown)::

    {
      "solver":  {"epsilon": 0.0, "alpha": 0.3, "dt": 1e-4, "horizon": 0.1,
                  "grid": 128, "sobolev_order": 5, "integrator": null,
                  "picard_tol": 1e-10, "picard_max_iter": 25,
                  "degeneracy_floor": null},
      "flow":    {"kind": "zero", ...kind parameters},
      "initial": {"kind": "circle", "radius": 1/(2 pi), "center": [0, 0, 0]},
      "outputs": {"directory": "out", "frame_stride": null,
                  "diagnostics": {"geometry": true, "energy_orders": [3],
                                  "hasimoto": false, "energy_variant": "with_k_factor"}},
      "convergence": {"epsilons": [1e-3, 5e-4, 2.5e-4], "dts": [4e-4, 2e-4, 1e-4],
                      "dt_epsilon": 1e-3},
      "seed": 0
    }

Initial kinds: circle(radius, center), ellipse(a, b), perturbed_circle(radius,
mode, amplitude) and file(path, frame) where the file holds frame records as
written by ``serialize.write_trajectory``.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import filament, flows, serialize
from .energy import VARIANTS
from .errors import ConfigurationError
from .solver import SolverConfig

UNIT_RADIUS = 1.0 / (2 * np.pi)

_INITIAL_KEYS = {
    "circle": {"radius", "center"},
    "ellipse": {"a", "b"},
    "perturbed_circle": {"radius", "mode", "amplitude"},
    "file": {"path", "frame"},
}
_TOP_KEYS = {"solver", "flow", "initial", "outputs", "convergence", "seed"}
_OUTPUT_KEYS = {"directory", "frame_stride", "diagnostics"}
_DIAG_KEYS = {"geometry", "energy_orders", "hasimoto", "energy_variant"}
_CONV_KEYS = {"epsilons", "dts", "dt_epsilon"}


@dataclass(frozen=True)
class Diagnostics:
    geometry: bool = True
    energy_orders: tuple = (3,)
    hasimoto: bool = False
    energy_variant: str = "with_k_factor"


@dataclass(frozen=True)
class Outputs:
    directory: str = "out"
    frame_stride: Optional[int] = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


@dataclass(frozen=True)
class Convergence:
    epsilons: tuple = (1e-3, 5e-4, 2.5e-4)
    dts: tuple = (4e-4, 2e-4, 1e-4)
    dt_epsilon: float = 1e-3


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    flow: flows.FlowField = field(default_factory=flows.zero_flow)
    initial: dict = field(default_factory=lambda: {"kind": "circle", "radius": UNIT_RADIUS})
    outputs: Outputs = field(default_factory=Outputs)
    convergence: Convergence = field(default_factory=Convergence)
    seed: int = 0

    def to_dict(self):
        out = asdict(self.outputs)
        out["diagnostics"]["energy_orders"] = list(self.outputs.diagnostics.energy_orders)
        conv = {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self.convergence).items()}
        return {
            "solver": self.solver.to_dict(),
            "flow": self.flow.to_dict(),
            "initial": dict(self.initial),
            "outputs": out,
            "convergence": conv,
            "seed": self.seed,
        }

    def initial_filament(self):
        return build_initial(self.initial, self.solver.grid)


def _section(d, name, allowed):
    sec = d.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"{name}: must be an object")
    extra = set(sec) - allowed
    if extra:
        raise ConfigurationError(f"{name}.{sorted(extra)[0]}: unknown key")
    return sec


def _number(value, key, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigurationError(f"{key}: must be finite")
    if integer:
        if float(value) != int(value):
            raise ConfigurationError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _flag(value, key):
    if not isinstance(value, bool):
        raise ConfigurationError(f"{key}: expected true or false, got {value!r}")
    return value


def _parse_solver(sec):
    ints = {"grid", "sobolev_order", "picard_max_iter"}
    known = {f for f in SolverConfig.__dataclass_fields__}
    extra = set(sec) - known
    if extra:
        raise ConfigurationError(f"solver.{sorted(extra)[0]}: unknown key")
    params = {}
    for key, val in sec.items():
        if key == "integrator" or (key == "degeneracy_floor" and val is None):
            params[key] = val
        else:
            params[key] = _number(val, f"solver.{key}", integer=key in ints)
    try:
        return SolverConfig(**params)
    except ConfigurationError as exc:
        raise ConfigurationError(f"solver: {exc}") from exc


def _parse_initial(sec):
    kind = sec.get("kind", "circle")
    if kind not in _INITIAL_KEYS:
        raise ConfigurationError(f"initial.kind: unknown initial curve {kind!r}; expected one of {sorted(_INITIAL_KEYS)}")
    extra = set(sec) - _INITIAL_KEYS[kind] - {"kind"}
    if extra:
        raise ConfigurationError(f"initial.{sorted(extra)[0]}: not a parameter of initial kind {kind!r}")
    out = {"kind": kind}
    if kind == "file":
        if "path" not in sec or not isinstance(sec["path"], str):
            raise ConfigurationError("initial.path: a file path is required for kind 'file'")
        out["path"] = sec["path"]
        out["frame"] = _number(sec.get("frame", 0), "initial.frame", integer=True)
        return out
    required = {"circle": (), "ellipse": ("a", "b"), "perturbed_circle": ("mode", "amplitude")}[kind]
    for key in required:
        if key not in sec:
            raise ConfigurationError(f"initial.{key}: required for kind {kind!r}")
    for key in _INITIAL_KEYS[kind]:
        if key == "center":
            c = sec.get("center", [0.0, 0.0, 0.0])
            if not isinstance(c, (list, tuple)) or len(c) != 3:
                raise ConfigurationError("initial.center: expected 3 numbers")
            out["center"] = [_number(x, "initial.center") for x in c]
        elif key == "mode":
            out["mode"] = _number(sec["mode"], "initial.mode", integer=True)
        elif key == "radius":
            out["radius"] = _number(sec.get("radius", UNIT_RADIUS), "initial.radius")
        else:
            out[key] = _number(sec[key], f"initial.{key}")
    for key in ("radius", "a", "b"):
        if key in out and out[key] <= 0:
            raise ConfigurationError(f"initial.{key}: must be positive")
    return out


def _parse_outputs(sec, m):
    diag_sec = sec.get("diagnostics", {}) or {}
    if not isinstance(diag_sec, dict):
        raise ConfigurationError("outputs.diagnostics: must be an object")
    extra = set(diag_sec) - _DIAG_KEYS
    if extra:
        raise ConfigurationError(f"outputs.diagnostics.{sorted(extra)[0]}: unknown key")
    orders = diag_sec.get("energy_orders", [3])
    if not isinstance(orders, (list, tuple)):
        raise ConfigurationError("outputs.diagnostics.energy_orders: expected a list of integers")
    orders = tuple(_number(k, "outputs.diagnostics.energy_orders", integer=True) for k in orders)
    for k in orders:
        if not 3 <= k <= m - 2:
            raise ConfigurationError(
                f"outputs.diagnostics.energy_orders: k = {k} outside the admissible range "
                f"3 <= k <= m - 2 = {m - 2} (m = sobolev_order)"
            )
    variant = diag_sec.get("energy_variant", "with_k_factor")
    if variant not in VARIANTS:
        raise ConfigurationError(f"outputs.diagnostics.energy_variant: must be one of {VARIANTS}")
    diag = Diagnostics(
        geometry=_flag(diag_sec.get("geometry", True), "outputs.diagnostics.geometry"),
        energy_orders=orders,
        hasimoto=_flag(diag_sec.get("hasimoto", False), "outputs.diagnostics.hasimoto"),
        energy_variant=variant,
    )
    directory = sec.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        raise ConfigurationError("outputs.directory: expected a non-empty path")
    stride = sec.get("frame_stride")
    if stride is not None:
        stride = _number(stride, "outputs.frame_stride", integer=True)
        if stride < 1:
            raise ConfigurationError("outputs.frame_stride: must be >= 1")
    return Outputs(directory, stride, diag)


def _parse_convergence(sec):
    out = {}
    for key in ("epsilons", "dts"):
        if key in sec:
            vals = sec[key]
            if not isinstance(vals, (list, tuple)) or len(vals) < 2:
                raise ConfigurationError(f"convergence.{key}: expected a list of at least two numbers")
            vals = tuple(_number(v, f"convergence.{key}") for v in vals)
            if any(v <= 0 for v in vals):
                raise ConfigurationError(f"convergence.{key}: values must be positive")
            out[key] = vals
    if "dt_epsilon" in sec:
        out["dt_epsilon"] = _number(sec["dt_epsilon"], "convergence.dt_epsilon")
        if out["dt_epsilon"] <= 0:
            raise ConfigurationError("convergence.dt_epsilon: must be positive")
    return Convergence(**out)


def config_from_dict(d):
    if not isinstance(d, dict):
        raise ConfigurationError("config: top level must be an object")
    extra = set(d) - _TOP_KEYS
    if extra:
        raise ConfigurationError(f"{sorted(extra)[0]}: unknown top-level key")
    solver_cfg = _parse_solver(_section(d, "solver", set(SolverConfig.__dataclass_fields__)))
    flow = flows.flow_from_dict(d.get("flow") or {"kind": "zero"}, "flow")
    initial = _parse_initial(_section(d, "initial", set().union(*_INITIAL_KEYS.values(), {"kind"})))
    outputs = _parse_outputs(_section(d, "outputs", _OUTPUT_KEYS), solver_cfg.sobolev_order)
    conv = _parse_convergence(_section(d, "convergence", _CONV_KEYS))
    seed = _number(d.get("seed", 0), "seed", integer=True)
    return RunConfig(solver_cfg, flow, initial, outputs, conv, seed)


def parse_config(text):
    """Validate a JSON config document (string) into a RunConfig."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config: not valid JSON ({exc})") from exc
    return config_from_dict(d)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc}") from exc
    return parse_config(text)


def build_initial(spec, n):
    kind = spec["kind"]
    if kind == "circle":
        return filament.circle(spec.get("radius", UNIT_RADIUS), n, center=spec.get("center", (0.0, 0.0, 0.0)))
    if kind == "ellipse":
        return filament.ellipse(spec["a"], spec["b"], n)
    if kind == "perturbed_circle":
        return filament.perturbed_circle(spec.get("radius", UNIT_RADIUS), spec["mode"], spec["amplitude"], n)
    f = serialize.read_frame(spec["path"], spec.get("frame", 0))
    if f.n != n:
        raise ConfigurationError(f"initial.path: frame has N = {f.n}, but solver.grid = {n}")
    return f
