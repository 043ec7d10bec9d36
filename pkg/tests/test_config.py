import json

import numpy as np
import pytest

from vortex_lie import flows, serialize, solver
from vortex_lie.config import RunConfig, config_from_dict, load_config, parse_config
from vortex_lie.errors import ConfigurationError


def test_minimal_config_defaults():
    cfg = parse_config("{}")
    assert cfg.solver == solver.SolverConfig()
    assert cfg.flow == flows.zero_flow()
    assert cfg.initial["kind"] == "circle"
    assert cfg.initial["radius"] == pytest.approx(1 / (2 * np.pi))
    assert cfg.outputs.diagnostics.energy_orders == (3,)
    assert cfg.seed == 0
    f0 = cfg.initial_filament()
    assert f0.n == 128 and f0.min_speed == pytest.approx(1.0)


def test_full_config():
    d = {
        "solver": {"epsilon": 1e-3, "alpha": 0.25, "dt": 2e-4, "horizon": 0.01, "grid": 64, "sobolev_order": 7},
        "flow": {"kind": "linear", "matrix": [[1, 0, 0], [0, -1, 0], [0, 0, 0]]},
        "initial": {"kind": "perturbed_circle", "radius": 0.2, "mode": 3, "amplitude": 0.01},
        "outputs": {"directory": "o", "frame_stride": 5, "diagnostics": {"energy_orders": [3, 4, 5], "hasimoto": True}},
        "convergence": {"epsilons": [1e-3, 1e-4]},
        "seed": 9,
    }
    cfg = config_from_dict(d)
    assert cfg.solver.integrator == "exp_euler_regularized"
    assert not flows.is_skew(cfg.flow)
    assert cfg.outputs.frame_stride == 5
    assert cfg.convergence.epsilons == (1e-3, 1e-4)
    assert cfg.initial_filament().n == 64
    # the echo parses back to the same config
    assert config_from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_alpha_range_message():
    with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0, 3/8\)"):
        parse_config('{"solver": {"alpha": 0.5}}')


def test_energy_order_below_three_rejected():
    with pytest.raises(ConfigurationError, match="3 <= k <= m - 2"):
        parse_config('{"outputs": {"diagnostics": {"energy_orders": [2]}}}')
    with pytest.raises(ConfigurationError, match="energy_orders"):
        parse_config('{"outputs": {"diagnostics": {"energy_orders": [4]}}}')
    assert parse_config('{"solver": {"sobolev_order": 6}, "outputs": {"diagnostics": {"energy_orders": [4]}}}')


@pytest.mark.parametrize(
    "doc, key",
    [
        ('{"solvr": {}}', "solvr"),
        ('{"solver": {"eps": 1}}', "solver.eps"),
        ('{"solver": {"grid": "big"}}', "solver.grid"),
        ('{"solver": {"grid": 100}}', "solver"),
        ('{"solver": {"sobolev_order": 4}}', "sobolev_order"),
        ('{"initial": {"kind": "knot"}}', "initial.kind"),
        ('{"initial": {"kind": "ellipse", "a": 1}}', "initial.b"),
        ('{"initial": {"kind": "circle", "a": 1}}', "initial.a"),
        ('{"initial": {"kind": "circle", "radius": -1}}', "initial.radius"),
        ('{"initial": {"kind": "file"}}', "initial.path"),
        ('{"flow": {"kind": "uniform", "velocity": [1, 2]}}', "flow"),
        ('{"outputs": {"frame_stride": 0}}', "outputs.frame_stride"),
        ('{"outputs": {"diagnostics": {"plots": true}}}', "outputs.diagnostics.plots"),
        ('{"outputs": {"diagnostics": {"hasimoto": 1}}}', "outputs.diagnostics.hasimoto"),
        ('{"convergence": {"epsilons": [1e-3]}}', "convergence.epsilons"),
        ('{"seed": 1.5}', "seed"),
        ("[1, 2]", "top level"),
        ("{not json", "JSON"),
    ],
)
def test_schema_errors_name_the_key(doc, key):
    with pytest.raises(ConfigurationError, match=key.replace(".", r"\.")):
        parse_config(doc)


def test_non_finite_rejected():
    with pytest.raises(ConfigurationError, match="finite"):
        parse_config('{"solver": {"dt": NaN}}')


def test_initial_from_file(tmp_path):
    traj = solver.evolve(
        RunConfig().initial_filament(), flows.zero_flow(), solver.SolverConfig(dt=1e-4, horizon=3e-4), store_all=True
    )
    serialize.write_trajectory(traj, str(tmp_path))
    path = str(tmp_path / "frames.jsonl")
    cfg = parse_config(json.dumps({"initial": {"kind": "file", "path": path, "frame": 2}}))
    f = cfg.initial_filament()
    assert np.array_equal(f.positions, traj.frames[2].positions)
    bad = parse_config(json.dumps({"solver": {"grid": 64}, "initial": {"kind": "file", "path": path}}))
    with pytest.raises(ConfigurationError, match="grid"):
        bad.initial_filament()


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(str(tmp_path / "nope.json"))
