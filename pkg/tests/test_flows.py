import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortex_lie import flows
from vortex_lie.errors import ConfigurationError


def all_builtin_flows():
    rng = np.random.default_rng(7)
    lin = flows.linear(rng.normal(size=(3, 3)), rng.normal(size=3))
    return [
        flows.zero_flow(),
        flows.uniform((1.0, -2.0, 0.5)),
        flows.rigid_rotation((0.3, -1.0, 2.0), center=(0.1, 0.2, -0.3)),
        lin,
        flows.planar_strain(1.5),
        flows.time_modulated(lin, flows.Modulation(1.0, 0.5, 3.0, 0.2)),
    ]


def test_evaluate_examples():
    x = np.array([0.3, -1.0, 2.0])
    assert np.all(flows.evaluate(flows.zero_flow(), x, 1.0) == 0)
    assert np.allclose(flows.evaluate(flows.uniform((1, 0, 0)), x, 0.0), [1, 0, 0])
    assert np.allclose(flows.evaluate(flows.rigid_rotation((0, 0, 1)), [1.0, 0, 0], 0.0), [0, 1, 0])


def test_jacobian_examples():
    assert np.all(flows.jacobian(flows.uniform((1, 2, 3)), np.zeros(3), 0.0) == 0)
    j = flows.jacobian(flows.rigid_rotation((0, 0, 1)), np.zeros(3), 0.0)
    assert np.array_equal(j, [[0, -1, 0], [1, 0, 0], [0, 0, 0]])


def test_is_skew():
    assert flows.is_skew(flows.uniform((1, 0, 0)))
    assert flows.is_skew(flows.zero_flow())
    assert flows.is_skew(flows.rigid_rotation((0.2, 4.0, -1.0)))
    assert not flows.is_skew(flows.planar_strain(1.0))
    assert flows.is_skew(flows.time_modulated(flows.rigid_rotation((0, 0, 1)), flows.Modulation(0.0, 1.0, 2.0)))


def test_batch_evaluation():
    f = flows.rigid_rotation((0, 0, 2.0))
    x = np.random.default_rng(0).normal(size=(10, 3))
    batch = flows.evaluate(f, x, 0.0)
    single = np.array([flows.evaluate(f, p, 0.0) for p in x])
    assert np.allclose(batch, single)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(-2, 2))
def test_jacobian_matches_finite_differences(seed, t):
    x = np.random.default_rng(seed).normal(size=3)
    h = 1e-6
    for flow in all_builtin_flows():
        jac = flows.jacobian(flow, x, t)
        fd = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd[:, j] = (flows.evaluate(flow, x + e, t) - flows.evaluate(flow, x - e, t)) / (2 * h)
        assert np.max(np.abs(fd - jac)) <= 1e-6 * max(1.0, np.max(np.abs(jac)))


def test_continuity_in_time():
    x = np.array([0.2, 0.4, -0.1])
    for flow in all_builtin_flows():
        for t in np.linspace(0, 1, 7):
            dv = flows.evaluate(flow, x, t + 1e-9) - flows.evaluate(flow, x, t)
            dj = flows.jacobian(flow, x, t + 1e-9) - flows.jacobian(flow, x, t)
            assert np.max(np.abs(dv)) < 1e-6 and np.max(np.abs(dj)) < 1e-6


def test_from_dict_round_trip():
    for flow in all_builtin_flows():
        assert flows.flow_from_dict(flow.to_dict()) == flow


@pytest.mark.parametrize(
    "d, key",
    [
        ({"kind": "vortex"}, "flow.kind"),
        ({"kind": "uniform", "speed": [1, 0, 0]}, "flow.speed"),
        ({"kind": "uniform", "velocity": [1, 0]}, "flow"),
        ({"kind": "time_modulated", "modulation": {}}, "flow.inner"),
        ({"kind": "time_modulated", "inner": {"kind": "zero"}, "modulation": {"freq": 1}}, "flow.modulation.freq"),
    ],
)
def test_from_dict_errors_name_the_key(d, key):
    with pytest.raises(ConfigurationError, match=key.replace(".", r"\.")):
        flows.flow_from_dict(d)


def test_invalid_values():
    with pytest.raises(ConfigurationError):
        flows.uniform((np.inf, 0, 0))
    with pytest.raises(ConfigurationError):
        flows.linear(np.eye(2))
    with pytest.raises(ConfigurationError):
        flows.FlowField("time_modulated")
