# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math

import pytest

from dcb_allocation_core.core.ctmc_engine import enumerate_state_space, exact_distribution, throughput
from dcb_allocation_core.core.exceptions import ScenarioError
from dcb_allocation_core.core.mac_phy import isolated_throughput
from dcb_allocation_core.core.models.allocation import NetworkAllocation
from dcb_allocation_core.core.models.params import ActivityModel
from dcb_allocation_core.core.models.simulation import SimConfig
from dcb_allocation_core.core.scenarios import preset
from dcb_allocation_core.services.simulation_service import SimulationService, confidence_halfwidth


@pytest.fixture
def simulator():
    return SimulationService()


def exact_throughputs(net, model):
    space = enumerate_state_space(net)
    return throughput(space, exact_distribution(space, model), model).per_wlan


@pytest.mark.slow
def test_single_wlan_matches_renewal_throughput(simulator, model):
    net = NetworkAllocation.from_literal("1~2", 2)
    result = simulator.simulate(net, model, SimConfig(horizon=100.0, replications=30, seed=7))
    assert result.per_wlan_throughput[0] / 1e6 == pytest.approx(114.5927, rel=0.02)
    assert len(result.replication_throughputs) == 30
    assert result.confidence_halfwidth[0] > 0


def test_same_seed_same_result(simulator, pair_net, model):
    cfg = SimConfig(horizon=5.0, replications=2, seed=42)
    first = simulator.simulate(pair_net, model, cfg)
    second = simulator.simulate(pair_net, model, cfg)
    assert first.replication_throughputs == second.replication_throughputs
    other = simulator.simulate(pair_net, model, SimConfig(horizon=5.0, replications=2, seed=43))
    assert other.replication_throughputs != first.replication_throughputs


def test_silent_wlan_leaves_channels_to_the_other(simulator, pair_net, model):
    silent = model.with_overrides({0: 0.0})
    result = simulator.simulate(pair_net, silent, SimConfig(horizon=80.0, replications=2, seed=3))
    assert result.per_wlan_throughput[0] == 0.0
    assert result.per_wlan_throughput[1] == pytest.approx(isolated_throughput(model, 4), rel=0.02)


def test_callbacks_follow_replications(pair_net, model):
    simulator = SimulationService()
    finished = []
    simulator.register_callback("replication_finished", lambda index, values: finished.append(index))
    simulator.simulate(pair_net, model, SimConfig(horizon=2.0, replications=3))
    assert finished == [0, 1, 2]


@pytest.mark.parametrize("kwargs,field", [
    ({"horizon": 0.0}, "horizon"),
    ({"horizon": 10.0, "warmup": 10.0}, "warmup"),
    ({"replications": 0}, "replications"),
    ({"seed": -1}, "seed"),
])
def test_sim_config_validation(kwargs, field):
    with pytest.raises(ScenarioError) as error:
        SimConfig(**kwargs)
    assert error.value.field == field


def test_default_warmup_and_measured_time():
    cfg = SimConfig(horizon=200.0)
    assert cfg.warmup == pytest.approx(10.0)
    assert cfg.measured_time == pytest.approx(190.0)


def test_confidence_halfwidth():
    assert math.isnan(confidence_halfwidth([1.0]))
    assert confidence_halfwidth([1.0, 2.0, 3.0]) == pytest.approx(4.302653 / math.sqrt(3), rel=1e-5)


def test_insensitivity_needs_two_configurations(simulator, pair_net, model):
    with pytest.raises(ScenarioError):
        simulator.insensitivity_check(pair_net, model, SimConfig(horizon=1.0), [("exponential", "exponential")])


@pytest.mark.slow
@pytest.mark.parametrize("cw", [16, 32, 64, 128])
def test_bonding_pair_matches_exact_chain(simulator, pair_net, params, cw):
    model = ActivityModel.from_params(params.with_contention_window(cw))
    result = simulator.simulate(pair_net, model, SimConfig(horizon=100.0, replications=30, seed=cw))
    errors = result.relative_errors(exact_throughputs(pair_net, model))
    assert max(errors) < 0.02


@pytest.mark.slow
def test_time_in_state_tracks_exact_distribution(simulator, pair_net, model):
    result = simulator.simulate(pair_net, model, SimConfig(horizon=100.0, replications=30, collect_states=True))
    assert sum(result.time_in_state.values()) == pytest.approx(1.0)
    space = enumerate_state_space(pair_net)
    for state, probability in exact_distribution(space, model).as_dict().items():
        assert result.time_in_state.get(state, 0.0) == pytest.approx(probability, abs=0.01)


@pytest.mark.slow
def test_non_overlapped_throughput_is_insensitive(simulator, model):
    report = simulator.insensitivity_check(
        preset("non-overlapped"), model, SimConfig(horizon=100.0, replications=30, seed=9),
        [("exponential", "exponential"), ("deterministic", "deterministic"), ("uniform", "exponential")],
    )
    assert report.max_relative_deviation < 0.02
    for values in report.throughputs:
        assert values == pytest.approx([isolated_throughput(model, 1)] * 4, rel=0.02)


@pytest.mark.slow
def test_worker_pool_keeps_replication_order(pair_net, model):
    cfg = SimConfig(horizon=5.0, replications=4, seed=5)
    serial = SimulationService().simulate(pair_net, model, cfg)
    pooled = SimulationService(workers=2).simulate(pair_net, model, cfg)
    assert pooled.replication_throughputs == serial.replication_throughputs
