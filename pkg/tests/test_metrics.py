# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import pytest

from dcb_allocation_core.core.ctmc_engine import enumerate_state_space, evaluate_network
from dcb_allocation_core.core.exceptions import AllZeroError, DivideByZeroError, EmptySetError
from dcb_allocation_core.core.mac_phy import activity_ratio, lambda_L
from dcb_allocation_core.core.metrics import (
    channel_utilization,
    gain,
    jfi,
    network_utilization,
    se_catalog,
    spectrum_efficiency,
)
from dcb_allocation_core.core.models.allocation import ChannelGrid, NetworkAllocation, WlanAllocation
from dcb_allocation_core.core.scenarios import preset
from dcb_allocation_core.services.analysis_service import AnalysisService


def test_jfi():
    assert jfi([5.0, 5.0, 5.0]) == pytest.approx(1.0)
    assert jfi([1.0, 0.0]) == pytest.approx(0.5)
    assert jfi([3.0, 1.0]) == pytest.approx(16.0 / 20.0)
    for values in ([], [0.0, 0.0]):
        with pytest.raises(AllZeroError):
            jfi(values)


def test_gain():
    assert gain(150.0, 100.0) == pytest.approx(0.5)
    assert gain(50.0, 100.0) == pytest.approx(-0.5)
    with pytest.raises(DivideByZeroError):
        gain(1.0, 0.0)


def test_channel_utilization():
    grid = ChannelGrid(8)
    assert channel_utilization(grid, [WlanAllocation.from_literal("1~2,3,4")]) == 0.5
    assert channel_utilization(grid, []) == 0.0
    assert network_utilization(preset("totally-overlapped")) == 1.0
    assert network_utilization(NetworkAllocation.from_literal("1~ 1~", 4)) == 0.25


def test_spectrum_efficiency_counts_union_of_channels(model):
    net = NetworkAllocation.from_literal("1~ 1~2", 2)
    report = evaluate_network(net, model)
    assert spectrum_efficiency([0, 1], report, net) == pytest.approx(report.aggregate / 40.0)
    assert spectrum_efficiency([0], report, net) == pytest.approx(report.per_wlan[0] / 20.0)
    with pytest.raises(EmptySetError):
        spectrum_efficiency([], report, net)


def test_se_catalog_matches_ctmc(model):
    rows = AnalysisService().spectrum_efficiency_table(model)
    assert [row.case.name for row in rows] == [f"f{i}" for i in range(1, 11)]
    for row in rows:
        assert row.ctmc == pytest.approx(row.closed_form, rel=1e-9), row.case.name
        assert row.to_dict()["allocation"] == row.case.literal


def test_single_channel_sharing_is_most_efficient(model):
    rhos = [activity_ratio(model, w) for w in (1, 2, 4)]
    values = {case.name: case.closed_form(*rhos) for case in se_catalog()}
    assert max(values, key=values.get) == "f1"


def test_primary_two_block_falls_back_to_its_primary_alone(model):
    net = NetworkAllocation.from_literal("1~ 1,2~3,4", 4)
    space = enumerate_state_space(net)
    widths = sorted(state.block_of(1).width for state in space if state.block_of(1) is not None)
    assert widths == [1, 1, 4]

    case = next(case for case in se_catalog() if case.name == "f5")
    rhos = [activity_ratio(model, w) for w in (1, 2, 4)]
    report = evaluate_network(net, model)
    eta = spectrum_efficiency([0, 1], report, net) / lambda_L(model)
    assert eta == pytest.approx(case.closed_form(*rhos), rel=1e-9)
