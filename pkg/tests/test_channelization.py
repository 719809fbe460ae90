# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import pytest

from dcb_allocation_core.core.channelization import (
    allocation_choices,
    blocks_of_width,
    dcb_select,
    grouping_to_allocation_channels,
    grouping_to_allocation_wlans,
    overlap_metrics,
    sharing_components,
    valid_blocks,
)
from dcb_allocation_core.core.exceptions import (
    InfeasibleSchemeError,
    InvalidBlockError,
    PrimaryBusyError,
    ScenarioError,
)
from dcb_allocation_core.core.models.allocation import (
    BondedBlock,
    ChannelGrid,
    Channelization,
    NetworkAllocation,
    WlanAllocation,
)
from dcb_allocation_core.core.scenarios import preset


def test_valid_blocks_for_four_channels():
    blocks = valid_blocks(ChannelGrid(4))
    assert [(b.start, b.width) for b in blocks] == [(1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (3, 2), (1, 4)]
    assert len(valid_blocks(ChannelGrid(8))) == 15
    assert blocks_of_width(ChannelGrid(7), 4) == [BondedBlock(1, 4)]
    assert blocks_of_width(ChannelGrid(3), 8) == []


def test_allocation_choices_count_every_primary():
    assert len(allocation_choices(ChannelGrid(4))) == 12
    assert len(allocation_choices(ChannelGrid(1))) == 1


def test_block_alignment_is_enforced():
    with pytest.raises(InvalidBlockError):
        BondedBlock(2, 2)
    with pytest.raises(InvalidBlockError):
        BondedBlock(1, 3)
    assert not BondedBlock.contiguous(2, 3).is_standard
    assert BondedBlock(5, 4).channels == frozenset({5, 6, 7, 8})


def test_literal_parsing():
    alloc = WlanAllocation.from_literal("1~2,3,4")
    assert alloc.block == BondedBlock(1, 4) and alloc.primary == 1
    assert WlanAllocation.from_literal("1,2~").primary == 2
    assert WlanAllocation.from_literal("1,2,3~4").primary == 3
    assert WlanAllocation.from_literal("7~").block == BondedBlock(7, 1)
    assert WlanAllocation.from_literal(" 3 ~ 4 ").primary == 3


@pytest.mark.parametrize("literal", ["1,2", "1~2~", "2,3~", "1,3~", "", "1~x"])
def test_bad_literals_are_rejected(literal):
    with pytest.raises(InvalidBlockError):
        WlanAllocation.from_literal(literal)


def test_contiguous_literal_accepts_unaligned_range():
    alloc = WlanAllocation.from_literal("2,3~", Channelization.CONTIGUOUS)
    assert alloc.block.start == 2 and alloc.block.width == 2


def test_network_literal_round_trip():
    text = "1~2,3,4 5~6 7~"
    net = NetworkAllocation.from_literal(text, 7)
    assert net.to_literal() == text
    assert NetworkAllocation.from_literal(net.to_literal(), 7) == net
    assert net.names == ("A", "B", "C")


def test_network_rejects_block_outside_grid():
    with pytest.raises(InvalidBlockError):
        NetworkAllocation.from_literal("1~2,3,4", 3)
    with pytest.raises(ScenarioError):
        NetworkAllocation(ChannelGrid(4), ())


def test_dcb_select_takes_widest_idle_block():
    b = WlanAllocation.from_literal("1,2,3~4")
    assert dcb_select(b, set()) == BondedBlock(1, 4)
    assert dcb_select(b, {1}) == BondedBlock(3, 2)
    assert dcb_select(b, {4}) == BondedBlock(3, 1)
    a = WlanAllocation.from_literal("1,2~")
    assert dcb_select(a, {1}) == BondedBlock(2, 1)


def test_dcb_select_primary_busy():
    with pytest.raises(PrimaryBusyError):
        dcb_select(WlanAllocation.from_literal("1~2"), {1})


def test_dcb_select_contiguous_rule():
    alloc = WlanAllocation.from_literal("1,2~3,4", Channelization.CONTIGUOUS)
    block = dcb_select(alloc, {4}, Channelization.CONTIGUOUS)
    assert (block.start, block.width) == (1, 3)


def test_overlap_metrics_partially_overlapped():
    report = overlap_metrics(preset("partially-overlapped"))
    assert report.per_wlan_overlap == [4, 2, 2, 1]
    assert report.max_overlap == 4
    assert overlap_metrics(preset("non-overlapped")).max_overlap == 0


def test_sharing_components():
    assert sharing_components(preset("non-overlapped")) == [[0], [1], [2], [3]]
    assert sharing_components(preset("partially-overlapped")) == [[0, 1, 2, 3]]
    net = NetworkAllocation.from_literal("1~ 2~ 1~ 3~4", 4)
    assert sharing_components(net) == [[0, 2], [1], [3]]


def test_grouping_to_allocation_channels():
    assert grouping_to_allocation_channels([2, 2, 2], 7).to_literal() == "1~2 3~4 5~6"
    assert grouping_to_allocation_channels([4, 2, 1], 7).to_literal() == "1~2,3,4 5~6 7~"
    assert grouping_to_allocation_channels([4], 4).to_literal() == "1~2,3,4"
    assert overlap_metrics(grouping_to_allocation_channels([2, 1, 1], 4)).max_overlap == 0


@pytest.mark.parametrize("scheme,channels", [([1, 2], 4), ([2, 2, 4], 7), ([3], 4), ([], 4)])
def test_grouping_to_allocation_channels_rejects(scheme, channels):
    with pytest.raises(InfeasibleSchemeError):
        grouping_to_allocation_channels(scheme, channels)


def test_grouping_to_allocation_wlans():
    net = grouping_to_allocation_wlans([2, 2, 3], 7)
    assert net.to_literal() == "1~ 1~ 2~ 2~ 3~ 3~ 3~"
    assert overlap_metrics(net).max_overlap == 1
    with pytest.raises(InfeasibleSchemeError):
        grouping_to_allocation_wlans([2, 2, 2], 7)
    with pytest.raises(InfeasibleSchemeError):
        grouping_to_allocation_wlans([0, 3], 3)


def test_block_count_grows_with_grid():
    assert len(valid_blocks(ChannelGrid(17))) == 31
    assert len(valid_blocks(ChannelGrid(1))) == 1
    for k in range(2, 18):
        assert set(valid_blocks(ChannelGrid(k - 1))) <= set(valid_blocks(ChannelGrid(k)))
