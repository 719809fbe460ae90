# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
from typing import Collection, Dict, FrozenSet, List, Sequence, Set, Tuple

from dcb_allocation_core.core.exceptions import InfeasibleSchemeError, PrimaryBusyError
from dcb_allocation_core.core.models.allocation import (
    BondedBlock,
    ChannelGrid,
    Channelization,
    NetworkAllocation,
    OverlapReport,
    WlanAllocation,
)
from dcb_allocation_core.utils.validators import VALID_WIDTHS, Validators

MAX_BONDED_CHANNELS = max(VALID_WIDTHS)


def valid_blocks(grid: ChannelGrid) -> List[BondedBlock]:
    """Every aligned 20/40/80/160 MHz block that fits the grid, sorted by (width, start)."""
    blocks = []
    for width in VALID_WIDTHS:
        for start in range(1, grid.num_channels - width + 2, width):
            blocks.append(BondedBlock(start, width))
    return blocks


def blocks_of_width(grid: ChannelGrid, width: int) -> List[BondedBlock]:
    return [b for b in valid_blocks(grid) if b.width == width]


def allocation_choices(grid: ChannelGrid) -> List[WlanAllocation]:
    """Every (block, primary) pair a single WLAN can be given."""
    return [
        WlanAllocation(block, primary)
        for block in valid_blocks(grid)
        for primary in range(block.start, block.end + 1)
    ]


def dcb_select(alloc: WlanAllocation, busy: Collection[int],
               channelization: Channelization = Channelization.ALIGNED) -> BondedBlock:
    """Widest idle block inside the allocation that contains the primary channel."""
    if alloc.primary in busy:
        raise PrimaryBusyError(f"primary channel {alloc.primary} is busy")

    if channelization == Channelization.CONTIGUOUS:
        low = alloc.primary
        while low - 1 >= alloc.block.start and (low - 1) not in busy:
            low -= 1
        high = alloc.primary
        while high + 1 <= alloc.block.end and (high + 1) not in busy:
            high += 1
        return BondedBlock.contiguous(low, high - low + 1)

    for width in sorted((w for w in VALID_WIDTHS if w <= alloc.block.width), reverse=True):
        start = ((alloc.primary - 1) // width) * width + 1
        candidate = BondedBlock(start, width)
        if candidate.within(alloc.block) and not candidate.overlaps(busy):
            return candidate
    # width 1 always qualifies once the primary is idle
    raise PrimaryBusyError(f"no idle block contains primary channel {alloc.primary}")


def overlap_metrics(net: NetworkAllocation) -> OverlapReport:
    users: Dict[int, Set[int]] = {}
    for index, alloc in enumerate(net):
        for channel in alloc.channels:
            users.setdefault(channel, set()).add(index)

    grouped: Dict[FrozenSet[int], Set[int]] = {}
    for channel in sorted(users):
        wlans = frozenset(users[channel])
        if len(wlans) >= 2:
            grouped.setdefault(wlans, set()).add(channel)

    overlap_sets: List[Tuple[FrozenSet[int], FrozenSet[int]]] = sorted(
        ((wlans, frozenset(channels)) for wlans, channels in grouped.items()),
        key=lambda item: (min(item[1]), sorted(item[0])),
    )

    per_wlan = []
    for index in range(len(net)):
        shared: Set[int] = set()
        for wlans, channels in overlap_sets:
            if index in wlans:
                shared |= channels
        per_wlan.append(len(shared))

    return OverlapReport(per_wlan_overlap=per_wlan, max_overlap=max(per_wlan), overlap_sets=overlap_sets)


def sharing_components(net: NetworkAllocation) -> List[List[int]]:
    """Groups of WLANs linked by shared channels; different groups never interact."""
    parent = list(range(len(net)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: Dict[int, int] = {}
    for index, alloc in enumerate(net):
        for channel in alloc.channels:
            if channel in owner:
                parent[find(index)] = find(owner[channel])
            else:
                owner[channel] = index

    components: Dict[int, List[int]] = {}
    for index in range(len(net)):
        components.setdefault(find(index), []).append(index)
    return sorted(components.values(), key=lambda members: members[0])


def grouping_to_allocation_channels(scheme: Sequence[int], num_channels: int) -> NetworkAllocation:
    """Pack k_i channels per WLAN left to right, primary on the first channel of each range."""
    widths = [int(k) for k in scheme]
    if not widths:
        raise InfeasibleSchemeError("grouping scheme is empty")
    for k in widths:
        if k not in VALID_WIDTHS:
            raise InfeasibleSchemeError(f"channel count {k} is not one of {VALID_WIDTHS}")
    if sum(widths) > num_channels:
        raise InfeasibleSchemeError(f"scheme {widths} needs {sum(widths)} channels, only {num_channels} available")

    allocations = []
    start = 1
    for k in widths:
        k = min(k, MAX_BONDED_CHANNELS)
        if not Validators.is_aligned(start, k):
            raise InfeasibleSchemeError(
                f"scheme {widths} places a {k}-channel block at channel {start}; list wider groups first")
        allocations.append(WlanAllocation(BondedBlock(start, k), start))
        start += k
    return NetworkAllocation(ChannelGrid(num_channels), tuple(allocations))


def grouping_to_allocation_wlans(scheme: Sequence[int], num_wlans: int) -> NetworkAllocation:
    """Put the first n_1 WLANs on channel 1, the next n_2 on channel 2 and so on."""
    counts = [int(n) for n in scheme]
    if not counts or any(n < 1 for n in counts):
        raise InfeasibleSchemeError(f"every group needs at least one WLAN, got {counts}")
    if sum(counts) != num_wlans:
        raise InfeasibleSchemeError(f"groups {counts} hold {sum(counts)} WLANs, expected {num_wlans}")

    allocations = []
    for channel, count in enumerate(counts, start=1):
        allocations.extend([WlanAllocation(BondedBlock(channel, 1), channel)] * count)
    return NetworkAllocation(ChannelGrid(len(counts)), tuple(allocations))
