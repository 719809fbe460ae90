# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
from dataclasses import dataclass
from typing import Callable, Collection, List, Sequence

import numpy as np

from dcb_allocation_core.core.exceptions import AllZeroError, DivideByZeroError, EmptySetError
from dcb_allocation_core.core.models.allocation import (
    ChannelGrid,
    NetworkAllocation,
    WlanAllocation,
)
from dcb_allocation_core.core.models.state import ThroughputReport


def jfi(throughputs: Sequence[float]) -> float:
    """Jain's fairness index (sum x)^2 / (n * sum x^2)."""
    values = np.asarray(throughputs, dtype=float)
    if values.size == 0:
        raise AllZeroError("fairness index needs at least one WLAN")
    squares = float(np.sum(values ** 2))
    if squares == 0.0:
        raise AllZeroError("fairness index is undefined when every throughput is zero")
    return float(np.sum(values) ** 2 / (values.size * squares))


def channel_utilization(grid: ChannelGrid, allocations: Collection[WlanAllocation]) -> float:
    used = set()
    for alloc in allocations:
        used |= alloc.channels
    return len(used & set(grid.channels)) / grid.num_channels


def network_utilization(net: NetworkAllocation) -> float:
    return channel_utilization(net.grid, net.allocations)


def gain(th_new: float, th_old: float) -> float:
    if th_old == 0:
        raise DivideByZeroError("gain is undefined for a zero baseline throughput")
    return (th_new - th_old) / th_old


def spectrum_efficiency(wlans: Collection[int], report: ThroughputReport, net: NetworkAllocation) -> float:
    """Throughput of a WLAN set per MHz of the channels allocated to it (bits/s/MHz)."""
    members = sorted(set(wlans))
    if not members:
        raise EmptySetError("spectrum efficiency needs a nonempty WLAN set")
    channels = set()
    for index in members:
        channels |= net[index].channels
    bandwidth_mhz = 20 * len(channels)
    return sum(report.per_wlan[i] for i in members) / bandwidth_mhz


@dataclass(frozen=True)
class SpectrumEfficiencyCase:
    """One two-WLAN overlap pattern with its closed-form efficiency.

    closed_form(rho1, rho2, rho4) returns eta / (lambda L).
    """

    name: str
    overlapped_channels: int
    literal_i: str
    literal_j: str
    closed_form: Callable[[float, float, float], float]

    @property
    def literal(self) -> str:
        return f"{self.literal_i} {self.literal_j}"

    @property
    def num_channels(self) -> int:
        return max(int(token) for token in self.literal.replace("~", " ").replace(",", " ").split())


def se_catalog() -> List[SpectrumEfficiencyCase]:
    """Two-WLAN overlap patterns sharing 1, 2 or 4 channels.

    f5 uses 1 + 2 rho(1) + rho(4) + rho(1)^2: with WLAN i on channel 1 the other WLAN falls
    back to channel 2 alone, never to a 3-channel range. f8 keeps 2 lambda L over 80 MHz.
    """
    return [
        SpectrumEfficiencyCase("f1", 1, "1~", "1~",
                               lambda r1, r2, r4: 2.0 / (20.0 * (1 + 2 * r1))),
        SpectrumEfficiencyCase("f2", 1, "1~", "1~2",
                               lambda r1, r2, r4: 2.0 / (40.0 * (1 + r1 + r2))),
        SpectrumEfficiencyCase("f3", 1, "1~", "1,2~",
                               lambda r1, r2, r4: (3 + 2 * r1) / (40.0 * (1 + 2 * r1 + r2 + r1 ** 2))),
        SpectrumEfficiencyCase("f4", 1, "1~", "1~2,3,4",
                               lambda r1, r2, r4: 2.0 / (80.0 * (1 + r1 + r4))),
        SpectrumEfficiencyCase("f5", 1, "1~", "1,2~3,4",
                               lambda r1, r2, r4: (3 + 2 * r1) / (80.0 * (1 + 2 * r1 + r4 + r1 ** 2))),
        SpectrumEfficiencyCase("f6", 1, "1~", "1,2,3~4",
                               lambda r1, r2, r4: (3 + r1 + r2) / (80.0 * (1 + r1 + r2 + r4 + r1 * r2))),
        SpectrumEfficiencyCase("f7", 2, "1~2", "1~2",
                               lambda r1, r2, r4: 2.0 / (40.0 * (1 + 2 * r2))),
        SpectrumEfficiencyCase("f8", 2, "1~2", "1~2,3,4",
                               lambda r1, r2, r4: 2.0 / (80.0 * (1 + r2 + r4))),
        SpectrumEfficiencyCase("f9", 2, "1~2", "1,2,3~4",
                               lambda r1, r2, r4: (3 + 2 * r2) / (80.0 * (1 + 2 * r2 + r4 + r2 ** 2))),
        SpectrumEfficiencyCase("f10", 4, "1~2,3,4", "1~2,3,4",
                               lambda r1, r2, r4: 2.0 / (80.0 * (1 + 2 * r4))),
    ]
