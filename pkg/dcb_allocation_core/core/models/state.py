# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from dcb_allocation_core.core.models.allocation import BondedBlock, NetworkAllocation

ACTIVATION = "activation"
DEPARTURE = "departure"


@dataclass(frozen=True)
class NetworkState:
    """Concurrent transmissions as (wlan index, block) pairs, sorted by wlan index."""

    active: Tuple[Tuple[int, BondedBlock], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "active", tuple(sorted(self.active)))

    @property
    def busy(self) -> FrozenSet[int]:
        channels = set()
        for _, block in self.active:
            channels |= block.channels
        return frozenset(channels)

    @property
    def wlans(self) -> FrozenSet[int]:
        return frozenset(i for i, _ in self.active)

    def is_empty(self) -> bool:
        return not self.active

    def block_of(self, wlan: int) -> Optional[BondedBlock]:
        for index, block in self.active:
            if index == wlan:
                return block
        return None

    def activate(self, wlan: int, block: BondedBlock) -> 'NetworkState':
        return NetworkState(self.active + ((wlan, block),))

    def deactivate(self, wlan: int) -> 'NetworkState':
        return NetworkState(tuple(pair for pair in self.active if pair[0] != wlan))

    def is_disjoint(self) -> bool:
        seen = set()
        for _, block in self.active:
            if seen & block.channels:
                return False
            seen |= block.channels
        return True

    def label(self, names: Sequence[str]) -> str:
        """CSV form, e.g. "A:1w2;B:3w2"; the empty state is "-"."""
        if not self.active:
            return "-"
        return ";".join(f"{names[i]}:{block.label}" for i, block in self.active)

    def notation(self, names: Sequence[str]) -> str:
        """Compact form name_width^start, e.g. "A_2^1B_2^3"; the empty state is "0"."""
        if not self.active:
            return "0"
        return "".join(f"{names[i]}_{block.width}^{block.start}" for i, block in self.active)


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    kind: str
    wlan: int
    width: int

    def rate(self, model) -> float:
        if self.kind == ACTIVATION:
            return model.rate(self.wlan)
        return 1.0 / model.durations.duration(self.width)


@dataclass
class StateSpace:
    net: NetworkAllocation
    states: List[NetworkState]
    transitions: List[Transition]
    _index: Dict[NetworkState, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {state: i for i, state in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[NetworkState]:
        return iter(self.states)

    def index_of(self, state: NetworkState) -> int:
        return self._index[state]

    def __contains__(self, state: NetworkState) -> bool:
        return state in self._index

    def notations(self) -> List[str]:
        return [state.notation(self.net.names) for state in self.states]


@dataclass
class Distribution:
    space: StateSpace
    probabilities: np.ndarray

    def __getitem__(self, state: NetworkState) -> float:
        return float(self.probabilities[self.space.index_of(state)])

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    @property
    def empty_probability(self) -> float:
        return float(self.probabilities[0])

    def as_dict(self) -> Dict[NetworkState, float]:
        return {state: float(p) for state, p in zip(self.space.states, self.probabilities)}

    def max_abs_difference(self, other: 'Distribution') -> float:
        return float(np.max(np.abs(self.probabilities - other.probabilities)))


@dataclass
class ThroughputReport:
    """Throughputs in bits per second."""

    per_wlan: List[float]
    aggregate: float
    jfi: float
    channel_utilization: float
    spectrum_efficiency: Optional[float] = None
    names: Tuple[str, ...] = ()

    def __str__(self) -> str:
        return (f"ThroughputReport(aggregate={self.aggregate / 1e6:.4f} Mbps, "
                f"jfi={self.jfi:.4f}, cu={self.channel_utilization:.4f})")

    @property
    def per_wlan_mbps(self) -> List[float]:
        return [value / 1e6 for value in self.per_wlan]

    def to_dict(self) -> Dict:
        data = {
            "per_wlan": dict(zip(self.names, self.per_wlan)) if self.names else list(self.per_wlan),
            "aggregate": self.aggregate,
            "jfi": self.jfi,
            "channel_utilization": self.channel_utilization,
        }
        if self.spectrum_efficiency is not None and not math.isnan(self.spectrum_efficiency):
            data["spectrum_efficiency"] = self.spectrum_efficiency
        return data
