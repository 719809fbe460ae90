# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import re
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from dcb_allocation_core.core.exceptions import InvalidBlockError, ScenarioError
from dcb_allocation_core.utils.validators import VALID_WIDTHS, Validators

_LITERAL_TOKEN = re.compile(r"\s*(\d+)\s*(~?)\s*(,?)")


class Channelization(str, Enum):
    ALIGNED = "aligned"
    CONTIGUOUS = "contiguous"


def wlan_name(index: int) -> str:
    if index < len(string.ascii_uppercase):
        return string.ascii_uppercase[index]
    return f"W{index + 1}"


@dataclass(frozen=True)
class ChannelGrid:
    num_channels: int

    def __post_init__(self):
        if not Validators.is_positive_int(self.num_channels):
            raise ScenarioError(f"channel count must be a positive integer, got {self.num_channels!r}",
                                field="channels")

    @property
    def channels(self) -> range:
        return range(1, self.num_channels + 1)

    def fits(self, block: 'BondedBlock') -> bool:
        return block.end <= self.num_channels

    def __str__(self) -> str:
        return f"ChannelGrid(K={self.num_channels})"


@dataclass(frozen=True, order=True)
class BondedBlock:
    start: int
    width: int
    aligned: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not Validators.is_positive_int(self.start) or not Validators.is_positive_int(self.width):
            raise InvalidBlockError(f"invalid block start={self.start!r} width={self.width!r}")
        if self.aligned:
            valid, message = Validators.validate_block(self.start, self.width)
            if not valid:
                raise InvalidBlockError(message)

    @classmethod
    def contiguous(cls, start: int, width: int) -> 'BondedBlock':
        """Block of any width, standard or not; used by the raw contiguous rule."""
        return cls(start, width, aligned=False)

    @property
    def end(self) -> int:
        return self.start + self.width - 1

    @property
    def channels(self) -> FrozenSet[int]:
        return frozenset(range(self.start, self.end + 1))

    @property
    def bandwidth_mhz(self) -> int:
        return 20 * self.width

    @property
    def is_standard(self) -> bool:
        return self.width in VALID_WIDTHS and Validators.is_aligned(self.start, self.width)

    def contains(self, channel: int) -> bool:
        return self.start <= channel <= self.end

    def within(self, other: 'BondedBlock') -> bool:
        return other.start <= self.start and self.end <= other.end

    def overlaps(self, channels) -> bool:
        return any(self.contains(c) for c in channels)

    @property
    def label(self) -> str:
        return f"{self.start}w{self.width}"

    def __str__(self) -> str:
        return "{" + ",".join(str(c) for c in range(self.start, self.end + 1)) + "}"


@dataclass(frozen=True, order=True)
class WlanAllocation:
    block: BondedBlock
    primary: int

    def __post_init__(self):
        if not self.block.contains(self.primary):
            raise InvalidBlockError(f"primary channel {self.primary} is outside block {self.block}")

    @property
    def width(self) -> int:
        return self.block.width

    @property
    def channels(self) -> FrozenSet[int]:
        return self.block.channels

    @property
    def bandwidth_mhz(self) -> int:
        return self.block.bandwidth_mhz

    def to_literal(self) -> str:
        parts = []
        for channel in range(self.block.start, self.block.end + 1):
            if parts and not parts[-1].endswith("~"):
                parts.append(",")
            parts.append(f"{channel}~" if channel == self.primary else str(channel))
        return "".join(parts)

    @classmethod
    def from_literal(cls, text: str, channelization: Channelization = Channelization.ALIGNED) -> 'WlanAllocation':
        """Parse the tilde syntax: the channel written right before '~' is the primary.

        "1~2" is {1,2} with primary 1, "1,2,3~4" is {1..4} with primary 3 and "7~" is {7}.
        """
        source = text.strip()
        channels: List[int] = []
        primary: Optional[int] = None
        position = 0
        while position < len(source):
            match = _LITERAL_TOKEN.match(source, position)
            if match is None or match.end() == position:
                raise InvalidBlockError(f"cannot parse allocation literal {text!r} at offset {position}")
            channel = int(match.group(1))
            if match.group(2):
                if primary is not None:
                    raise InvalidBlockError(f"allocation literal {text!r} marks more than one primary")
                primary = channel
            channels.append(channel)
            position = match.end()
            if not match.group(2) and not match.group(3) and position < len(source):
                raise InvalidBlockError(f"missing separator in allocation literal {text!r}")

        if not channels:
            raise InvalidBlockError("empty allocation literal")
        if primary is None:
            raise InvalidBlockError(f"allocation literal {text!r} has no primary channel (mark it with '~')")
        if channels != list(range(channels[0], channels[0] + len(channels))):
            raise InvalidBlockError(f"allocation literal {text!r} is not an ascending contiguous range")

        aligned = channelization == Channelization.ALIGNED
        block = BondedBlock(channels[0], len(channels), aligned=aligned)
        return cls(block, primary)

    def __str__(self) -> str:
        return self.to_literal()


@dataclass(frozen=True)
class NetworkAllocation:
    grid: ChannelGrid
    allocations: Tuple[WlanAllocation, ...]
    names: Tuple[str, ...] = ()
    channelization: Channelization = Channelization.ALIGNED

    def __post_init__(self):
        object.__setattr__(self, "allocations", tuple(self.allocations))
        if not self.allocations:
            raise ScenarioError("a network needs at least one WLAN", field="wlans")
        for index, alloc in enumerate(self.allocations):
            if not self.grid.fits(alloc.block):
                raise InvalidBlockError(
                    f"WLAN {index + 1} block {alloc.block} exceeds {self.grid.num_channels} channels")
            if self.channelization == Channelization.ALIGNED and not alloc.block.is_standard:
                raise InvalidBlockError(f"WLAN {index + 1} block {alloc.block} is not a standard bonded block")
        if self.names:
            names = tuple(self.names)
            if len(names) != len(self.allocations):
                raise ScenarioError("one name per WLAN is required", field="names")
            if len(set(names)) != len(names):
                raise ScenarioError("WLAN names must be unique", field="names")
        else:
            names = tuple(wlan_name(i) for i in range(len(self.allocations)))
        object.__setattr__(self, "names", names)

    def __len__(self) -> int:
        return len(self.allocations)

    def __iter__(self) -> Iterator[WlanAllocation]:
        return iter(self.allocations)

    def __getitem__(self, index: int) -> WlanAllocation:
        return self.allocations[index]

    @property
    def num_wlans(self) -> int:
        return len(self.allocations)

    @property
    def used_channels(self) -> FrozenSet[int]:
        used = set()
        for alloc in self.allocations:
            used |= alloc.channels
        return frozenset(used)

    def subnetwork(self, indices: Sequence[int]) -> 'NetworkAllocation':
        return NetworkAllocation(
            grid=self.grid,
            allocations=tuple(self.allocations[i] for i in indices),
            names=tuple(self.names[i] for i in indices),
            channelization=self.channelization,
        )

    def to_literal(self) -> str:
        return " ".join(alloc.to_literal() for alloc in self.allocations)

    @classmethod
    def from_literal(cls, text: str, num_channels: int,
                     channelization: Channelization = Channelization.ALIGNED) -> 'NetworkAllocation':
        literals = text.split()
        return cls(
            grid=ChannelGrid(num_channels),
            allocations=tuple(WlanAllocation.from_literal(item, channelization) for item in literals),
            channelization=channelization,
        )

    def to_dict(self) -> Dict:
        return {
            "channels": self.grid.num_channels,
            "channelization": self.channelization.value,
            "wlans": [
                {"name": name, "allocation": alloc.to_literal()}
                for name, alloc in zip(self.names, self.allocations)
            ],
        }

    def __str__(self) -> str:
        return f"NetworkAllocation(K={self.grid.num_channels}, f=[{self.to_literal()}])"


@dataclass
class OverlapReport:
    per_wlan_overlap: List[int]
    max_overlap: int
    overlap_sets: List[Tuple[FrozenSet[int], FrozenSet[int]]]

    def to_dict(self) -> Dict:
        return {
            "per_wlan_overlap": list(self.per_wlan_overlap),
            "max_overlap": self.max_overlap,
            "overlap_sets": [
                {"wlans": sorted(wlans), "channels": sorted(channels)}
                for wlans, channels in self.overlap_sets
            ],
        }
