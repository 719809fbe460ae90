# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
from typing import Dict, List, Tuple

from dcb_allocation_core.core.exceptions import ScenarioError
from dcb_allocation_core.core.models.allocation import ChannelGrid, NetworkAllocation, WlanAllocation

# name -> (channels, [(wlan, literal), ...])
PRESETS: Dict[str, Tuple[int, List[Tuple[str, str]]]] = {
    "bonding-pair": (4, [("A", "1,2~"), ("B", "1,2,3~4")]),
    "totally-overlapped": (4, [("A", "1~2,3,4"), ("B", "1,2~3,4"), ("C", "1,2,3~4"), ("D", "1,2,3,4~")]),
    "non-overlapped": (4, [("A", "1~"), ("B", "2~"), ("C", "3~"), ("D", "4~")]),
    "partially-overlapped": (4, [("A", "1~2,3,4"), ("B", "1,2~"), ("C", "3~4"), ("D", "4~")]),
    "partially-primary-overlapped": (4, [("A", "1~2,3,4"), ("B", "1~2"), ("C", "3,4~"), ("D", "4~")]),
}

SCENARIO_ORDER = ("totally-overlapped", "non-overlapped", "partially-overlapped", "partially-primary-overlapped")


def preset_names() -> List[str]:
    return list(PRESETS)


def preset(name: str) -> NetworkAllocation:
    if name not in PRESETS:
        raise ScenarioError(f"unknown scenario preset {name!r}; choose from {', '.join(PRESETS)}")
    channels, wlans = PRESETS[name]
    return NetworkAllocation(
        grid=ChannelGrid(channels),
        allocations=tuple(WlanAllocation.from_literal(literal) for _, literal in wlans),
        names=tuple(wlan for wlan, _ in wlans),
    )


def preset_dict(name: str) -> Dict:
    return preset(name).to_dict()


def closed_form_aggregates(rho1: float, rho2: float, rho4: float) -> Dict[str, float]:
    """Aggregate throughput of the four-WLAN scenarios divided by lambda L."""
    return {
        "totally-overlapped": 4.0 / (1 + 4 * rho4),
        "non-overlapped": 4.0 / (1 + rho1),
        "partially-overlapped": (
            (6 + 8 * rho2 + 6 * rho1 + 2 * rho1 ** 2 + 4 * rho1 * rho2)
            / (1 + rho4 + 3 * rho2 + 2 * rho1 + 2 * rho2 ** 2 + 4 * rho1 * rho2 + rho1 ** 2
               + 2 * rho1 ** 2 * rho2)
        ),
        "partially-primary-overlapped": (
            (5 + 6 * rho2 + 2 * rho1)
            / (1 + rho4 + 3 * rho2 + rho1 + 2 * rho2 ** 2 + 2 * rho1 * rho2)
        ),
    }


def bonding_pair_closed_form(rho_a2: float, rho_b2: float, rho_b4: float) -> List[float]:
    """Stationary probabilities of the two-WLAN example in enumeration order."""
    empty = 1.0 / (1 + rho_a2 + rho_b2 + rho_b4 + rho_a2 * rho_b2)
    return [empty, rho_a2 * empty, rho_b4 * empty, rho_a2 * rho_b2 * empty, rho_b2 * empty]
