# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from dcb_allocation_core.core.exceptions import ScenarioError
from dcb_allocation_core.core.models.params import ActivityModel, FittedActivityModel
from dcb_allocation_core.utils.validators import Validators

CHANNELS_REGIME = "channels"
WLANS_REGIME = "wlans"


def format_value(value: float) -> str:
    """Integers as-is, simple fractions as p/q, anything else to 6 decimals."""
    if abs(value - round(value)) < 1e-9:
        return str(int(round(value)))
    fraction = Fraction(value).limit_denominator(64)
    if abs(float(fraction) - value) < 1e-9:
        return f"{fraction.numerator}/{fraction.denominator}"
    return f"{value:.6f}"


def format_vector(values: Sequence[float]) -> str:
    return "{" + ",".join(format_value(v) for v in values) + "}"


@dataclass(frozen=True)
class ProblemInstance:
    num_wlans: int
    num_channels: int
    activity: ActivityModel
    fit: FittedActivityModel = field(default_factory=FittedActivityModel)

    def __post_init__(self):
        if not Validators.is_positive_int(self.num_wlans):
            raise ScenarioError("number of WLANs must be a positive integer", field="wlans")
        if not Validators.is_positive_int(self.num_channels):
            raise ScenarioError("number of channels must be a positive integer", field="channels")

    @property
    def regime(self) -> str:
        return CHANNELS_REGIME if self.num_wlans <= self.num_channels else WLANS_REGIME

    def __str__(self) -> str:
        return f"ProblemInstance(N={self.num_wlans}, K={self.num_channels})"


@dataclass(frozen=True)
class GroupingChannels:
    k: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))

    def is_feasible(self, num_channels: int, widths: Sequence[int] = (1, 2, 4, 8)) -> bool:
        return all(v in widths for v in self.k) and sum(self.k) <= num_channels

    def canonical(self) -> 'GroupingChannels':
        return GroupingChannels(tuple(sorted(self.k)))

    def packing_order(self) -> Tuple[int, ...]:
        """Widest groups first, so every packed block starts on its alignment boundary."""
        return tuple(sorted(self.k, reverse=True))

    def __str__(self) -> str:
        return format_vector(self.k)


@dataclass(frozen=True)
class GroupingWlans:
    n: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))

    def is_feasible(self, num_wlans: int) -> bool:
        return all(v >= 1 for v in self.n) and sum(self.n) == num_wlans

    def canonical(self) -> 'GroupingWlans':
        return GroupingWlans(tuple(sorted(self.n)))

    def __str__(self) -> str:
        return format_vector(self.n)


Grouping = Union[GroupingChannels, GroupingWlans]


@dataclass
class BnbNode:
    """Box-constrained relaxation of one branch.

    relaxed_value is the relaxation objective at relaxed_solution; upper_bound is the
    bound used for pruning and never falls below an exact completion inside the box.
    """

    lower_bounds: Tuple[float, ...]
    upper_bounds: Tuple[float, ...]
    relaxed_solution: Tuple[float, ...]
    relaxed_value: float
    upper_bound: float
    depth: int = 0

    def is_integral(self, tol: float = 1e-9) -> bool:
        return all(abs(v - round(v)) <= tol for v in self.relaxed_solution)

    def rounded(self) -> Tuple[int, ...]:
        return tuple(int(round(v)) for v in self.relaxed_solution)

    def __str__(self) -> str:
        return f"BnbNode({format_vector(self.relaxed_solution)}, value={self.relaxed_value / 1e6:.4f} Mbps)"


@dataclass
class TraceEntry:
    scheme: Tuple[float, ...]
    feasible: bool
    value: Optional[float]

    @property
    def label(self) -> str:
        return format_vector(self.scheme)


@dataclass
class TraceRow:
    iteration: int
    entries: List[TraceEntry]
    lower_bound: float
    upper_bound: float


@dataclass
class BnbResult:
    best_scheme: Grouping
    best_value: float
    trace: List[TraceRow] = field(default_factory=list)
    nodes_explored: int = 0
    incumbent_history: List[float] = field(default_factory=list)
    explored: List[BnbNode] = field(default_factory=list)

    def __str__(self) -> str:
        return (f"BnbResult(best={self.best_scheme}, value={self.best_value / 1e6:.4f} Mbps, "
                f"nodes={self.nodes_explored})")

    def trace_rows(self) -> Tuple[List[str], List[list]]:
        header = ["iteration", "scheme", "feasible", "objective", "lower_bound", "upper_bound"]
        rows = []
        for row in self.trace:
            for entry in row.entries:
                rows.append([
                    row.iteration,
                    entry.label,
                    "yes" if entry.feasible else "no",
                    "/" if entry.value is None else entry.value / 1e6,
                    row.lower_bound / 1e6,
                    row.upper_bound / 1e6,
                ])
        return header, rows

    def to_dict(self) -> Dict:
        return {
            "best_scheme": list(getattr(self.best_scheme, "k", getattr(self.best_scheme, "n", ()))),
            "best_value": self.best_value,
            "nodes_explored": self.nodes_explored,
        }


@dataclass
class GreedyStep:
    scheme: Tuple[int, ...]
    feasible: bool
    value: Optional[float]


@dataclass
class GreedyResult:
    scheme: Grouping
    value: float
    steps: List[GreedyStep] = field(default_factory=list)

    def trace_rows(self) -> Tuple[List[str], List[list]]:
        header = ["iteration", "scheme", "feasible", "objective"]
        rows = [
            [i, format_vector(step.scheme), "yes" if step.feasible else "no",
             "/" if step.value is None else step.value / 1e6]
            for i, step in enumerate(self.steps, start=1)
        ]
        return header, rows
