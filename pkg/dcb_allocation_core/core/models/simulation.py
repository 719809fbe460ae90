# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from dcb_allocation_core.core.exceptions import ScenarioError
from dcb_allocation_core.core.models.state import NetworkState
from dcb_allocation_core.utils.validators import Validators


class BackoffDistribution(str, Enum):
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    DETERMINISTIC = "deterministic"


class TransmissionDistribution(str, Enum):
    EXPONENTIAL = "exponential"
    DETERMINISTIC = "deterministic"


DEFAULT_WARMUP_FRACTION = 0.05


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 100.0
    warmup: Optional[float] = None
    seed: int = 0
    backoff_distribution: BackoffDistribution = BackoffDistribution.EXPONENTIAL
    transmission_distribution: TransmissionDistribution = TransmissionDistribution.EXPONENTIAL
    replications: int = 30
    collect_states: bool = False

    def __post_init__(self):
        object.__setattr__(self, "backoff_distribution", BackoffDistribution(self.backoff_distribution))
        object.__setattr__(self, "transmission_distribution",
                           TransmissionDistribution(self.transmission_distribution))
        if not Validators.is_positive_number(self.horizon):
            raise ScenarioError("simulation horizon must be positive", field="horizon")
        if self.warmup is None:
            object.__setattr__(self, "warmup", DEFAULT_WARMUP_FRACTION * self.horizon)
        if not (0.0 <= self.warmup < self.horizon):
            raise ScenarioError("warmup must lie in [0, horizon)", field="warmup")
        if not Validators.is_positive_int(self.replications):
            raise ScenarioError("at least one replication is required", field="replications")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ScenarioError("seed must be a non-negative integer", field="seed")

    @property
    def measured_time(self) -> float:
        return self.horizon - self.warmup

    def to_dict(self) -> Dict:
        return {
            "horizon": self.horizon,
            "warmup": self.warmup,
            "seed": self.seed,
            "backoff_distribution": self.backoff_distribution.value,
            "transmission_distribution": self.transmission_distribution.value,
            "replications": self.replications,
        }


@dataclass
class SimResult:
    """Throughputs in bits per second, averaged over replications."""

    per_wlan_throughput: List[float]
    confidence_halfwidth: List[float]
    replication_throughputs: List[List[float]] = field(default_factory=list)
    time_in_state: Optional[Dict[NetworkState, float]] = None
    names: Tuple[str, ...] = ()

    @property
    def aggregate(self) -> float:
        return float(sum(self.per_wlan_throughput))

    def relative_errors(self, reference: List[float]) -> List[float]:
        return [
            abs(sim - ref) / ref if ref > 0 else (0.0 if sim == 0 else math.inf)
            for sim, ref in zip(self.per_wlan_throughput, reference)
        ]

    def __str__(self) -> str:
        return f"SimResult(aggregate={self.aggregate / 1e6:.4f} Mbps, replications={len(self.replication_throughputs)})"


@dataclass
class InsensitivityReport:
    configurations: List[Tuple[str, str]]
    throughputs: List[List[float]]
    max_relative_deviation: float

    def to_dict(self) -> Dict:
        return {
            "configurations": [f"{b}/{t}" for b, t in self.configurations],
            "throughputs": self.throughputs,
            "max_relative_deviation": self.max_relative_deviation,
        }
