# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

from dcb_allocation_core.core.exceptions import ScenarioError, UnknownWidthError
from dcb_allocation_core.utils.validators import VALID_WIDTHS, Validators

DEFAULT_DURATIONS_MS: Dict[int, float] = {1: 12.26, 2: 6.63, 4: 4.64, 8: 3.52}

# data subcarriers, bits per symbol, coding rate
DEFAULT_DURATION_METADATA: Dict[int, Tuple[int, int, float]] = {
    1: (52, 6, 5 / 6),
    2: (108, 6, 3 / 4),
    4: (234, 4, 3 / 4),
    8: (468, 4, 1 / 2),
}

DEFAULT_FIT_A = 0.7624
DEFAULT_FIT_B = 168.2


@dataclass(frozen=True)
class DurationTable:
    """Transmission duration T(k') in seconds, keyed by the number of bonded basic channels."""

    entries: Dict[int, float]
    metadata: Dict[int, Tuple[int, int, float]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        entries = {int(k): float(v) for k, v in self.entries.items()}
        if not entries:
            raise ScenarioError("duration table is empty", field="duration_table_ms")
        for width, duration in entries.items():
            if width not in VALID_WIDTHS:
                raise ScenarioError(f"duration table width {width} is not one of {VALID_WIDTHS}",
                                    field="duration_table_ms")
            if not Validators.is_positive_number(duration):
                raise ScenarioError(f"duration for width {width} must be positive", field="duration_table_ms")
        if 1 not in entries:
            raise ScenarioError("duration table needs an entry for one channel", field="duration_table_ms")
        ordered = [entries[k] for k in sorted(entries)]
        if any(later >= earlier for earlier, later in zip(ordered, ordered[1:])):
            raise ScenarioError("durations must strictly decrease with the channel count",
                                field="duration_table_ms")
        object.__setattr__(self, "entries", dict(sorted(entries.items())))

    @classmethod
    def default(cls) -> 'DurationTable':
        return cls.from_milliseconds(DEFAULT_DURATIONS_MS, metadata=DEFAULT_DURATION_METADATA)

    @classmethod
    def from_milliseconds(cls, table: Dict[Any, float],
                          metadata: Optional[Dict[int, Tuple[int, int, float]]] = None) -> 'DurationTable':
        try:
            entries = {int(k): float(v) / 1000.0 for k, v in table.items()}
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"bad duration table: {e}", field="duration_table_ms")
        return cls(entries, dict(metadata or {}))

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(self.entries)

    def duration(self, width: int) -> float:
        try:
            return self.entries[width]
        except KeyError:
            raise UnknownWidthError(f"no transmission duration tabulated for {width} channel(s)")

    def to_dict(self) -> Dict[str, float]:
        return {str(k): round(v * 1000.0, 9) for k, v in self.entries.items()}


@dataclass(frozen=True)
class FittedActivityModel:
    """Continuous activity ratio rho'(k) = b / k**a."""

    a: float = DEFAULT_FIT_A
    b: float = DEFAULT_FIT_B
    correlation: Optional[float] = field(default=None, compare=False)

    MIN_CORRELATION = 0.98

    def __post_init__(self):
        if not Validators.is_positive_number(self.a) or not Validators.is_positive_number(self.b):
            raise ScenarioError(f"fit parameters must be positive, got a={self.a!r} b={self.b!r}", field="fit")

    @property
    def acceptable(self) -> bool:
        return self.correlation is None or self.correlation >= self.MIN_CORRELATION

    def to_dict(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b}

    def __str__(self) -> str:
        text = f"rho'(k) = {self.b:.4f} / k^{self.a:.4f}"
        if self.correlation is not None:
            text += f" (r={self.correlation:.4f})"
        return text


@dataclass(frozen=True)
class MacPhyParams:
    packet_length_bits: int = 12000
    aggregated_packets: int = 64
    contention_window_slots: int = 16
    slot_duration: float = 9e-6
    packet_error_prob: float = 0.0
    durations: DurationTable = field(default_factory=DurationTable.default)
    fit: FittedActivityModel = field(default_factory=FittedActivityModel)

    KEYS = ("packet_length_bits", "aggregated_packets", "contention_window_slots",
            "slot_duration_us", "packet_error_prob", "duration_table_ms", "fit")

    def __post_init__(self):
        for name in ("packet_length_bits", "aggregated_packets", "contention_window_slots"):
            if not Validators.is_positive_int(getattr(self, name)):
                raise ScenarioError(f"{name} must be a positive integer", field=name)
        if not Validators.is_positive_number(self.slot_duration):
            raise ScenarioError("slot duration must be positive", field="slot_duration_us")
        if not Validators.is_probability(self.packet_error_prob):
            raise ScenarioError("packet error probability must lie in [0, 1)", field="packet_error_prob")

    @property
    def mean_backoff(self) -> float:
        return self.contention_window_slots * self.slot_duration / 2.0

    @property
    def attempt_rate(self) -> float:
        return 1.0 / self.mean_backoff

    @property
    def payload_bits(self) -> int:
        return self.aggregated_packets * self.packet_length_bits

    def with_contention_window(self, slots: int) -> 'MacPhyParams':
        return replace(self, contention_window_slots=slots)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "packet_length_bits": self.packet_length_bits,
            "aggregated_packets": self.aggregated_packets,
            "contention_window_slots": self.contention_window_slots,
            "slot_duration_us": round(self.slot_duration * 1e6, 9),
            "packet_error_prob": self.packet_error_prob,
            "duration_table_ms": self.durations.to_dict(),
            "fit": self.fit.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MacPhyParams':
        if not isinstance(data, dict):
            raise ScenarioError("parameters must be a JSON object", field="parameters")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise ScenarioError(f"unknown parameter key {unknown[0]!r}", field=unknown[0])

        defaults = cls()
        durations = defaults.durations
        if "duration_table_ms" in data:
            if not isinstance(data["duration_table_ms"], dict):
                raise ScenarioError("duration table must be an object", field="duration_table_ms")
            durations = DurationTable.from_milliseconds(data["duration_table_ms"])

        fit = defaults.fit
        if "fit" in data:
            fit_data = data["fit"]
            if not isinstance(fit_data, dict) or set(fit_data) - {"a", "b"}:
                raise ScenarioError("fit must be an object with keys 'a' and 'b'", field="fit")
            fit = FittedActivityModel(a=fit_data.get("a", DEFAULT_FIT_A), b=fit_data.get("b", DEFAULT_FIT_B))

        slot_us = data.get("slot_duration_us", defaults.slot_duration * 1e6)
        if not Validators.is_positive_number(slot_us):
            raise ScenarioError("slot duration must be positive", field="slot_duration_us")

        return cls(
            packet_length_bits=data.get("packet_length_bits", defaults.packet_length_bits),
            aggregated_packets=data.get("aggregated_packets", defaults.aggregated_packets),
            contention_window_slots=data.get("contention_window_slots", defaults.contention_window_slots),
            slot_duration=slot_us * 1e-6,
            packet_error_prob=data.get("packet_error_prob", defaults.packet_error_prob),
            durations=durations,
            fit=fit,
        )


@dataclass(frozen=True)
class ActivityModel:
    """Per-network activity: mean backoff E[B], payload L and the duration table.

    attempt_overrides / payload_overrides map a WLAN index to its own lambda_i / L_i.
    """

    durations: DurationTable
    mean_backoff: float
    payload_bits: float
    packet_error_prob: float = 0.0
    attempt_overrides: Dict[int, float] = field(default_factory=dict)
    payload_overrides: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.mean_backoff > 0):
            raise ScenarioError("mean backoff must be positive", field="mean_backoff")
        if not Validators.is_positive_number(self.payload_bits):
            raise ScenarioError("payload must be positive", field="payload_bits")
        if not Validators.is_probability(self.packet_error_prob):
            raise ScenarioError("packet error probability must lie in [0, 1)", field="packet_error_prob")
        for index, rate in self.attempt_overrides.items():
            if rate is None or rate < 0 or not math.isfinite(rate):
                raise ScenarioError(f"attempt rate of WLAN {index + 1} must be finite and >= 0",
                                    field="attempt_rate")
        for index, payload in self.payload_overrides.items():
            if not Validators.is_positive_number(payload):
                raise ScenarioError(f"payload of WLAN {index + 1} must be positive", field="payload_bits")

    @classmethod
    def from_params(cls, params: MacPhyParams) -> 'ActivityModel':
        return cls(
            durations=params.durations,
            mean_backoff=params.mean_backoff,
            payload_bits=params.payload_bits,
            packet_error_prob=params.packet_error_prob,
        )

    @property
    def attempt_rate(self) -> float:
        return 0.0 if math.isinf(self.mean_backoff) else 1.0 / self.mean_backoff

    def rate(self, wlan: Optional[int] = None) -> float:
        if wlan is not None and wlan in self.attempt_overrides:
            return self.attempt_overrides[wlan]
        return self.attempt_rate

    def payload(self, wlan: Optional[int] = None) -> float:
        if wlan is not None and wlan in self.payload_overrides:
            return self.payload_overrides[wlan]
        return self.payload_bits

    def backoff_mean(self, wlan: Optional[int] = None) -> float:
        rate = self.rate(wlan)
        return math.inf if rate == 0 else 1.0 / rate

    def with_overrides(self, attempt_rates: Optional[Dict[int, float]] = None,
                       payloads: Optional[Dict[int, float]] = None) -> 'ActivityModel':
        return replace(
            self,
            attempt_overrides={**self.attempt_overrides, **(attempt_rates or {})},
            payload_overrides={**self.payload_overrides, **(payloads or {})},
        )
