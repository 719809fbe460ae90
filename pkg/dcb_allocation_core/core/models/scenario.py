# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from dcb_allocation_core.core.exceptions import DcbError, ScenarioError
from dcb_allocation_core.core.models.allocation import (
    ChannelGrid,
    Channelization,
    NetworkAllocation,
    WlanAllocation,
    wlan_name,
)
from dcb_allocation_core.core.models.params import ActivityModel, MacPhyParams
from dcb_allocation_core.utils.validators import VALID_WIDTHS, Validators

_METHOD = re.compile(r"^(bbm|greedy|exhaustive|random-fixed:(\d+)|random-var:(\d+))$")
SWEEP_METRICS = ("throughput", "jfi", "cu")


@dataclass
class WlanSpec:
    name: str
    allocation: str
    attempt_rate: Optional[float] = None
    payload_bits: Optional[float] = None

    KEYS = ("name", "allocation", "attempt_rate", "payload_bits")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], position: int) -> 'WlanSpec':
        if not isinstance(data, dict):
            raise ScenarioError("each WLAN must be an object", field=f"wlans[{position}]")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise ScenarioError(f"unknown WLAN key {unknown[0]!r}", field=f"wlans[{position}].{unknown[0]}")
        if "allocation" not in data or not isinstance(data["allocation"], str):
            raise ScenarioError("WLAN allocation literal is required", field=f"wlans[{position}].allocation")
        for key in ("attempt_rate", "payload_bits"):
            if key in data and not Validators.is_positive_number(data[key]):
                raise ScenarioError(f"{key} must be positive", field=f"wlans[{position}].{key}")
        return cls(
            name=str(data.get("name", "")),
            allocation=data["allocation"],
            attempt_rate=data.get("attempt_rate"),
            payload_bits=data.get("payload_bits"),
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "allocation": self.allocation}
        if self.attempt_rate is not None:
            data["attempt_rate"] = self.attempt_rate
        if self.payload_bits is not None:
            data["payload_bits"] = self.payload_bits
        return data


@dataclass
class ScenarioFile:
    channels: int
    wlans: List[WlanSpec]
    channelization: Channelization = Channelization.ALIGNED
    parameters: Optional[MacPhyParams] = None
    source: str = "<memory>"

    KEYS = ("channels", "channelization", "parameters", "wlans")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: str = "<memory>") -> 'ScenarioFile':
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise ScenarioError(f"unknown scenario key {unknown[0]!r}", field=unknown[0])
        if "channels" not in data or not Validators.is_positive_int(data["channels"]):
            raise ScenarioError("channels must be a positive integer", field="channels")
        try:
            channelization = Channelization(data.get("channelization", Channelization.ALIGNED.value))
        except ValueError:
            raise ScenarioError("channelization must be 'aligned' or 'contiguous'", field="channelization")
        wlans = data.get("wlans")
        if not isinstance(wlans, list) or not wlans:
            raise ScenarioError("scenario needs a nonempty list of WLANs", field="wlans")
        parameters = MacPhyParams.from_dict(data["parameters"]) if "parameters" in data else None
        specs = [WlanSpec.from_dict(item, i) for i, item in enumerate(wlans)]
        for i, spec in enumerate(specs):
            if not spec.name:
                spec.name = wlan_name(i)
        scenario = cls(channels=data["channels"], wlans=specs, channelization=channelization,
                       parameters=parameters, source=source)
        scenario.to_network()
        return scenario

    def to_network(self) -> NetworkAllocation:
        allocations = []
        for i, spec in enumerate(self.wlans):
            try:
                allocations.append(WlanAllocation.from_literal(spec.allocation, self.channelization))
            except DcbError as e:
                raise ScenarioError(str(e), field=f"wlans[{i}].allocation")
        names = tuple(spec.name or wlan_name(i) for i, spec in enumerate(self.wlans))
        try:
            return NetworkAllocation(ChannelGrid(self.channels), tuple(allocations), names, self.channelization)
        except ScenarioError:
            raise
        except DcbError as e:
            raise ScenarioError(str(e), field="wlans")

    def activity_model(self, params: Optional[MacPhyParams] = None) -> ActivityModel:
        """Activity model from explicit params, else the embedded ones, else defaults."""
        chosen = params or self.parameters or MacPhyParams()
        model = ActivityModel.from_params(chosen)
        rates = {i: spec.attempt_rate for i, spec in enumerate(self.wlans) if spec.attempt_rate is not None}
        payloads = {i: spec.payload_bits for i, spec in enumerate(self.wlans) if spec.payload_bits is not None}
        if rates or payloads:
            model = model.with_overrides(rates, payloads)
        return model

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "channels": self.channels,
            "channelization": self.channelization.value,
            "wlans": [spec.to_dict() for spec in self.wlans],
        }
        if self.parameters is not None:
            data["parameters"] = self.parameters.to_dict()
        return data

    @classmethod
    def from_network(cls, net: NetworkAllocation) -> 'ScenarioFile':
        return cls(
            channels=net.grid.num_channels,
            wlans=[WlanSpec(name, alloc.to_literal()) for name, alloc in zip(net.names, net.allocations)],
            channelization=net.channelization,
        )


@dataclass(frozen=True)
class SweepMethod:
    kind: str
    width: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> 'SweepMethod':
        match = _METHOD.match(text.strip())
        if match is None:
            raise ScenarioError(f"unknown method {text!r}", field="methods")
        width_text = match.group(2) or match.group(3)
        kind = text.strip().split(":")[0]
        width = int(width_text) if width_text else None
        if width is not None and width not in VALID_WIDTHS:
            raise ScenarioError(f"width {width} in {text!r} is not one of {VALID_WIDTHS}", field="methods")
        return cls(kind, width)

    @property
    def is_random(self) -> bool:
        return self.kind.startswith("random")

    def __str__(self) -> str:
        return self.kind if self.width is None else f"{self.kind}:{self.width}"


@dataclass(frozen=True)
class SweepSpec:
    channels: int
    n_min: int
    n_max: int
    methods: Tuple[SweepMethod, ...]
    draws: int = 1000
    metrics: Tuple[str, ...] = SWEEP_METRICS
    exhaustive_cap: int = 10 ** 7

    KEYS = ("channels", "n_min", "n_max", "methods", "draws", "metrics", "exhaustive_cap")

    def __post_init__(self):
        if not Validators.is_positive_int(self.channels):
            raise ScenarioError("channels must be a positive integer", field="channels")
        if not Validators.is_positive_int(self.n_min) or not Validators.is_positive_int(self.n_max):
            raise ScenarioError("WLAN range bounds must be positive integers", field="n_min")
        if self.n_min > self.n_max:
            raise ScenarioError("WLAN range is empty", field="n_max")
        if not self.methods:
            raise ScenarioError("at least one method is required", field="methods")
        if not Validators.is_positive_int(self.draws):
            raise ScenarioError("draws must be a positive integer", field="draws")
        if not self.metrics or any(m not in SWEEP_METRICS for m in self.metrics):
            raise ScenarioError(f"metrics must be a nonempty subset of {SWEEP_METRICS}", field="metrics")

    @property
    def wlan_range(self) -> range:
        return range(self.n_min, self.n_max + 1)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepSpec':
        if not isinstance(data, dict):
            raise ScenarioError("sweep must be a JSON object")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise ScenarioError(f"unknown sweep key {unknown[0]!r}", field=unknown[0])
        for key in ("channels", "n_min", "n_max", "methods"):
            if key not in data:
                raise ScenarioError("missing sweep key", field=key)
        methods = data["methods"]
        if isinstance(methods, str):
            methods = methods.split(",")
        metrics = data.get("metrics", list(SWEEP_METRICS))
        if isinstance(metrics, str):
            metrics = metrics.split(",")
        return cls(
            channels=data["channels"],
            n_min=data["n_min"],
            n_max=data["n_max"],
            methods=tuple(SweepMethod.parse(m) for m in methods),
            draws=data.get("draws", 1000),
            metrics=tuple(m.strip() for m in metrics),
            exhaustive_cap=data.get("exhaustive_cap", 10 ** 7),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "channels": self.channels,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "methods": [str(m) for m in self.methods],
            "draws": self.draws,
            "metrics": list(self.metrics),
            "exhaustive_cap": self.exhaustive_cap,
        }
