# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from dcb_allocation_core.core.channelization import allocation_choices
from dcb_allocation_core.core.exceptions import NoBlockFitsError
from dcb_allocation_core.core.models.allocation import ChannelGrid
from dcb_allocation_core.core.models.params import ActivityModel, FittedActivityModel
from dcb_allocation_core.core.models.scenario import SweepMethod, SweepSpec
from dcb_allocation_core.core.models.scheme import ProblemInstance
from dcb_allocation_core.services.optimizer_service import OptimizerService
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)


@dataclass
class SweepPoint:
    num_channels: int
    num_wlans: int
    method: str
    metrics: Dict[str, float]


@dataclass
class SweepResult:
    points: List[SweepPoint] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)
    duration: float = 0.0

    def value(self, num_wlans: int, method: str, metric: str) -> Optional[float]:
        for point in self.points:
            if point.num_wlans == num_wlans and point.method == method:
                return point.metrics.get(metric)
        return None

    def rows(self, metrics: List[str]) -> List[list]:
        return [
            [point.num_channels, point.num_wlans, point.method, metric, point.metrics[metric]]
            for point in self.points
            for metric in metrics
            if metric in point.metrics
        ]

    def __str__(self) -> str:
        return (f"SweepResult(points={len(self.points)}, skipped={len(self.skipped)}, "
                f"duration={Helpers.format_duration(self.duration)})")


class SweepService:

    def __init__(self, optimizer: Optional[OptimizerService] = None, seed: int = 0):
        self.optimizer = optimizer or OptimizerService()
        self.seed = seed
        self._callbacks: Dict[str, List[Callable]] = {}

    def register_callback(self, event: str, callback: Callable) -> None:
        if event not in self._callbacks:
            self._callbacks[event] = []
        self._callbacks[event].append(callback)

    def _emit(self, event: str, *args, **kwargs) -> None:
        if event in self._callbacks:
            for callback in self._callbacks[event]:
                try:
                    callback(*args, **kwargs)
                except Exception as e:
                    logger.warning("callback for %s failed: %s", event, e)

    def run(self, spec: SweepSpec, activity: ActivityModel,
            fit: Optional[FittedActivityModel] = None) -> SweepResult:
        result = SweepResult()
        start = time.time()
        self.optimizer.exhaustive_cap = spec.exhaustive_cap
        choices = len(allocation_choices(ChannelGrid(spec.channels)))
        logger.info("sweep K=%d N=%d..%d over %s", spec.channels, spec.n_min, spec.n_max,
                    ", ".join(str(m) for m in spec.methods))
        self._emit("sweep_started", spec)

        for num_wlans in spec.wlan_range:
            instance = ProblemInstance(num_wlans, spec.channels, activity, fit or FittedActivityModel())
            for method in spec.methods:
                if method.kind == "exhaustive" and choices ** num_wlans > spec.exhaustive_cap:
                    notice = (f"exhaustive search skipped for N={num_wlans}, K={spec.channels}: "
                              f"{choices}^{num_wlans} allocations exceed the cap of {spec.exhaustive_cap}")
                    logger.warning(notice)
                    result.skipped.append(notice)
                    self._emit("method_skipped", num_wlans, str(method), notice)
                    continue
                try:
                    metrics = self._measure(instance, method, spec.draws)
                except NoBlockFitsError as e:
                    notice = f"{method} skipped for N={num_wlans}, K={spec.channels}: {e}"
                    logger.warning(notice)
                    result.skipped.append(notice)
                    self._emit("method_skipped", num_wlans, str(method), notice)
                    continue
                result.points.append(SweepPoint(spec.channels, num_wlans, str(method), metrics))
                self._emit("point_finished", num_wlans, str(method), metrics)

        result.duration = time.time() - start
        logger.info("%s", result)
        self._emit("sweep_finished", result)
        return result

    def _measure(self, instance: ProblemInstance, method: SweepMethod, draws: int) -> Dict[str, float]:
        if method.is_random:
            baseline = self.optimizer.random_baseline(instance, method.kind, method.width, draws, self.seed)
            return {
                "throughput": Helpers.to_mbps(baseline.mean_aggregate),
                "jfi": baseline.mean_jfi,
                "cu": baseline.mean_utilization,
            }
        if method.kind == "bbm":
            outcome = self.optimizer.optimize(instance)
        elif method.kind == "greedy":
            outcome = self.optimizer.greedy(instance)
        else:
            outcome = self.optimizer.exhaustive_search(instance)
        return {
            "throughput": Helpers.to_mbps(outcome.aggregate),
            "jfi": outcome.report.jfi,
            "cu": outcome.report.channel_utilization,
        }
