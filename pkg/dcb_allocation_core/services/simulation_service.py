# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import replace
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from dcb_allocation_core.core.channelization import dcb_select
from dcb_allocation_core.core.exceptions import ScenarioError, SimulationError
from dcb_allocation_core.core.models.allocation import BondedBlock, NetworkAllocation
from dcb_allocation_core.core.models.params import ActivityModel
from dcb_allocation_core.core.models.simulation import (
    BackoffDistribution,
    InsensitivityReport,
    SimConfig,
    SimResult,
    TransmissionDistribution,
)
from dcb_allocation_core.core.models.state import NetworkState
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)

CONFIDENCE = 0.95


def _draw_backoff(rng: np.random.Generator, mean: float, kind: BackoffDistribution) -> float:
    if math.isinf(mean):
        return math.inf
    if kind == BackoffDistribution.EXPONENTIAL:
        return float(rng.exponential(mean))
    if kind == BackoffDistribution.UNIFORM:
        return float(rng.uniform(0.0, 2.0 * mean))
    return mean


def _draw_transmission(rng: np.random.Generator, mean: float, kind: TransmissionDistribution) -> float:
    if kind == TransmissionDistribution.EXPONENTIAL:
        return float(rng.exponential(mean))
    return mean


def _run_replication(net: NetworkAllocation, model: ActivityModel, cfg: SimConfig,
                     seed: np.random.SeedSequence) -> Tuple[List[float], Optional[Dict[NetworkState, float]]]:
    """One independent event loop; returns per-WLAN bits/s and optional time-in-state fractions.

    Backoff timers count down only while the primary channel is idle and keep their remaining
    time while frozen. Ties between events resolve in ascending WLAN index.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    size = len(net)
    remaining = [_draw_backoff(rng, model.backoff_mean(i), cfg.backoff_distribution) for i in range(size)]
    tx_end = [math.inf] * size
    blocks: List[Optional[BondedBlock]] = [None] * size
    busy: set = set()
    credited = [0.0] * size
    occupancy: Dict[NetworkState, float] = {}
    now = 0.0

    while True:
        next_time = math.inf
        next_wlan = -1
        for i in range(size):
            if blocks[i] is not None:
                candidate = tx_end[i]
            elif net[i].primary not in busy:
                candidate = now + remaining[i]
            else:
                continue
            if candidate < next_time:
                next_time, next_wlan = candidate, i

        stop = min(next_time, cfg.horizon)
        elapsed = stop - now
        if cfg.collect_states:
            overlap = stop - max(now, cfg.warmup)
            if overlap > 0:
                state = NetworkState(tuple((i, b) for i, b in enumerate(blocks) if b is not None))
                occupancy[state] = occupancy.get(state, 0.0) + overlap
        for i in range(size):
            if blocks[i] is None and net[i].primary not in busy:
                remaining[i] -= elapsed
        now = stop
        if next_time > cfg.horizon:
            break

        i = next_wlan
        if blocks[i] is not None:
            if now >= cfg.warmup:
                credited[i] += model.payload(i) * (1.0 - model.packet_error_prob)
            busy -= blocks[i].channels
            blocks[i] = None
            tx_end[i] = math.inf
            remaining[i] = _draw_backoff(rng, model.backoff_mean(i), cfg.backoff_distribution)
        else:
            block = dcb_select(net[i], busy, net.channelization)
            if block.overlaps(busy):
                raise SimulationError(f"WLAN {net.names[i]} would transmit on {block} over busy {sorted(busy)}")
            blocks[i] = block
            busy |= block.channels
            tx_end[i] = now + _draw_transmission(rng, model.durations.duration(block.width),
                                                 cfg.transmission_distribution)
            remaining[i] = 0.0

    throughputs = [bits / cfg.measured_time for bits in credited]
    if not cfg.collect_states:
        return throughputs, None
    total = sum(occupancy.values())
    return throughputs, {state: t / total for state, t in occupancy.items()}


def confidence_halfwidth(samples: Sequence[float], confidence: float = CONFIDENCE) -> float:
    """Student-t half width of the mean; nan for a single sample."""
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        return math.nan
    scale = float(np.std(values, ddof=1)) / math.sqrt(values.size)
    return float(stats.t.ppf(0.5 + confidence / 2.0, values.size - 1)) * scale


class SimulationService:

    def __init__(self, workers: int = 1):
        self.workers = max(1, int(workers))
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

    def simulate(self, net: NetworkAllocation, model: ActivityModel, cfg: SimConfig) -> SimResult:
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
        start = time.time()
        logger.info("simulating %s: %d x %.1f s", net, cfg.replications, cfg.horizon)
        self._emit("simulation_started", net, cfg)

        outputs: Dict[int, Tuple[List[float], Optional[Dict[NetworkState, float]]]] = {}
        if self.workers == 1 or cfg.replications == 1:
            for index, seed in enumerate(seeds):
                outputs[index] = _run_replication(net, model, cfg, seed)
                self._emit("replication_finished", index, outputs[index][0])
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                future_to_index = {}
                for index, seed in enumerate(seeds):
                    future = executor.submit(_run_replication, net, model, cfg, seed)
                    future_to_index[future] = index
                for future in as_completed(future_to_index):
                    index = future_to_index[future]
                    outputs[index] = future.result()
                    self._emit("replication_finished", index, outputs[index][0])

        replications = [outputs[index][0] for index in range(cfg.replications)]
        matrix = np.asarray(replications, dtype=float)
        means = [float(v) for v in matrix.mean(axis=0)]
        halfwidths = [confidence_halfwidth(matrix[:, i]) for i in range(len(net))]

        time_in_state = None
        if cfg.collect_states:
            time_in_state = {}
            for index in range(cfg.replications):
                for state, fraction in outputs[index][1].items():
                    time_in_state[state] = time_in_state.get(state, 0.0) + fraction / cfg.replications

        result = SimResult(means, halfwidths, replications, time_in_state, net.names)
        logger.info("%s in %s", result, Helpers.format_duration(time.time() - start))
        self._emit("simulation_finished", result)
        return result

    def insensitivity_check(self, net: NetworkAllocation, model: ActivityModel, cfg: SimConfig,
                            configurations: Sequence[Tuple[str, str]]) -> InsensitivityReport:
        """Rerun with each (backoff, transmission) distribution pair on the same seed."""
        if len(configurations) < 2:
            raise ScenarioError("insensitivity check needs at least two distribution configurations",
                                field="configurations")
        pairs = [(BackoffDistribution(b), TransmissionDistribution(t)) for b, t in configurations]
        throughputs = []
        for backoff, transmission in pairs:
            variant = replace(cfg, backoff_distribution=backoff, transmission_distribution=transmission)
            throughputs.append(self.simulate(net, model, variant).per_wlan_throughput)

        deviation = 0.0
        for first, second in combinations(range(len(pairs)), 2):
            for a, b in zip(throughputs[first], throughputs[second]):
                deviation = max(deviation, Helpers.relative_difference(b, a))
        logger.info("insensitivity over %d configurations: max deviation %.4f", len(pairs), deviation)
        return InsensitivityReport(
            configurations=[(b.value, t.value) for b, t in pairs],
            throughputs=throughputs,
            max_relative_deviation=deviation,
        )
