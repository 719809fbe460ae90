# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from dcb_allocation_core.core.channelization import (
    allocation_choices,
    blocks_of_width,
    grouping_to_allocation_channels,
    grouping_to_allocation_wlans,
    overlap_metrics,
)
from dcb_allocation_core.core.ctmc_engine import DEFAULT_STATE_CAP, evaluate_network
from dcb_allocation_core.core.exceptions import (
    EmptyBoxError,
    InfeasibleBoxesError,
    InfeasibleSchemeError,
    NoBlockFitsError,
    ScenarioError,
    SearchSpaceTooLargeError,
)
from dcb_allocation_core.core.mac_phy import activity_ratio, isolated_throughput, lambda_L
from dcb_allocation_core.core.metrics import gain, jfi
from dcb_allocation_core.core.models.allocation import (
    ChannelGrid,
    Channelization,
    NetworkAllocation,
    WlanAllocation,
    wlan_name,
)
from dcb_allocation_core.core.models.params import ActivityModel
from dcb_allocation_core.core.models.scheme import (
    CHANNELS_REGIME,
    BnbNode,
    BnbResult,
    GreedyResult,
    GreedyStep,
    Grouping,
    GroupingChannels,
    GroupingWlans,
    ProblemInstance,
    TraceEntry,
    TraceRow,
    format_vector,
)
from dcb_allocation_core.core.models.state import ThroughputReport
from dcb_allocation_core.core.objectives import g_exact, h_exact, relax_channels, relax_wlans, valid_widths
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)

BOUND_TOL = 1e-6
DEFAULT_EXHAUSTIVE_CAP = 10 ** 7
DEFAULT_DRAWS = 1000


@dataclass
class OptimizationOutcome:
    allocation: NetworkAllocation
    scheme: Optional[Grouping]
    report: ThroughputReport
    result: Any = None

    @property
    def aggregate(self) -> float:
        return self.report.aggregate

    def __str__(self) -> str:
        return f"OptimizationOutcome({self.allocation.to_literal()}, {self.aggregate / 1e6:.4f} Mbps)"


@dataclass
class RandomBaseline:
    """Means over independent random draws; every draw is scored with the CTMC."""

    method: str
    draws: int
    mean_aggregate: float
    mean_jfi: float
    mean_utilization: float
    aggregates: List[float] = field(default_factory=list, repr=False)


@dataclass
class SchemeComparison:
    reference: Grouping
    other: Grouping
    reference_throughputs: List[float]
    other_throughputs: List[float]
    names: Tuple[str, ...]

    @property
    def reference_sum(self) -> float:
        return float(sum(self.reference_throughputs))

    @property
    def other_sum(self) -> float:
        return float(sum(self.other_throughputs))

    @property
    def reference_jfi(self) -> float:
        return jfi(self.reference_throughputs)

    @property
    def other_jfi(self) -> float:
        return jfi(self.other_throughputs)

    @property
    def gains(self) -> List[float]:
        """Per-WLAN magnitude of `gain` from the reference scheme to the other one."""
        return [
            abs(gain(other, ref))
            for ref, other in zip(self.reference_throughputs, self.other_throughputs)
        ]


def _scheme_values(scheme: Grouping) -> Tuple[int, ...]:
    return scheme.k if isinstance(scheme, GroupingChannels) else scheme.n


def scheme_throughputs(instance: ProblemInstance, scheme: Grouping) -> List[float]:
    """Per-WLAN throughput of a grouping scheme in scheme order (bits/s)."""
    model = instance.activity
    if isinstance(scheme, GroupingChannels):
        if not scheme.is_feasible(instance.num_channels, valid_widths(instance)):
            raise InfeasibleSchemeError(f"scheme {scheme} does not fit {instance.num_channels} channels")
        return [isolated_throughput(model, k) for k in scheme.k]
    if not scheme.is_feasible(instance.num_wlans):
        raise InfeasibleSchemeError(f"groups {scheme} do not hold {instance.num_wlans} WLANs")
    per_wlan = []
    for count in scheme.n:
        share = lambda_L(model) * (1.0 - model.packet_error_prob) / (1.0 + count * activity_ratio(model, 1))
        per_wlan.extend([share] * count)
    return per_wlan


def _evaluate_key(key: Tuple[WlanAllocation, ...], num_channels: int, channelization: Channelization,
                  model: ActivityModel, state_cap: int) -> ThroughputReport:
    net = NetworkAllocation(ChannelGrid(num_channels), key, channelization=channelization)
    return evaluate_network(net, model, state_cap=state_cap)


def _exhaustive_branch(first: int, choices: List[WlanAllocation], num_wlans: int, num_channels: int,
                       channelization: Channelization, model: ActivityModel,
                       state_cap: int) -> Tuple[float, int, Tuple[WlanAllocation, ...], int]:
    """Best multiset whose smallest choice index is `first`."""
    best: Optional[Tuple[float, int, Tuple[WlanAllocation, ...]]] = None
    visited = 0
    for rest in combinations_with_replacement(range(first, len(choices)), num_wlans - 1):
        key = tuple(choices[i] for i in (first,) + rest)
        visited += 1
        net = NetworkAllocation(ChannelGrid(num_channels), key, channelization=channelization)
        value = evaluate_network(net, model, state_cap=state_cap).aggregate
        overlap = overlap_metrics(net).max_overlap
        if best is None or _better(value, overlap, key, best):
            best = (value, overlap, key)
    value, overlap, key = best
    return value, overlap, key, visited


def _better(value: float, overlap: int, key: Tuple, best: Tuple[float, int, Tuple]) -> bool:
    best_value, best_overlap, best_key = best
    scale = max(1.0, abs(best_value))
    if value > best_value + 1e-12 * scale:
        return True
    if value < best_value - 1e-12 * scale:
        return False
    return (overlap, key) < (best_overlap, best_key)


class OptimizerService:

    def __init__(self, workers: int = 1, state_cap: int = DEFAULT_STATE_CAP,
                 exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP):
        self.workers = max(1, int(workers))
        self.state_cap = state_cap
        self.exhaustive_cap = exhaustive_cap
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

    # branch and bound

    def bnb_channels(self, instance: ProblemInstance) -> BnbResult:
        """Channels-per-WLAN program (N <= K), depth first over pinned widths.

        Each branch pins the branching variable to a single width: 2^m, then 2^(m+1), then the
        remaining valid widths. A trace row therefore lists one entry per width rather than the
        two half-ranges k <= 2^m and k >= 2^(m+1); its first two entries are the boundary widths of those
        half-ranges.
        """
        if instance.num_wlans > instance.num_channels:
            raise InfeasibleSchemeError(f"{instance} has more WLANs than channels; use bnb_wlans")
        widths = valid_widths(instance)
        ones = (1,) * instance.num_wlans
        incumbent: Tuple[int, ...] = ones
        incumbent_value = h_exact(ones, instance)
        history = [incumbent_value]

        root = relax_channels(instance)
        explored = [root]
        trace = [TraceRow(1, [TraceEntry(ones, True, incumbent_value),
                              TraceEntry(root.relaxed_solution, False, root.relaxed_value)],
                          incumbent_value, root.relaxed_value)]
        row_upper = root.relaxed_value
        stack = [root]

        while stack:
            node = stack.pop()
            if node.upper_bound <= incumbent_value + BOUND_TOL:
                logger.debug("pruned %s at bound %.6f", node, node.upper_bound / 1e6)
                continue
            free = [i for i, (l, u) in enumerate(zip(node.lower_bounds, node.upper_bounds)) if l != u]
            if not free:
                continue
            index = free[0]
            x = node.relaxed_solution[index]
            m = int(math.floor(math.log2(max(x, 1.0))))
            order = [min(2 ** m, max(widths))]
            if 2 ** (m + 1) <= max(widths):
                order.append(2 ** (m + 1))
            order.extend(w for w in widths if w not in order)

            entries: List[TraceEntry] = []
            children: List[BnbNode] = []
            fractional_values = []
            for width in order:
                lower = list(node.lower_bounds)
                upper = list(node.upper_bounds)
                lower[index] = upper[index] = float(width)
                try:
                    child = relax_channels(instance, lower, upper, node.depth + 1)
                except EmptyBoxError:
                    entries.append(TraceEntry(tuple(lower), False, None))
                    continue
                explored.append(child)
                candidate = child.rounded()
                if child.is_integral() and GroupingChannels(candidate).is_feasible(instance.num_channels, widths):
                    value = h_exact(candidate, instance)
                    entries.append(TraceEntry(child.relaxed_solution, True, value))
                    if self._improves(value, candidate, incumbent_value, incumbent):
                        incumbent, incumbent_value = candidate, value
                        logger.debug("incumbent %s = %.6f Mbps", format_vector(candidate), value / 1e6)
                else:
                    entries.append(TraceEntry(child.relaxed_solution, False, child.relaxed_value))
                    fractional_values.append(child.relaxed_value)
                children.append(child)
                history.append(incumbent_value)

            if fractional_values:
                row_upper = max(fractional_values)
            trace.append(TraceRow(len(trace) + 1, entries, incumbent_value, row_upper))
            stack.extend(reversed(children))

        best = GroupingChannels(incumbent).canonical()
        result = BnbResult(best, h_exact(best.k, instance), trace, len(explored), history, explored)
        logger.info("channel grouping for %s: %s", instance, result)
        self._emit("bnb_finished", result)
        return result

    def bnb_wlans(self, instance: ProblemInstance) -> BnbResult:
        """WLANs-per-channel program (N > K), branching n_k <= floor and n_k >= floor + 1."""
        if instance.num_wlans <= instance.num_channels:
            raise InfeasibleSchemeError(f"{instance} has no more WLANs than channels; use bnb_channels")
        ones = (1,) * instance.num_channels
        incumbent: Optional[Tuple[int, ...]] = None
        incumbent_value = g_exact(ones, instance)
        history = [incumbent_value]

        root = relax_wlans(instance)
        explored = [root]
        trace = [TraceRow(1, [TraceEntry(ones, False, incumbent_value),
                              TraceEntry(root.relaxed_solution, root.is_integral(), root.relaxed_value)],
                          incumbent_value, root.relaxed_value)]
        row_upper = root.relaxed_value
        if root.is_integral():
            incumbent, incumbent_value = root.rounded(), root.relaxed_value
        stack = [] if root.is_integral() else [root]

        while stack:
            node = stack.pop()
            if incumbent is not None and node.upper_bound <= incumbent_value + BOUND_TOL:
                logger.debug("pruned %s", node)
                continue
            index = next(i for i, v in enumerate(node.relaxed_solution) if abs(v - round(v)) > 1e-9)
            floor = math.floor(node.relaxed_solution[index])
            entries: List[TraceEntry] = []
            children: List[BnbNode] = []
            fractional_values = []
            for lower_value, upper_value in ((None, float(floor)), (float(floor + 1), None)):
                lower = list(node.lower_bounds)
                upper = list(node.upper_bounds)
                if lower_value is not None:
                    lower[index] = lower_value
                if upper_value is not None:
                    upper[index] = upper_value
                try:
                    child = relax_wlans(instance, lower, upper, node.depth + 1)
                except InfeasibleBoxesError:
                    entries.append(TraceEntry(tuple(upper if upper_value is not None else lower), False, None))
                    continue
                explored.append(child)
                if child.is_integral():
                    candidate = child.rounded()
                    value = g_exact(candidate, instance)
                    entries.append(TraceEntry(child.relaxed_solution, True, value))
                    if incumbent is None or self._improves(value, candidate, incumbent_value, incumbent):
                        incumbent, incumbent_value = candidate, value
                else:
                    entries.append(TraceEntry(child.relaxed_solution, False, child.relaxed_value))
                    fractional_values.append(child.relaxed_value)
                    children.append(child)
                history.append(incumbent_value)

            if fractional_values:
                row_upper = max(fractional_values)
            trace.append(TraceRow(len(trace) + 1, entries, incumbent_value, row_upper))
            stack.extend(reversed(children))

        best = GroupingWlans(incumbent).canonical()
        result = BnbResult(best, g_exact(best.n, instance), trace, len(explored), history, explored)
        logger.info("WLAN grouping for %s: %s", instance, result)
        self._emit("bnb_finished", result)
        return result

    @staticmethod
    def _improves(value: float, candidate: Tuple[int, ...], best_value: float, best: Tuple[int, ...]) -> bool:
        if value > best_value + BOUND_TOL:
            return True
        if value < best_value - BOUND_TOL:
            return False
        return tuple(sorted(candidate)) < tuple(sorted(best))

    def optimize(self, instance: ProblemInstance) -> OptimizationOutcome:
        if instance.regime == CHANNELS_REGIME:
            result = self.bnb_channels(instance)
        else:
            result = self.bnb_wlans(instance)
        return self._outcome(instance, result.best_scheme, result)

    def to_allocation(self, instance: ProblemInstance, scheme: Grouping) -> NetworkAllocation:
        if isinstance(scheme, GroupingChannels):
            return grouping_to_allocation_channels(scheme.packing_order(), instance.num_channels)
        return grouping_to_allocation_wlans(scheme.n, instance.num_wlans)

    def _outcome(self, instance: ProblemInstance, scheme: Grouping, result: Any) -> OptimizationOutcome:
        net = self.to_allocation(instance, scheme)
        report = self.evaluate(net, instance.activity)
        return OptimizationOutcome(net, scheme, report, result)

    def evaluate(self, net: NetworkAllocation, model: ActivityModel) -> ThroughputReport:
        return evaluate_network(net, model, state_cap=self.state_cap)

    # baselines

    def greedy_channels(self, instance: ProblemInstance) -> GreedyResult:
        """Double each WLAN's channels in turn while the budget allows; stop once it is spent."""
        if instance.num_wlans > instance.num_channels:
            raise InfeasibleSchemeError(f"{instance} has more WLANs than channels; use greedy_wlans")
        widths = valid_widths(instance)
        cap = max(widths)
        k = [1] * instance.num_wlans
        steps = [GreedyStep(tuple(k), True, h_exact(k, instance))]
        for index in range(len(k)):
            while sum(k) < instance.num_channels and k[index] < cap:
                candidate = list(k)
                candidate[index] = min(2 * k[index], cap)
                if sum(candidate) > instance.num_channels:
                    steps.append(GreedyStep(tuple(candidate), False, None))
                    break
                k = candidate
                steps.append(GreedyStep(tuple(k), True, h_exact(k, instance)))
        scheme = GroupingChannels(tuple(k))
        return GreedyResult(scheme, h_exact(scheme.k, instance), steps)

    def greedy_wlans(self, instance: ProblemInstance) -> GreedyResult:
        if instance.num_wlans <= instance.num_channels:
            raise InfeasibleSchemeError(f"{instance} has no more WLANs than channels; use greedy_channels")
        n = [1] * instance.num_channels
        steps = [GreedyStep(tuple(n), False, g_exact(n, instance))]
        while sum(n) < instance.num_wlans:
            n[0] += 1
            steps.append(GreedyStep(tuple(n), sum(n) == instance.num_wlans, g_exact(n, instance)))
        scheme = GroupingWlans(tuple(n))
        return GreedyResult(scheme, g_exact(scheme.n, instance), steps)

    def greedy(self, instance: ProblemInstance) -> OptimizationOutcome:
        if instance.regime == CHANNELS_REGIME:
            result = self.greedy_channels(instance)
        else:
            result = self.greedy_wlans(instance)
        return self._outcome(instance, result.scheme, result)

    @staticmethod
    def random_fixed_bw(instance: ProblemInstance, width: int, rng: np.random.Generator,
                        channelization: Channelization = Channelization.ALIGNED) -> NetworkAllocation:
        grid = ChannelGrid(instance.num_channels)
        blocks = blocks_of_width(grid, width)
        if not blocks:
            raise NoBlockFitsError(f"no {width}-channel block fits {instance.num_channels} channels")
        picks = rng.integers(len(blocks), size=instance.num_wlans)
        allocations = tuple(WlanAllocation(blocks[i], blocks[i].start) for i in picks)
        return NetworkAllocation(grid, allocations, channelization=channelization)

    @staticmethod
    def random_variable_bw(instance: ProblemInstance, bw_max: int, rng: np.random.Generator,
                           channelization: Channelization = Channelization.ALIGNED) -> NetworkAllocation:
        grid = ChannelGrid(instance.num_channels)
        if bw_max not in valid_widths(instance):
            raise ScenarioError(f"maximum width {bw_max} is not one of {valid_widths(instance)}", field="bw_max")
        choices = {w: blocks_of_width(grid, w) for w in valid_widths(instance) if w <= bw_max}
        allowed = [w for w, blocks in choices.items() if blocks]
        if not allowed:
            raise NoBlockFitsError(f"no block up to {bw_max} channels fits {instance.num_channels} channels")
        allocations = []
        for _ in range(instance.num_wlans):
            blocks = choices[allowed[rng.integers(len(allowed))]]
            block = blocks[rng.integers(len(blocks))]
            allocations.append(WlanAllocation(block, block.start))
        return NetworkAllocation(grid, tuple(allocations), channelization=channelization)

    def random_baseline(self, instance: ProblemInstance, kind: str, width: int,
                        draws: int = DEFAULT_DRAWS, seed: int = 0) -> RandomBaseline:
        """Mean metrics over `draws` random allocations of one kind ("random-fixed" or "random-var")."""
        rng = np.random.default_rng(seed)
        draw = self.random_fixed_bw if kind == "random-fixed" else self.random_variable_bw
        keys = []
        for _ in range(draws):
            net = draw(instance, width, rng)
            keys.append(Helpers.multiset_key(net.allocations))

        reports = self._evaluate_keys(sorted(set(keys)), instance)
        aggregates = [reports[key].aggregate for key in keys]
        fairness = [reports[key].jfi for key in keys]
        utilization = [reports[key].channel_utilization for key in keys]
        label = f"{kind}:{width}"
        logger.info("%s over %d draws (%d distinct) for %s", label, draws, len(reports), instance)
        return RandomBaseline(label, draws, float(np.mean(aggregates)), float(np.mean(fairness)),
                              float(np.mean(utilization)), aggregates)

    def _evaluate_keys(self, keys: List[Tuple[WlanAllocation, ...]],
                       instance: ProblemInstance) -> Dict[Tuple, ThroughputReport]:
        model = instance.activity
        reports: Dict[Tuple, ThroughputReport] = {}
        if self.workers == 1 or len(keys) < 2:
            for key in keys:
                reports[key] = _evaluate_key(key, instance.num_channels, Channelization.ALIGNED,
                                             model, self.state_cap)
            return reports

        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            future_to_key = {}
            for key in keys:
                future = executor.submit(_evaluate_key, key, instance.num_channels,
                                         Channelization.ALIGNED, model, self.state_cap)
                future_to_key[future] = key
            for future in as_completed(future_to_key):
                reports[future_to_key[future]] = future.result()
        return reports

    def exhaustive_search(self, instance: ProblemInstance,
                          channelization: Channelization = Channelization.ALIGNED) -> OptimizationOutcome:
        """Best allocation over every (block, primary) choice per WLAN.

        Ties prefer the smaller overlap degree, then the lexicographically smallest allocation.
        """
        grid = ChannelGrid(instance.num_channels)
        choices = sorted(allocation_choices(grid))
        space = len(choices) ** instance.num_wlans
        if space > self.exhaustive_cap:
            raise SearchSpaceTooLargeError(
                f"exhaustive search over {len(choices)}^{instance.num_wlans} = {space} allocations "
                f"exceeds the cap of {self.exhaustive_cap}")
        logger.info("exhaustive search over %d choices for %s", len(choices), instance)
        self._emit("exhaustive_started", instance, len(choices))

        args = (choices, instance.num_wlans, instance.num_channels, channelization, instance.activity,
                self.state_cap)
        branches: List[Tuple[float, int, Tuple[WlanAllocation, ...], int]] = []
        if self.workers == 1:
            branches = [_exhaustive_branch(first, *args) for first in range(len(choices))]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                future_to_first = {executor.submit(_exhaustive_branch, first, *args): first
                                   for first in range(len(choices))}
                ordered: Dict[int, Tuple[float, int, Tuple[WlanAllocation, ...], int]] = {}
                for future in as_completed(future_to_first):
                    ordered[future_to_first[future]] = future.result()
            branches = [ordered[first] for first in range(len(choices))]

        best = None
        visited = 0
        for value, overlap, key, count in branches:
            visited += count
            if best is None or _better(value, overlap, key, best):
                best = (value, overlap, key)
        _, _, key = best
        net = NetworkAllocation(grid, key, channelization=channelization)
        report = evaluate_network(net, instance.activity, state_cap=self.state_cap)
        logger.info("exhaustive optimum %s = %.6f Mbps after %d multisets", net.to_literal(),
                    report.aggregate / 1e6, visited)
        self._emit("exhaustive_finished", net, report)
        return OptimizationOutcome(net, None, report, visited)

    # reports

    def compare_schemes(self, instance: ProblemInstance, reference: Grouping,
                        other: Grouping) -> SchemeComparison:
        ref_values = scheme_throughputs(instance, reference)
        other_values = scheme_throughputs(instance, other)
        if len(ref_values) != len(other_values):
            raise InfeasibleSchemeError(f"schemes {reference} and {other} cover different WLAN counts")
        names = tuple(wlan_name(i) for i in range(len(ref_values)))
        return SchemeComparison(reference, other, ref_values, other_values, names)

    @staticmethod
    def scheme_label(scheme: Optional[Grouping]) -> str:
        if scheme is None:
            return "/"
        return format_vector(_scheme_values(scheme))

