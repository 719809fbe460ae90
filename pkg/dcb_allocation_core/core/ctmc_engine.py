# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
import math
from collections import deque
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from dcb_allocation_core.core.channelization import dcb_select, sharing_components
from dcb_allocation_core.core.exceptions import (
    AllZeroError,
    SimulationError,
    StateSpaceTooLargeError,
)
from dcb_allocation_core.core.mac_phy import activity_ratio
from dcb_allocation_core.core.metrics import jfi, network_utilization, spectrum_efficiency
from dcb_allocation_core.core.models.allocation import NetworkAllocation
from dcb_allocation_core.core.models.params import ActivityModel
from dcb_allocation_core.core.models.state import (
    ACTIVATION,
    DEPARTURE,
    Distribution,
    NetworkState,
    StateSpace,
    ThroughputReport,
    Transition,
)

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 10 ** 6
EXACT_SOLVE_CAP = 10 ** 4

PRODUCT_FORM = "product"
EXACT = "exact"


def enumerate_state_space(net: NetworkAllocation, state_cap: int = DEFAULT_STATE_CAP) -> StateSpace:
    """Breadth-first closure of the DCB state space from the idle state."""
    empty = NetworkState()
    states: List[NetworkState] = [empty]
    index: Dict[NetworkState, int] = {empty: 0}
    transitions: List[Transition] = []
    queue = deque([empty])

    def reach(state: NetworkState) -> int:
        if state not in index:
            if len(states) >= state_cap:
                raise StateSpaceTooLargeError(
                    f"state space of {len(net)} WLANs exceeds the cap of {state_cap} states")
            index[state] = len(states)
            states.append(state)
            queue.append(state)
        return index[state]

    while queue:
        state = queue.popleft()
        source = index[state]
        busy = state.busy
        active = state.wlans
        for wlan, alloc in enumerate(net):
            if wlan in active or alloc.primary in busy:
                continue
            block = dcb_select(alloc, busy, net.channelization)
            if block.overlaps(busy):
                raise SimulationError(f"activation of WLAN {wlan} on {block} collides with busy {sorted(busy)}")
            target = reach(state.activate(wlan, block))
            transitions.append(Transition(source, target, ACTIVATION, wlan, block.width))
        for wlan, block in state.active:
            target = reach(state.deactivate(wlan))
            transitions.append(Transition(source, target, DEPARTURE, wlan, block.width))

    logger.debug("enumerated %d states and %d transitions for %s", len(states), len(transitions), net)
    return StateSpace(net=net, states=states, transitions=transitions, _index=index)


def _log_weight(state: NetworkState, model: ActivityModel) -> float:
    total = 0.0
    for wlan, block in state.active:
        rho = activity_ratio(model, block.width, wlan)
        if rho <= 0:
            return -math.inf
        total += math.log(rho)
    return total


def product_form_distribution(space: StateSpace, model: ActivityModel) -> Distribution:
    """pi_s proportional to the product of rho_i(k'_i) over the active pairs of s."""
    logs = np.array([_log_weight(state, model) for state in space.states])
    weights = np.exp(logs - np.max(logs))
    return Distribution(space, weights / np.sum(weights))


def generator_matrix(space: StateSpace, model: ActivityModel) -> sparse.csr_matrix:
    size = len(space)
    rows, cols, rates = [], [], []
    for transition in space.transitions:
        rows.append(transition.source)
        cols.append(transition.target)
        rates.append(transition.rate(model))
    q = sparse.coo_matrix((rates, (rows, cols)), shape=(size, size)).tocsr()
    outflow = np.asarray(q.sum(axis=1)).ravel()
    return (q - sparse.diags(outflow)).tocsr()


def exact_distribution(space: StateSpace, model: ActivityModel,
                       max_states: int = EXACT_SOLVE_CAP) -> Distribution:
    """Solve pi Q = 0 with sum(pi) = 1."""
    size = len(space)
    if size > max_states:
        raise StateSpaceTooLargeError(f"exact solve refused for {size} states (cap {max_states})")
    if size == 1:
        return Distribution(space, np.ones(1))

    system = generator_matrix(space, model).transpose().tolil()
    system[size - 1, :] = np.ones(size)
    rhs = np.zeros(size)
    rhs[size - 1] = 1.0
    pi = spsolve(system.tocsc(), rhs)
    pi = np.clip(np.asarray(pi, dtype=float), 0.0, None)
    return Distribution(space, pi / np.sum(pi))


def flow_imbalance(space: StateSpace, model: ActivityModel,
                   dist: Optional[Distribution] = None) -> np.ndarray:
    """Net probability inflow minus outflow per state."""
    if dist is None:
        dist = product_form_distribution(space, model)
    return generator_matrix(space, model).transpose().dot(dist.probabilities)


def balance_residual(space: StateSpace, model: ActivityModel, dist: Optional[Distribution] = None) -> float:
    return float(np.max(np.abs(flow_imbalance(space, model, dist))))


def throughput(space: StateSpace, dist: Distribution, model: ActivityModel,
               with_spectrum_efficiency: bool = False) -> ThroughputReport:
    """Th_i = L_i (1 - p_e) sum over states with i active of mu_i(k'_i(s)) pi_s."""
    net = space.net
    per_wlan = np.zeros(len(net))
    for state, probability in zip(space.states, dist.probabilities):
        for wlan, block in state.active:
            per_wlan[wlan] += probability / model.durations.duration(block.width)
    per_wlan = [
        model.payload(wlan) * (1.0 - model.packet_error_prob) * float(value)
        for wlan, value in enumerate(per_wlan)
    ]
    return _report(net, per_wlan, with_spectrum_efficiency)


def _report(net: NetworkAllocation, per_wlan: List[float], with_spectrum_efficiency: bool) -> ThroughputReport:
    try:
        fairness = jfi(per_wlan)
    except AllZeroError:
        fairness = math.nan
    report = ThroughputReport(
        per_wlan=per_wlan,
        aggregate=float(sum(per_wlan)),
        jfi=fairness,
        channel_utilization=network_utilization(net),
        names=net.names,
    )
    if with_spectrum_efficiency:
        report.spectrum_efficiency = spectrum_efficiency(range(len(net)), report, net)
    return report


def solve(space: StateSpace, model: ActivityModel, method: str = PRODUCT_FORM) -> Distribution:
    if method == EXACT:
        return exact_distribution(space, model)
    return product_form_distribution(space, model)


def evaluate_network(net: NetworkAllocation, model: ActivityModel, method: str = PRODUCT_FORM,
                     state_cap: int = DEFAULT_STATE_CAP,
                     with_spectrum_efficiency: bool = False) -> ThroughputReport:
    """Per-WLAN throughput solved one sharing component at a time.

    WLANs that share no channel evolve independently, so the joint chain is the product of the
    component chains and per-WLAN throughput only depends on its own component.
    """
    per_wlan = [0.0] * len(net)
    for members in sharing_components(net):
        sub = net.subnetwork(members)
        sub_model = _restrict_model(model, members)
        space = enumerate_state_space(sub, state_cap)
        report = throughput(space, solve(space, sub_model, method), sub_model)
        for local, wlan in enumerate(members):
            per_wlan[wlan] = report.per_wlan[local]
    return _report(net, per_wlan, with_spectrum_efficiency)


def _restrict_model(model: ActivityModel, members: List[int]) -> ActivityModel:
    if not model.attempt_overrides and not model.payload_overrides:
        return model
    local = {wlan: i for i, wlan in enumerate(members)}
    return ActivityModel(
        durations=model.durations,
        mean_backoff=model.mean_backoff,
        payload_bits=model.payload_bits,
        packet_error_prob=model.packet_error_prob,
        attempt_overrides={local[w]: r for w, r in model.attempt_overrides.items() if w in local},
        payload_overrides={local[w]: p for w, p in model.payload_overrides.items() if w in local},
    )


def state_table(space: StateSpace, dist: Distribution,
                exact: Optional[Distribution] = None,
                imbalance: Optional[np.ndarray] = None) -> Tuple[List[str], List[list]]:
    header = ["state_id", "active_pairs", "pi"]
    if exact is not None:
        header.append("pi_exact")
    if imbalance is not None:
        header.append("flow_imbalance")
    rows = []
    for i, state in enumerate(space.states):
        row = [i, state.label(space.net.names), float(dist.probabilities[i])]
        if exact is not None:
            row.append(float(exact.probabilities[i]))
        if imbalance is not None:
            row.append(float(imbalance[i]))
        rows.append(row)
    return header, rows
