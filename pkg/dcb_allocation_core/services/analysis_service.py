# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from dcb_allocation_core.core.ctmc_engine import (
    DEFAULT_STATE_CAP,
    EXACT_SOLVE_CAP,
    enumerate_state_space,
    exact_distribution,
    flow_imbalance,
    product_form_distribution,
    state_table,
    throughput,
)
from dcb_allocation_core.core.mac_phy import activity_ratio, lambda_L
from dcb_allocation_core.core.metrics import SpectrumEfficiencyCase, se_catalog, spectrum_efficiency
from dcb_allocation_core.core.models.allocation import NetworkAllocation
from dcb_allocation_core.core.models.params import ActivityModel
from dcb_allocation_core.core.models.state import Distribution, StateSpace, ThroughputReport
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)


@dataclass
class AnalysisResult:
    space: StateSpace
    product_form: Distribution
    report: ThroughputReport
    exact: Optional[Distribution] = None
    exact_report: Optional[ThroughputReport] = None
    imbalance: Optional[np.ndarray] = None

    @property
    def balance_residual(self) -> Optional[float]:
        if self.imbalance is None:
            return None
        return float(np.max(np.abs(self.imbalance)))

    def state_rows(self) -> Tuple[List[str], List[list]]:
        return state_table(self.space, self.product_form, self.exact, self.imbalance)

    def metric_rows(self) -> Tuple[List[str], List[list]]:
        names = self.space.net.names
        rows: List[list] = []
        for name, value in zip(names, self.report.per_wlan):
            rows.append(["throughput_mbps", name, Helpers.to_mbps(value)])
        rows.append(["aggregate_mbps", "all", Helpers.to_mbps(self.report.aggregate)])
        rows.append(["jfi", "all", self.report.jfi])
        rows.append(["channel_utilization", "all", self.report.channel_utilization])
        if self.report.spectrum_efficiency is not None:
            rows.append(["spectrum_efficiency", "all", self.report.spectrum_efficiency])
        if self.exact_report is not None:
            for name, value in zip(names, self.exact_report.per_wlan):
                rows.append(["throughput_exact_mbps", name, Helpers.to_mbps(value)])
            rows.append(["aggregate_exact_mbps", "all", Helpers.to_mbps(self.exact_report.aggregate)])
            rows.append(["balance_residual", "all", self.balance_residual])
        return ["metric", "wlan", "value"], rows


@dataclass
class SpectrumEfficiencyRow:
    case: SpectrumEfficiencyCase
    closed_form: float
    ctmc: float

    @property
    def relative_difference(self) -> float:
        return Helpers.relative_difference(self.ctmc, self.closed_form)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.case.name,
            "allocation": self.case.literal,
            "eta_closed_form": self.closed_form,
            "eta_ctmc": self.ctmc,
            "relative_difference": self.relative_difference,
        }


class AnalysisService:

    def __init__(self, state_cap: int = DEFAULT_STATE_CAP, exact_cap: int = EXACT_SOLVE_CAP):
        self.state_cap = state_cap
        self.exact_cap = exact_cap

    def analyze(self, net: NetworkAllocation, model: ActivityModel, exact: bool = False,
                with_spectrum_efficiency: bool = False) -> AnalysisResult:
        """Joint state space, product-form distribution and metrics; optionally the exact solve."""
        space = enumerate_state_space(net, self.state_cap)
        product = product_form_distribution(space, model)
        report = throughput(space, product, model, with_spectrum_efficiency)
        result = AnalysisResult(space, product, report)
        if exact:
            result.exact = exact_distribution(space, model, self.exact_cap)
            result.exact_report = throughput(space, result.exact, model, with_spectrum_efficiency)
            result.imbalance = flow_imbalance(space, model, product)
            if result.balance_residual > 1e-12:
                logger.info("product form leaves a balance residual of %.3g for %s", result.balance_residual, net)
        logger.debug("analyzed %s over %d states", net, len(space))
        return result

    def spectrum_efficiency_table(self, model: ActivityModel) -> List[SpectrumEfficiencyRow]:
        """Closed-form and CTMC efficiencies for every two-WLAN overlap pattern, both over lambda L."""
        rhos = [activity_ratio(model, w) for w in (1, 2, 4)]
        scale = lambda_L(model) * (1.0 - model.packet_error_prob)
        rows = []
        for case in se_catalog():
            net = NetworkAllocation.from_literal(case.literal, case.num_channels)
            space = enumerate_state_space(net, self.state_cap)
            report = throughput(space, product_form_distribution(space, model), model)
            eta = spectrum_efficiency(range(len(net)), report, net) / scale
            rows.append(SpectrumEfficiencyRow(case, case.closed_form(*rhos), eta))
        return rows
