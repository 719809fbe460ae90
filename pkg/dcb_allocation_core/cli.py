# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from dcb_allocation_core import __version__
from dcb_allocation_core.core.channelization import overlap_metrics
from dcb_allocation_core.core.ctmc_engine import EXACT, PRODUCT_FORM, evaluate_network
from dcb_allocation_core.core.exceptions import AssertionFailedError, DcbError, ScenarioError
from dcb_allocation_core.core.models.params import ActivityModel, MacPhyParams
from dcb_allocation_core.core.models.scenario import SWEEP_METRICS, SweepMethod, SweepSpec
from dcb_allocation_core.core.models.scheme import BnbResult, GreedyResult, ProblemInstance
from dcb_allocation_core.core.models.simulation import BackoffDistribution, SimConfig, TransmissionDistribution
from dcb_allocation_core.services.analysis_service import AnalysisService
from dcb_allocation_core.services.config_service import ConfigService
from dcb_allocation_core.services.export_service import ExportService
from dcb_allocation_core.services.optimizer_service import OptimizationOutcome, OptimizerService
from dcb_allocation_core.services.simulation_service import SimulationService
from dcb_allocation_core.services.sweep_service import SweepService
from dcb_allocation_core.utils.helpers import Helpers

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
GROUPING_METHODS = ("bbm", "greedy")


def _common_options(suppress: bool) -> argparse.ArgumentParser:
    """Global flags; the suppressed copy lets them follow the subcommand too."""
    parser = argparse.ArgumentParser(add_help=False)

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--params", type=Path, default=default(None), help="MAC/PHY parameter JSON file")
    parser.add_argument("--seed", type=int, default=default(0), help="base random seed")
    parser.add_argument("--workers", type=int, default=default(1), help="worker processes")
    parser.add_argument("--output", type=Path, default=default(None), help="write CSV here instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=default(0), help="-v for INFO, -vv for DEBUG")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcb-allocation",
        description="Throughput analysis, simulation and channel allocation for 802.11ac dynamic channel bonding.",
        parents=[_common_options(False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_options(True)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    analyze = commands.add_parser("analyze", parents=[common], help="CTMC analysis of a scenario")
    analyze.add_argument("scenario", help="scenario JSON file or preset name")
    analyze.add_argument("--exact", action="store_true", help="add the global-balance solution and residuals")
    analyze.add_argument("--se", action="store_true", help="report spectrum efficiency")

    simulate = commands.add_parser("simulate", parents=[common], help="discrete-event simulation of a scenario")
    simulate.add_argument("scenario", help="scenario JSON file or preset name")
    simulate.add_argument("--horizon", type=float, default=100.0, help="simulated seconds per replication")
    simulate.add_argument("--warmup", type=float, default=None, help="discarded seconds (default 5%% of horizon)")
    simulate.add_argument("--replications", type=int, default=30)
    simulate.add_argument("--backoff", choices=[d.value for d in BackoffDistribution], default="exponential")
    simulate.add_argument("--transmission", choices=[d.value for d in TransmissionDistribution],
                          default="exponential")
    simulate.add_argument("--cw", type=Helpers.parse_int_list, default=None,
                          help="comma-separated contention windows to sweep")
    simulate.add_argument("--compare", choices=[PRODUCT_FORM, EXACT], default=None,
                          help="add analytic throughput and relative error")
    simulate.add_argument("--assert-match", type=float, default=None, metavar="PCT",
                          help="fail when any relative error exceeds PCT percent")
    simulate.add_argument("--states", action="store_true", help="add a time-in-state table")

    optimize = commands.add_parser("optimize", parents=[common], help="channel allocation for N WLANs on K channels")
    optimize.add_argument("--wlans", type=int, required=True)
    optimize.add_argument("--channels", type=int, required=True)
    optimize.add_argument("--method", type=SweepMethod.parse, default=SweepMethod("bbm"),
                          help="bbm, greedy, exhaustive, random-fixed:<width> or random-var:<max width>")
    optimize.add_argument("--trace", type=Path, default=None, help="write the search trace CSV here")
    optimize.add_argument("--compare", choices=GROUPING_METHODS, default=None,
                          help="per-WLAN comparison against another grouping method")
    optimize.add_argument("--exhaustive-cap", type=int, default=10 ** 7)

    sweep = commands.add_parser("sweep", parents=[common], help="metrics over a range of WLAN counts")
    sweep.add_argument("--spec", type=Path, default=None, help="sweep JSON file")
    sweep.add_argument("--channels", type=int, default=None)
    sweep.add_argument("--n-min", type=int, default=None)
    sweep.add_argument("--n-max", type=int, default=None)
    sweep.add_argument("--methods", default="bbm,greedy")
    sweep.add_argument("--draws", type=int, default=1000)
    sweep.add_argument("--metrics", default=",".join(SWEEP_METRICS))
    sweep.add_argument("--exhaustive-cap", type=int, default=10 ** 7)

    commands.add_parser("se-table", parents=[common], help="spectrum efficiency of two-WLAN overlap patterns")
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def cmd_analyze(args: argparse.Namespace, config: ConfigService, export: ExportService) -> None:
    scenario = config.load_scenario(args.scenario)
    net = scenario.to_network()
    model = scenario.activity_model(config.explicit_parameters())
    result = AnalysisService().analyze(net, model, exact=args.exact, with_spectrum_efficiency=args.se)
    export.add_table(*result.state_rows())
    export.add_table(*result.metric_rows())


def cmd_simulate(args: argparse.Namespace, config: ConfigService, export: ExportService) -> None:
    scenario = config.load_scenario(args.scenario)
    net = scenario.to_network()
    base = config.explicit_parameters() or scenario.parameters or MacPhyParams()
    windows = args.cw or [base.contention_window_slots]
    cfg = SimConfig(
        horizon=args.horizon,
        warmup=args.warmup,
        seed=args.seed,
        backoff_distribution=args.backoff,
        transmission_distribution=args.transmission,
        replications=args.replications,
        collect_states=args.states,
    )
    service = SimulationService(workers=args.workers)

    header = ["cw", "replication", "wlan", "throughput_bps", "ci_halfwidth_bps"]
    if args.compare:
        header += ["analytic_bps", "relative_error"]
    rows: List[list] = []
    state_rows: List[list] = []
    worst = 0.0
    for window in windows:
        model = scenario.activity_model(base.with_contention_window(window))
        result = service.simulate(net, model, cfg)
        for replication, values in enumerate(result.replication_throughputs, start=1):
            for name, value in zip(net.names, values):
                row = [window, replication, name, value, ""]
                rows.append(row + ["", ""] if args.compare else row)
        analytic = evaluate_network(net, model, args.compare).per_wlan if args.compare else None
        for i, name in enumerate(net.names):
            row = [window, "mean", name, result.per_wlan_throughput[i], result.confidence_halfwidth[i]]
            if analytic is not None:
                error = Helpers.relative_difference(result.per_wlan_throughput[i], analytic[i])
                worst = max(worst, error)
                row += [analytic[i], error]
            rows.append(row)
        if args.states:
            state_rows.extend(_state_rows(window, net, model, result.time_in_state))

    export.add_table(header, rows)
    if args.states:
        export.add_table(["cw", "active_pairs", "time_fraction", "pi", "pi_exact"], state_rows)
    if args.assert_match is not None:
        if not args.compare:
            raise ScenarioError("--assert-match needs --compare", field="assert-match")
        if worst * 100.0 > args.assert_match:
            raise AssertionFailedError(
                f"largest relative error {worst * 100.0:.3f}% exceeds {args.assert_match}%")


def _state_rows(window: int, net, model: ActivityModel, fractions) -> List[list]:
    result = AnalysisService().analyze(net, model, exact=True)
    rows = []
    for i, state in enumerate(result.space.states):
        rows.append([window, state.label(net.names), fractions.get(state, 0.0),
                     float(result.product_form.probabilities[i]), float(result.exact.probabilities[i])])
    return rows


def _outcome_for(method: SweepMethod, instance: ProblemInstance, optimizer: OptimizerService,
                 seed: int) -> OptimizationOutcome:
    if method.kind == "bbm":
        return optimizer.optimize(instance)
    if method.kind == "greedy":
        return optimizer.greedy(instance)
    if method.kind == "exhaustive":
        return optimizer.exhaustive_search(instance)
    rng = np.random.default_rng(seed)
    if method.kind == "random-fixed":
        net = optimizer.random_fixed_bw(instance, method.width, rng)
    else:
        net = optimizer.random_variable_bw(instance, method.width, rng)
    return OptimizationOutcome(net, None, optimizer.evaluate(net, instance.activity))


def cmd_optimize(args: argparse.Namespace, config: ConfigService, export: ExportService) -> None:
    params = config.get_parameters()
    instance = ProblemInstance(args.wlans, args.channels, ActivityModel.from_params(params), params.fit)
    optimizer = OptimizerService(workers=args.workers, exhaustive_cap=args.exhaustive_cap)
    outcome = _outcome_for(args.method, instance, optimizer, args.seed)

    net = outcome.allocation
    rows: List[list] = [
        ["method", "all", str(args.method)],
        ["scheme", "all", optimizer.scheme_label(outcome.scheme)],
        ["allocation", "all", net.to_literal()],
        ["aggregate_mbps", "all", Helpers.to_mbps(outcome.aggregate)],
        ["jfi", "all", outcome.report.jfi],
        ["channel_utilization", "all", outcome.report.channel_utilization],
        ["max_overlap", "all", overlap_metrics(net).max_overlap],
    ]
    for name, alloc, value in zip(net.names, net.allocations, outcome.report.per_wlan):
        rows.append(["allocation", name, alloc.to_literal()])
        rows.append(["throughput_mbps", name, Helpers.to_mbps(value)])
    export.add_table(["metric", "wlan", "value"], rows)

    if args.trace is not None:
        if isinstance(outcome.result, (BnbResult, GreedyResult)):
            ExportService.write_table(args.trace, *outcome.result.trace_rows())
        else:
            logger.warning("method %s keeps no search trace; %s not written", args.method, args.trace)

    if args.compare is not None:
        if outcome.scheme is None:
            raise ScenarioError(f"--compare needs a grouping method, not {args.method}", field="compare")
        other = _outcome_for(SweepMethod(args.compare), instance, optimizer, args.seed)
        comparison = optimizer.compare_schemes(instance, outcome.scheme, other.scheme)
        table: List[list] = []
        for label, scheme, values, total, fairness in (
                (str(args.method), outcome.scheme, comparison.reference_throughputs,
                 comparison.reference_sum, comparison.reference_jfi),
                (args.compare, other.scheme, comparison.other_throughputs,
                 comparison.other_sum, comparison.other_jfi)):
            scheme_text = optimizer.scheme_label(scheme)
            for name, value in zip(comparison.names, values):
                table.append([label, scheme_text, name, Helpers.to_mbps(value)])
            table.append([label, scheme_text, "sum", Helpers.to_mbps(total)])
            table.append([label, scheme_text, "jfi", fairness])
        for name, value in zip(comparison.names, comparison.gains):
            table.append(["gain", "/", name, value])
        export.add_table(["row", "scheme", "wlan", "value"], table)


def cmd_sweep(args: argparse.Namespace, config: ConfigService, export: ExportService) -> None:
    if args.spec is not None:
        spec = config.load_sweep(args.spec)
    else:
        if args.channels is None or args.n_min is None or args.n_max is None:
            raise ScenarioError("sweep needs --spec or --channels, --n-min and --n-max", field="channels")
        spec = SweepSpec.from_dict({
            "channels": args.channels,
            "n_min": args.n_min,
            "n_max": args.n_max,
            "methods": args.methods,
            "draws": args.draws,
            "metrics": args.metrics,
            "exhaustive_cap": args.exhaustive_cap,
        })
    params = config.get_parameters()
    optimizer = OptimizerService(workers=args.workers, exhaustive_cap=spec.exhaustive_cap)
    result = SweepService(optimizer, seed=args.seed).run(spec, ActivityModel.from_params(params), params.fit)
    export.add_table(["K", "N", "method", "metric", "value"], result.rows(list(spec.metrics)))


def cmd_se_table(args: argparse.Namespace, config: ConfigService, export: ExportService) -> None:
    model = ActivityModel.from_params(config.get_parameters())
    rows = AnalysisService().spectrum_efficiency_table(model)
    header = ["scheme", "allocation", "eta_closed_form", "eta_ctmc", "relative_difference"]
    export.add_table(header, [[row.to_dict()[key] for key in header] for row in rows])


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "se-table": cmd_se_table,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    config = ConfigService(args.params)
    export = ExportService(args.output)
    try:
        COMMANDS[args.command](args, config, export)
    except AssertionFailedError as e:
        export.flush()
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except DcbError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    if not export.flush():
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
