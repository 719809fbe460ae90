# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import itertools
import logging

import numpy as np
import pytest

from dcb_allocation_core.core.channelization import grouping_to_allocation_wlans, overlap_metrics
from dcb_allocation_core.core.ctmc_engine import evaluate_network
from dcb_allocation_core.core.exceptions import (
    EmptyBoxError,
    InfeasibleBoxesError,
    InfeasibleSchemeError,
    NoBlockFitsError,
    NonPositiveWidthError,
    ScenarioError,
    SearchSpaceTooLargeError,
)
from dcb_allocation_core.core.mac_phy import activity_ratio, lambda_L
from dcb_allocation_core.core.metrics import gain
from dcb_allocation_core.core.models.scheme import GroupingChannels, GroupingWlans
from dcb_allocation_core.core.objectives import (
    concavity_check,
    envelope_bound,
    g_exact,
    h_exact,
    h_fitted,
    relax_channels,
    relax_wlans,
    second_difference,
    water_fill,
)
from dcb_allocation_core.services.optimizer_service import OptimizerService, scheme_throughputs

WIDTHS = (1, 2, 4, 8)


def mbps(value):
    return value / 1e6


def best_channels(instance):
    candidates = [k for k in itertools.combinations_with_replacement(WIDTHS, instance.num_wlans)
                  if sum(k) <= instance.num_channels]
    return max(h_exact(k, instance) for k in candidates)


def best_wlans(instance):
    values = []
    for n in itertools.combinations_with_replacement(range(1, instance.num_wlans - instance.num_channels + 2),
                                                  instance.num_channels):
        if sum(n) == instance.num_wlans:
            values.append(g_exact(n, instance))
    return max(values)


def completions(node, instance):
    """Feasible integer schemes inside a channel-program box."""
    options = [[w for w in WIDTHS if lo <= w <= hi] for lo, hi in zip(node.lower_bounds, node.upper_bounds)]
    for k in itertools.product(*options):
        if sum(k) <= instance.num_channels:
            yield k


class TestObjectives:

    def test_h_exact(self, instance_factory):
        instance = instance_factory(3, 7)
        assert mbps(h_exact((2, 2, 2), instance)) == pytest.approx(343.7781, abs=1e-3)
        assert mbps(h_exact((2, 4, 1), instance)) == pytest.approx(339.8579, abs=1e-3)
        assert mbps(h_exact((1, 1, 1), instance)) == pytest.approx(186.831, abs=1e-3)
        assert h_exact((4, 4, 1), instance) == 0.0
        assert h_exact((3, 1, 1), instance) == 0.0

    def test_h_fitted(self, instance_factory):
        instance = instance_factory(3, 7)
        assert mbps(h_fitted([7 / 3] * 3, instance)) == pytest.approx(358.8981, abs=1e-3)
        assert mbps(h_fitted([2, 2.5, 2.5], instance)) == pytest.approx(358.5351, abs=1e-3)
        with pytest.raises(NonPositiveWidthError):
            h_fitted([0, 1, 2], instance)

    def test_g_exact(self, instance_factory, model):
        instance = instance_factory(5, 4)
        a, b = lambda_L(model), activity_ratio(model, 1)
        assert g_exact((2, 1, 1, 1), instance) == pytest.approx(2 * a / (1 + 2 * b) + 3 * a / (1 + b))

    def test_balanced_grouping_beats_lopsided(self, instance_factory, model):
        instance = instance_factory(7, 3)
        balanced, lopsided = g_exact((2, 2, 3), instance), g_exact((5, 1, 1), instance)
        assert balanced > lopsided
        for scheme, value in (((2, 2, 3), balanced), ((5, 1, 1), lopsided)):
            net = grouping_to_allocation_wlans(scheme, 7)
            assert evaluate_network(net, model).aggregate == pytest.approx(value, rel=1e-6)

    def test_g_second_difference(self, instance_factory, model):
        instance = instance_factory(5, 1)
        a, b = lambda_L(model), activity_ratio(model, 1)
        value = second_difference(lambda x: g_exact(x, instance), np.array([3.0]), 0)
        assert value == pytest.approx(-2 * a * b / (1 + 3 * b) ** 3, rel=1e-4)

    def test_water_fill(self):
        assert water_fill([1, 1, 1], [8, 8, 8], 7) == pytest.approx([7 / 3] * 3)
        assert water_fill([1, 1], [2, 8], 9) == pytest.approx([2, 7])
        assert water_fill([2, 4, 1], [2, 4, 8], 7) == pytest.approx([2, 4, 1])

    def test_relax_channels(self, instance_factory):
        instance = instance_factory(3, 7)
        root = relax_channels(instance)
        assert root.relaxed_solution == pytest.approx((7 / 3,) * 3)
        assert mbps(root.relaxed_value) == pytest.approx(358.8981, abs=1e-3)
        assert root.upper_bound >= root.relaxed_value
        with pytest.raises(EmptyBoxError):
            relax_channels(instance, [8, 1, 1], [8, 8, 8])
        with pytest.raises(EmptyBoxError):
            relax_channels(instance, [4, 1, 1], [2, 8, 8])

    def test_relax_wlans(self, instance_factory):
        instance = instance_factory(20, 17)
        root = relax_wlans(instance)
        assert root.upper_bounds == (4.0,) * 17
        assert root.relaxed_solution == pytest.approx((20 / 17,) * 17)
        assert root.relaxed_value == pytest.approx(g_exact([20 / 17] * 17, instance))
        with pytest.raises(InfeasibleBoxesError):
            relax_wlans(instance, [2] * 17, [4] * 17)

    def test_envelope_bound_of_pinned_box(self, instance_factory):
        instance = instance_factory(3, 7)
        assert envelope_bound(instance, (2, 2, 2), (2, 2, 2)) == pytest.approx(h_exact((2, 2, 2), instance))
        assert envelope_bound(instance, (3, 2, 2), (3, 2, 2)) == 0.0

    def test_concavity(self, instance_factory):
        instance = instance_factory(20, 17)
        assert concavity_check("h", 3, 100, instance).concave
        assert concavity_check("g", 4, 100, instance).concave
        with pytest.raises(ValueError):
            concavity_check("f", 2, 1, instance)


class TestBranchAndBound:

    def test_channel_trace(self, optimizer, instance_factory):
        result = optimizer.bnb_channels(instance_factory(3, 7))
        first, second, third, fourth = result.trace[:4]

        assert [entry.label for entry in first.entries] == ["{1,1,1}", "{7/3,7/3,7/3}"]
        assert mbps(first.lower_bound) == pytest.approx(186.831, abs=1e-3)
        assert mbps(first.upper_bound) == pytest.approx(358.8981, abs=1e-3)

        assert [entry.label for entry in second.entries] == ["{2,5/2,5/2}", "{4,3/2,3/2}", "{1,3,3}", "{8,1,1}"]
        assert len(second.entries) == len(WIDTHS)
        assert mbps(second.entries[1].value) == pytest.approx(350.7984, abs=1e-3)
        assert second.entries[3].value is None
        assert mbps(second.upper_bound) == pytest.approx(358.5351, abs=1e-3)

        assert [entry.label for entry in third.entries][:3] == ["{2,2,3}", "{2,4,1}", "{2,1,4}"]
        assert mbps(third.entries[0].value) == pytest.approx(357.5556, abs=1e-3)
        assert third.entries[1].feasible
        assert mbps(third.lower_bound) == pytest.approx(339.8579, abs=1e-3)
        assert mbps(third.upper_bound) == pytest.approx(357.5556, abs=1e-3)

        assert fourth.entries[0].label == "{2,2,2}" and fourth.entries[0].feasible
        assert mbps(fourth.lower_bound) == pytest.approx(343.7781, abs=1e-3)
        assert mbps(fourth.upper_bound) == pytest.approx(357.5556, abs=1e-3)

        # child boxes sit inside the root box, so no row can bound above the root relaxation
        assert all(row.upper_bound <= first.upper_bound * (1 + 1e-9) for row in result.trace)

        assert result.best_scheme == GroupingChannels((2, 2, 2))
        assert mbps(result.best_value) == pytest.approx(343.7781, abs=1e-3)

    def test_trace_rows_show_infeasible_children(self, optimizer, instance_factory):
        header, rows = optimizer.bnb_channels(instance_factory(3, 7)).trace_rows()
        assert header == ["iteration", "scheme", "feasible", "objective", "lower_bound", "upper_bound"]
        empty = [row for row in rows if row[1] == "{8,1,1}"]
        assert empty
        assert all(row[2] == "no" and row[3] == "/" for row in empty)

    @pytest.mark.parametrize("channels", range(1, 11))
    def test_channels_match_brute_force(self, optimizer, instance_factory, channels):
        for wlans in range(1, channels + 1):
            instance = instance_factory(wlans, channels)
            result = optimizer.bnb_channels(instance)
            assert result.best_value == pytest.approx(best_channels(instance), rel=1e-9), instance
            assert result.best_scheme.is_feasible(channels)

    @pytest.mark.slow
    @pytest.mark.parametrize("channels", range(11, 18))
    def test_channels_match_brute_force_wide(self, optimizer, instance_factory, channels):
        for wlans in range(1, channels + 1):
            instance = instance_factory(wlans, channels)
            assert optimizer.bnb_channels(instance).best_value == pytest.approx(best_channels(instance), rel=1e-9)

    @pytest.mark.parametrize("channels", range(1, 7))
    def test_wlans_match_brute_force(self, optimizer, instance_factory, channels):
        for wlans in range(channels + 1, 21):
            instance = instance_factory(wlans, channels)
            result = optimizer.bnb_wlans(instance)
            assert result.best_value == pytest.approx(best_wlans(instance), rel=1e-9), instance
            assert result.best_scheme.is_feasible(wlans)
            assert max(result.best_scheme.n) - min(result.best_scheme.n) <= 1

    def test_bounds_never_cut_an_exact_completion(self, optimizer, instance_factory):
        instance = instance_factory(3, 7)
        for node in optimizer.bnb_channels(instance).explored:
            values = [h_exact(k, instance) for k in completions(node, instance)]
            if values:
                assert node.upper_bound >= max(values) - 1e-6

    def test_incumbent_history_is_monotone(self, optimizer, instance_factory):
        for wlans, channels in ((3, 7), (4, 9), (9, 4)):
            history = optimizer.optimize(instance_factory(wlans, channels)).result.incumbent_history
            assert all(b >= a for a, b in zip(history, history[1:]))

    def test_wlans_trace_marks_all_ones_infeasible(self, optimizer, instance_factory):
        result = optimizer.bnb_wlans(instance_factory(20, 17))
        assert not result.trace[0].entries[0].feasible
        assert sorted(result.best_scheme.n) == [1] * 14 + [2] * 3

    def test_regime_is_checked(self, optimizer, instance_factory):
        with pytest.raises(InfeasibleSchemeError):
            optimizer.bnb_channels(instance_factory(5, 4))
        with pytest.raises(InfeasibleSchemeError):
            optimizer.bnb_wlans(instance_factory(4, 4))

    def test_optimize_builds_allocation(self, optimizer, instance_factory):
        outcome = optimizer.optimize(instance_factory(3, 7))
        assert outcome.allocation.to_literal() == "1~2 3~4 5~6"
        assert mbps(outcome.aggregate) == pytest.approx(343.7781, abs=1e-3)
        assert overlap_metrics(outcome.allocation).max_overlap == 0

    def test_callbacks(self, instance_factory, caplog):
        optimizer = OptimizerService()
        seen = []
        optimizer.register_callback("bnb_finished", seen.append)
        optimizer.register_callback("bnb_finished", lambda result: 1 / 0)
        with caplog.at_level(logging.WARNING):
            result = optimizer.bnb_channels(instance_factory(2, 4))
        assert seen == [result]
        assert "callback for bnb_finished failed" in caplog.text


class TestBaselines:

    def test_greedy_channels_trace(self, optimizer, instance_factory):
        result = optimizer.greedy_channels(instance_factory(3, 7))
        assert [step.scheme for step in result.steps] == [(1, 1, 1), (2, 1, 1), (4, 1, 1), (8, 1, 1), (4, 2, 1)]
        assert mbps(result.steps[1].value) == pytest.approx(239.1467, abs=1e-3)
        assert mbps(result.steps[2].value) == pytest.approx(287.5422, abs=1e-3)
        assert not result.steps[3].feasible and result.steps[3].value is None
        assert mbps(result.value) == pytest.approx(339.8579, abs=1e-3)

    def test_greedy_allocation(self, optimizer, instance_factory):
        outcome = optimizer.greedy(instance_factory(3, 7))
        assert outcome.allocation.to_literal() == "1~2,3,4 5~6 7~"

    def test_greedy_wlans_piles_onto_first_channel(self, optimizer, instance_factory):
        instance = instance_factory(20, 17)
        result = optimizer.greedy_wlans(instance)
        assert result.scheme == GroupingWlans((4,) + (1,) * 16)
        assert result.value < optimizer.bnb_wlans(instance).best_value

    def test_random_fixed_width(self, instance_factory):
        rng = np.random.default_rng(3)
        net = OptimizerService.random_fixed_bw(instance_factory(3, 7), 4, rng)
        assert net.to_literal() == "1~2,3,4 1~2,3,4 1~2,3,4"
        with pytest.raises(NoBlockFitsError):
            OptimizerService.random_fixed_bw(instance_factory(2, 3), 8, rng)

    def test_random_variable_width(self, instance_factory):
        rng = np.random.default_rng(5)
        instance = instance_factory(6, 8)
        for _ in range(20):
            net = OptimizerService.random_variable_bw(instance, 2, rng)
            assert all(alloc.width <= 2 and alloc.block.contains(alloc.primary) for alloc in net)
        with pytest.raises(ScenarioError):
            OptimizerService.random_variable_bw(instance, 3, rng)

    def test_random_baseline_is_seeded(self, optimizer, instance_factory):
        instance = instance_factory(2, 4)
        first = optimizer.random_baseline(instance, "random-fixed", 1, draws=40, seed=11)
        second = optimizer.random_baseline(instance, "random-fixed", 1, draws=40, seed=11)
        assert first.aggregates == second.aggregates
        assert first.method == "random-fixed:1"
        shared = optimizer.evaluate(optimizer.to_allocation(instance, GroupingWlans((2,))), instance.activity)
        assert mbps(shared.aggregate) < mbps(first.mean_aggregate) <= 2 * 62.277 + 1e-3

    def test_exhaustive_cap(self, instance_factory):
        with pytest.raises(SearchSpaceTooLargeError):
            OptimizerService(exhaustive_cap=100).exhaustive_search(instance_factory(3, 4))

    @pytest.mark.parametrize("wlans", [
        2,
        pytest.param(3, marks=pytest.mark.slow),
        pytest.param(4, marks=pytest.mark.slow),
        pytest.param(5, marks=pytest.mark.slow),
    ])
    def test_exhaustive_matches_grouping_optimum(self, optimizer, instance_factory, wlans):
        instance = instance_factory(wlans, 4)
        outcome = optimizer.exhaustive_search(instance)
        assert outcome.aggregate == pytest.approx(optimizer.optimize(instance).aggregate, rel=1e-6)
        expected_overlap = 0 if wlans <= 4 else 1
        assert overlap_metrics(outcome.allocation).max_overlap == expected_overlap


class TestComparison:

    def test_compare_schemes(self, optimizer, instance_factory):
        comparison = optimizer.compare_schemes(instance_factory(3, 7), GroupingChannels((2, 2, 2)),
                                               GroupingChannels((4, 2, 1)))
        assert comparison.names == ("A", "B", "C")
        assert comparison.reference_jfi == pytest.approx(1.0)
        assert comparison.other_jfi == pytest.approx(0.8836, abs=1e-4)
        assert comparison.gains == pytest.approx([0.4223, 0.0, 0.4565], abs=1e-4)
        pairs = zip(comparison.reference_throughputs, comparison.other_throughputs)
        signed = [gain(other, ref) for ref, other in pairs]
        assert signed[0] > 0 > signed[2]
        assert comparison.gains == pytest.approx([abs(value) for value in signed])
        assert mbps(comparison.reference_sum - comparison.other_sum) == pytest.approx(343.7781 - 339.8579, abs=1e-3)

    def test_scheme_throughputs_rejects_infeasible(self, instance_factory):
        with pytest.raises(InfeasibleSchemeError):
            scheme_throughputs(instance_factory(3, 7), GroupingChannels((4, 4, 1)))
        with pytest.raises(InfeasibleSchemeError):
            scheme_throughputs(instance_factory(5, 4), GroupingWlans((2, 2)))

    def test_scheme_label(self):
        assert OptimizerService.scheme_label(None) == "/"
        assert OptimizerService.scheme_label(GroupingWlans((2, 1))) == "{2,1}"
