# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import csv
import io

import pytest

from dcb_allocation_core.cli import build_parser, main


def tables(text):
    return [list(csv.reader(io.StringIO(block))) for block in text.strip("\n").split("\n\n")]


def metrics(rows):
    return {(row[0], row[1]): row[2] for row in rows[1:]}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestOptimize:

    def test_grouping_optimum(self, capsys):
        code, out, _ = run(capsys, "optimize", "--wlans", "3", "--channels", "7")
        assert code == 0
        values = metrics(tables(out)[0])
        assert values[("allocation", "all")] == "1~2 3~4 5~6"
        assert values[("scheme", "all")] == "{2,2,2}"
        assert float(values[("aggregate_mbps", "all")]) == pytest.approx(343.7781, abs=1e-3)
        assert values[("max_overlap", "all")] == "0"

    def test_greedy(self, capsys):
        code, out, _ = run(capsys, "optimize", "--wlans", "3", "--channels", "7", "--method", "greedy")
        assert code == 0
        assert metrics(tables(out)[0])[("allocation", "all")] == "1~2,3,4 5~6 7~"

    def test_compare_with_greedy(self, capsys):
        code, out, _ = run(capsys, "optimize", "--wlans", "3", "--channels", "7", "--compare", "greedy")
        assert code == 0
        comparison = tables(out)[1]
        assert comparison[0] == ["row", "scheme", "wlan", "value"]
        gains = [float(row[3]) for row in comparison if row[0] == "gain"]
        assert gains == pytest.approx([0.4223, 0.0, 0.4565], abs=1e-4)
        fairness = [float(row[3]) for row in comparison if row[2] == "jfi"]
        assert fairness == pytest.approx([1.0, 0.8836], abs=1e-4)

    def test_trace_file(self, capsys, tmp_path):
        trace = tmp_path / "trace.csv"
        code, _, _ = run(capsys, "optimize", "--wlans", "3", "--channels", "7", "--trace", str(trace))
        assert code == 0
        rows = list(csv.reader(io.StringIO(trace.read_text(encoding="utf-8"))))
        assert rows[0] == ["iteration", "scheme", "feasible", "objective", "lower_bound", "upper_bound"]
        assert rows[1][1:3] == ["{1,1,1}", "yes"]
        assert float(rows[1][3]) == pytest.approx(186.831, abs=1e-3)

    def test_global_flags_after_subcommand(self, capsys, tmp_path):
        output = tmp_path / "out" / "result.csv"
        code, out, _ = run(capsys, "optimize", "--wlans", "2", "--channels", "4", "--seed", "3",
                           "--output", str(output))
        assert code == 0
        assert out == ""
        assert metrics(tables(output.read_text(encoding="utf-8"))[0])[("allocation", "all")] == "1~2 3~4"

    def test_search_space_cap_exit_code(self, capsys):
        code, _, err = run(capsys, "optimize", "--wlans", "5", "--channels", "4", "--method", "exhaustive",
                           "--exhaustive-cap", "10")
        assert code == 4
        assert "exceeds the cap" in err

    def test_compare_needs_grouping_method(self, capsys):
        code, _, _ = run(capsys, "optimize", "--wlans", "2", "--channels", "4", "--method", "random-fixed:1",
                         "--compare", "greedy")
        assert code == 2

    def test_argument_errors(self):
        with pytest.raises(SystemExit):
            main(["optimize", "--channels", "4"])
        with pytest.raises(SystemExit):
            main(["optimize", "--wlans", "2", "--channels", "4", "--method", "annealing"])


class TestAnalyze:

    def test_bonding_pair_tables(self, capsys):
        code, out, _ = run(capsys, "analyze", "bonding-pair")
        assert code == 0
        states, summary = tables(out)
        assert states[0] == ["state_id", "active_pairs", "pi"]
        assert [row[1] for row in states[1:]] == ["-", "A:1w2", "B:1w4", "A:1w2;B:3w2", "B:3w2"]
        assert sum(float(row[2]) for row in states[1:]) == pytest.approx(1.0, abs=1e-5)
        assert summary[0] == ["metric", "wlan", "value"]
        assert ("aggregate_mbps", "all") in metrics(summary)

    def test_exact_columns(self, capsys):
        code, out, _ = run(capsys, "analyze", "bonding-pair", "--exact", "--se")
        assert code == 0
        states, summary = tables(out)
        assert states[0] == ["state_id", "active_pairs", "pi", "pi_exact", "flow_imbalance"]
        keys = metrics(summary)
        assert ("balance_residual", "all") in keys
        assert ("spectrum_efficiency", "all") in keys
        assert ("throughput_exact_mbps", "B") in keys

    def test_missing_scenario(self, capsys, tmp_path):
        code, _, err = run(capsys, "analyze", str(tmp_path / "absent.json"))
        assert code == 2
        assert err.startswith("error:")

    def test_shared_primary_scenario(self, capsys, tmp_path):
        scenario = tmp_path / "dense.json"
        literals = ", ".join('{"allocation": "1~2,3,4"}' for _ in range(3))
        scenario.write_text('{"channels": 4, "wlans": [' + literals + ']}', encoding="utf-8")
        code, out, _ = run(capsys, "analyze", str(scenario))
        assert code == 0
        assert len(tables(out)[0]) == 5


class TestSimulate:

    def test_same_seed_same_bytes(self, capsys):
        argv = ["simulate", "bonding-pair", "--horizon", "2", "--replications", "2", "--seed", "5"]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second
        rows = tables(first)[0]
        assert rows[0] == ["cw", "replication", "wlan", "throughput_bps", "ci_halfwidth_bps"]
        assert [row[1] for row in rows[1:]] == ["1", "1", "2", "2", "mean", "mean"]

    def test_cw_sweep_with_comparison(self, capsys):
        code, out, _ = run(capsys, "simulate", "bonding-pair", "--horizon", "2", "--replications", "2",
                           "--cw", "16,32", "--compare", "exact")
        assert code == 0
        rows = tables(out)[0]
        assert rows[0][-2:] == ["analytic_bps", "relative_error"]
        assert {row[0] for row in rows[1:]} == {"16", "32"}

    def test_assert_match_failure_still_writes_table(self, capsys):
        code, out, err = run(capsys, "simulate", "non-overlapped", "--horizon", "1", "--replications", "2",
                             "--compare", "product", "--assert-match", "0.000001")
        assert code == 5
        assert tables(out)[0][0][0] == "cw"
        assert "exceeds" in err

    def test_assert_match_needs_compare(self, capsys):
        code, _, _ = run(capsys, "simulate", "bonding-pair", "--horizon", "1", "--replications", "1",
                         "--assert-match", "5")
        assert code == 2

    def test_states_table(self, capsys):
        code, out, _ = run(capsys, "simulate", "bonding-pair", "--horizon", "2", "--replications", "1", "--states")
        assert code == 0
        states = tables(out)[1]
        assert states[0] == ["cw", "active_pairs", "time_fraction", "pi", "pi_exact"]
        assert len(states) == 6


class TestOtherCommands:

    def test_se_table(self, capsys):
        code, out, _ = run(capsys, "se-table")
        assert code == 0
        rows = tables(out)[0]
        assert rows[0] == ["scheme", "allocation", "eta_closed_form", "eta_ctmc", "relative_difference"]
        assert [row[0] for row in rows[1:]] == [f"f{i}" for i in range(1, 11)]

    def test_sweep_from_flags(self, capsys):
        code, out, _ = run(capsys, "sweep", "--channels", "4", "--n-min", "1", "--n-max", "2",
                           "--methods", "bbm,greedy", "--metrics", "throughput")
        assert code == 0
        rows = tables(out)[0]
        assert rows[0] == ["K", "N", "method", "metric", "value"]
        assert [row[:3] for row in rows[1:]] == [["4", "1", "bbm"], ["4", "1", "greedy"],
                                                  ["4", "2", "bbm"], ["4", "2", "greedy"]]

    def test_sweep_needs_range(self, capsys):
        code, _, _ = run(capsys, "sweep", "--channels", "4")
        assert code == 2

    @pytest.mark.parametrize("argv", [
        ["analyze", "bonding-pair"],
        ["simulate", "bonding-pair"],
        ["optimize", "--wlans", "1", "--channels", "1"],
        ["sweep"],
        ["se-table"],
    ])
    def test_parser_knows_every_command(self, argv):
        assert build_parser().parse_args(argv).command == argv[0]
