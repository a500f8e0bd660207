import logging
import math

import pandas as pd
import pytest

from experiments.metrics import (
    CSV_COLUMNS,
    TrialRecord,
    aggregate,
    compute_metrics,
    fuel_reduction,
    read_results,
    results_frame,
    write_results,
)
from simulation.engine import TrialResult, TrialStatus


def _record(n=5, strategy="mamt", status="success", makespan=10, avg_fuel=4.0, seed=1):
    ok = status == "success"
    return TrialRecord(
        maze_w=4, maze_h=4, maze_seed=7, n=n, strategy=strategy, solver="dfs", trial_seed=seed,
        status=status, makespan=makespan if ok else None, avg_fuel=avg_fuel if ok else None,
        head_arrival=makespan - 2 if ok else None, optimal_d=6,
    )


class TestComputeMetrics:
    def test_success(self):
        result = TrialResult(TrialStatus.SUCCESS, 6, [4, 2], 4)
        assert compute_metrics(result) == (6, 3.0)

    @pytest.mark.parametrize("status", [TrialStatus.TIMEOUT, TrialStatus.WALL_FAULT, TrialStatus.COLLISION_FAULT])
    def test_undefined_without_success(self, status):
        assert compute_metrics(TrialResult(status, None, [1, 1], None)) is None


class TestAggregate:
    def test_identical_trials_collapse(self):
        summary = aggregate([_record(seed=s) for s in range(4)])
        (row,) = summary.to_dict("records")
        assert row["trials"] == 4 and row["successes"] == 4
        assert row["makespan_q1"] == row["makespan_median"] == row["makespan_q3"] == 10
        assert row["avg_fuel_median"] == 4.0
        assert row["optimal_d_median"] == 6

    def test_failures_counted_not_averaged(self):
        records = [
            _record(makespan=8, avg_fuel=3.0, seed=1),
            _record(makespan=12, avg_fuel=5.0, seed=2),
            _record(status="timeout", seed=3),
            _record(status="collision_fault", seed=4),
            _record(status="error", seed=5),
        ]
        (row,) = aggregate(records).to_dict("records")
        assert (row["trials"], row["successes"], row["timeouts"], row["faults"], row["errors"]) == (5, 2, 1, 1, 1)
        assert row["makespan_median"] == 10
        assert row["avg_fuel_median"] == 4.0

    def test_no_successes_leaves_quartiles_empty(self):
        (row,) = aggregate([_record(status="timeout")]).to_dict("records")
        assert math.isnan(row["makespan_median"])

    def test_one_row_per_group(self):
        records = [_record(n=n, strategy=s) for n in (1, 5) for s in ("mamt", "naive")]
        summary = aggregate(records)
        assert len(summary) == 4
        assert list(summary["n"]) == [1, 1, 5, 5]

    def test_missing_group_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="experiments.metrics"):
            summary = aggregate([_record()], expected_groups=[(4, 4, 5, "mamt", "dfs"), (4, 4, 9, "mamt", "dfs")])
        assert len(summary) == 1
        assert "no trials for group" in caplog.text
        assert "9" in caplog.text


class TestCsv:
    def test_header_and_integer_columns(self, tmp_path):
        path = tmp_path / "results.csv"
        write_results(results_frame([_record(), _record(status="timeout", seed=2)]), str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1] == "4,4,7,5,mamt,dfs,1,success,10,4.0,8,6"
        assert lines[2] == "4,4,7,5,mamt,dfs,2,timeout,,,,6"

    def test_read_back(self, tmp_path):
        path = tmp_path / "results.csv"
        write_results(results_frame([_record()]), str(path))
        df = read_results(str(path))
        assert df.loc[0, "makespan"] == 10

    def test_read_rejects_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        pd.DataFrame({"n": [1]}).to_csv(path, index=False)
        with pytest.raises(ValueError):
            read_results(str(path))


class TestFuelReduction:
    def _summary(self):
        return aggregate([
            _record(n=1, avg_fuel=20.0),
            _record(n=50, avg_fuel=5.0),
            _record(n=50, strategy="naive", avg_fuel=25.0),
        ])

    def test_both_readings(self):
        report = fuel_reduction(self._summary())
        assert report["largest_n"] == 50
        assert report["vs_single_agent"] == pytest.approx(0.75)
        assert report["vs_naive"] == pytest.approx(0.8)

    def test_without_mamt(self):
        summary = aggregate([_record(strategy="naive")])
        assert fuel_reduction(summary) == {"largest_n": None, "vs_single_agent": None, "vs_naive": None}
