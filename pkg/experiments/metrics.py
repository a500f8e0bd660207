"""
Per-trial metrics and batch aggregation.

Quartiles are taken over successful trials only; failed trials are counted,
never dropped.
"""
import logging
from dataclasses import asdict, dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

import pandas as pd

from simulation.engine import TrialResult, TrialStatus

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "maze_w",
    "maze_h",
    "maze_seed",
    "n",
    "strategy",
    "solver",
    "trial_seed",
    "status",
    "makespan",
    "avg_fuel",
    "head_arrival",
    "optimal_d",
]
DEFAULT_KEYS = ["maze_w", "maze_h", "n", "strategy", "solver"]
ERROR_STATUS = "error"
FAULT_STATUSES = (TrialStatus.COLLISION_FAULT.value, TrialStatus.WALL_FAULT.value)


class TrialMetrics(NamedTuple):
    makespan: int
    avg_fuel: float


@dataclass(frozen=True)
class TrialRecord:
    """One CSV row: where a trial ran and how it went."""
    maze_w: int
    maze_h: int
    maze_seed: int
    n: int
    strategy: str
    solver: str
    trial_seed: int
    status: str
    makespan: Optional[int] = None
    avg_fuel: Optional[float] = None
    head_arrival: Optional[int] = None
    optimal_d: Optional[int] = None


def compute_metrics(result: TrialResult) -> Optional[TrialMetrics]:
    """Makespan and mean fuel of a successful trial, None for any other status."""
    if result.status is not TrialStatus.SUCCESS:
        return None
    fuels = result.per_agent_fuel
    return TrialMetrics(result.makespan, sum(fuels) / len(fuels))


def results_frame(records: Iterable[TrialRecord]) -> pd.DataFrame:
    df = pd.DataFrame([asdict(r) for r in records], columns=CSV_COLUMNS)
    for column in ("maze_w", "maze_h", "n", "makespan", "head_arrival", "optimal_d"):
        df[column] = df[column].astype("Int64")
    df["maze_seed"] = df["maze_seed"].astype("uint64")
    df["trial_seed"] = df["trial_seed"].astype("uint64")
    df["avg_fuel"] = df["avg_fuel"].astype("float64")
    return df


def write_results(df: pd.DataFrame, path: str) -> None:
    df.to_csv(path, index=False, columns=CSV_COLUMNS)


def read_results(path: str) -> pd.DataFrame:
    df = pd.read_csv(path)
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path} is missing columns: {', '.join(missing)}")
    return df


def aggregate(
    results: Union[pd.DataFrame, Sequence[TrialRecord]],
    keys: Sequence[str] = DEFAULT_KEYS,
    expected_groups: Optional[Iterable[tuple]] = None,
) -> pd.DataFrame:
    """
    One row per group with status counts, makespan and avg_fuel quartiles
    over successes, and the median optimal path length. Groups listed in
    `expected_groups` that have no trials are left out with a warning.
    """
    df = results if isinstance(results, pd.DataFrame) else results_frame(results)
    keys = list(keys)
    rows: List[dict] = []
    for group_key, group in df.groupby(keys, sort=True):
        group_key = group_key if isinstance(group_key, tuple) else (group_key,)
        status = group["status"]
        wins = group[status == TrialStatus.SUCCESS.value]
        row = dict(zip(keys, group_key))
        row.update(
            trials=len(group),
            successes=int((status == TrialStatus.SUCCESS.value).sum()),
            timeouts=int((status == TrialStatus.TIMEOUT.value).sum()),
            faults=int(status.isin(FAULT_STATUSES).sum()),
            errors=int((status == ERROR_STATUS).sum()),
        )
        for metric in ("makespan", "avg_fuel"):
            values = wins[metric].astype("float64")
            if values.empty:
                row[f"{metric}_q1"] = row[f"{metric}_median"] = row[f"{metric}_q3"] = float("nan")
            else:
                q1, median, q3 = values.quantile([0.25, 0.5, 0.75]).tolist()
                row[f"{metric}_q1"], row[f"{metric}_median"], row[f"{metric}_q3"] = q1, median, q3
        row["optimal_d_median"] = float(group["optimal_d"].astype("float64").median())
        rows.append(row)

    if expected_groups is not None:
        present = {tuple(r[k] for k in keys) for r in rows}
        for expected in expected_groups:
            if tuple(expected) not in present:
                logger.warning("no trials for group %s, row omitted", dict(zip(keys, expected)))
    return pd.DataFrame(rows)


def fuel_reduction(summary: pd.DataFrame) -> dict:
    """
    Both readings of the fuel saving at the largest agent count: mamt against
    its own single-agent runs, and mamt against naive at the same n.
    Ratios are fractions (0.85 = 85% less fuel); None when not computable.
    """
    report = {"largest_n": None, "vs_single_agent": None, "vs_naive": None}
    mamt = summary[summary["strategy"] == "mamt"]
    if mamt.empty:
        return report
    largest = int(mamt["n"].max())
    report["largest_n"] = largest
    at_largest = mamt[mamt["n"] == largest]["avg_fuel_median"].median()

    single = mamt[mamt["n"] == 1]["avg_fuel_median"].median()
    if pd.notna(single) and single > 0 and pd.notna(at_largest):
        report["vs_single_agent"] = 1.0 - at_largest / single

    naive = summary[(summary["strategy"] == "naive") & (summary["n"] == largest)]["avg_fuel_median"].median()
    if pd.notna(naive) and naive > 0 and pd.notna(at_largest):
        report["vs_naive"] = 1.0 - at_largest / naive
    return report
