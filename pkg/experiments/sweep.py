"""
Batch sweeps: the cross product of maze sizes, agent counts, strategies and
solvers, a fixed number of trials per cell, seeds derived from one base seed.

`run_sweep` is a generator: it yields short status strings while it works and
yields the result table last.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from experiments.metrics import ERROR_STATUS, TrialRecord, compute_metrics, results_frame
from simulation.baselines import StrategyKind
from simulation.engine import TrialConfig, run_trial
from simulation.maze import generate_grid_maze
from simulation.solvers import SolverKind
from utils.config import DEFAULT_STEP_CAP, ConfigError
from utils.rng import derive_seed

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 100


def parse_size(text: str) -> Tuple[int, int]:
    try:
        width, height = (int(x) for x in str(text).lower().split("x"))
    except ValueError:
        raise ConfigError(f"maze size must look like WxH, got {text!r}") from None
    if width < 1 or height < 1 or width * height < 2:
        raise ConfigError(f"maze size {text!r} must hold at least 2 cells")
    return width, height


def _split(value: Union[str, Sequence]) -> List[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return [str(part) for part in value]


@dataclass(frozen=True)
class SweepSpec:
    maze_sizes: Tuple[Tuple[int, int], ...]
    agent_counts: Tuple[int, ...]
    strategies: Tuple[StrategyKind, ...]
    solvers: Tuple[SolverKind, ...]
    trials: int
    base_seed: int = 0
    step_cap: int = DEFAULT_STEP_CAP
    output: str = "results/batch.csv"
    plot_dir: Optional[str] = None

    def validate(self) -> None:
        for name in ("maze_sizes", "agent_counts", "strategies", "solvers"):
            if not getattr(self, name):
                raise ConfigError(f"sweep needs at least one entry in {name}")
        if any(n < 1 for n in self.agent_counts):
            raise ConfigError(f"agent counts must be >= 1, got {list(self.agent_counts)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.step_cap < 1:
            raise ConfigError(f"step cap must be >= 1, got {self.step_cap}")

    @property
    def cell_count(self) -> int:
        return len(self.maze_sizes) * len(self.agent_counts) * len(self.strategies) * len(self.solvers)

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "SweepSpec":
        """Build a spec from config-file or CLI values (strings or lists)."""
        try:
            spec = cls(
                maze_sizes=tuple(parse_size(s) for s in _split(values.get("maze_sizes", ""))),
                agent_counts=tuple(int(n) for n in _split(values.get("n", ""))),
                strategies=tuple(StrategyKind.parse(s) for s in _split(values.get("strategies", "mamt"))),
                solvers=tuple(SolverKind.parse(s) for s in _split(values.get("solvers", "dfs"))),
                trials=int(values.get("trials", 1)),
                base_seed=int(values.get("base_seed", 0)),
                step_cap=int(values.get("step_cap", DEFAULT_STEP_CAP)),
                output=str(values.get("out", "results/batch.csv")),
                plot_dir=values.get("plot") or None,
            )
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from e
        spec.validate()
        return spec


@dataclass(frozen=True)
class TrialTask:
    maze_w: int
    maze_h: int
    maze_seed: int
    n: int
    strategy: StrategyKind
    solver: SolverKind
    trial_seed: int
    step_cap: int


def maze_seed_for(base_seed: int, size: Tuple[int, int], trial_index: int) -> int:
    # Same maze for every strategy, solver and n at one trial index.
    return derive_seed(base_seed, "maze", f"{size[0]}x{size[1]}", trial_index)


def trial_seed_for(base_seed, size, strategy, solver, n, trial_index) -> int:
    return derive_seed(base_seed, f"{size[0]}x{size[1]}", StrategyKind(strategy).value,
                       SolverKind(solver).value, n, trial_index)


def plan_trials(spec: SweepSpec) -> List[TrialTask]:
    """Every trial of the sweep in deterministic cell order."""
    tasks = []
    for size in spec.maze_sizes:
        for n in spec.agent_counts:
            for strategy in spec.strategies:
                for solver in spec.solvers:
                    for trial_index in range(spec.trials):
                        tasks.append(TrialTask(
                            maze_w=size[0],
                            maze_h=size[1],
                            maze_seed=maze_seed_for(spec.base_seed, size, trial_index),
                            n=n,
                            strategy=strategy,
                            solver=solver,
                            trial_seed=trial_seed_for(spec.base_seed, size, strategy, solver, n, trial_index),
                            step_cap=spec.step_cap,
                        ))
    return tasks


def run_task(task: TrialTask) -> TrialRecord:
    """Run one planned trial. Exceptions become a row with status 'error'."""
    row = dict(
        maze_w=task.maze_w,
        maze_h=task.maze_h,
        maze_seed=task.maze_seed,
        n=task.n,
        strategy=task.strategy.value,
        solver=task.solver.value,
        trial_seed=task.trial_seed,
    )
    try:
        maze = generate_grid_maze(task.maze_w, task.maze_h, task.maze_seed)
        result = run_trial(TrialConfig(
            n=task.n,
            strategy=task.strategy,
            solver=task.solver,
            seed=task.trial_seed,
            step_cap=task.step_cap,
            maze=maze,
        ))
    except Exception as e:
        logger.error("trial %s failed: %s", row, e)
        return TrialRecord(status=ERROR_STATUS, **row)

    metrics = compute_metrics(result)
    return TrialRecord(
        status=result.status.value,
        makespan=metrics.makespan if metrics else None,
        avg_fuel=metrics.avg_fuel if metrics else None,
        head_arrival=result.head_arrival_step,
        optimal_d=maze.optimal_distance,
        **row,
    )


def run_sweep(spec: SweepSpec, threads: Optional[int] = None) -> Iterator[Union[str, pd.DataFrame]]:
    spec.validate()
    tasks = plan_trials(spec)
    threads = threads or os.cpu_count() or 1
    yield f"🧭 Planned {len(tasks)} trials over {spec.cell_count} cells"

    records: List[TrialRecord] = []
    if threads == 1:
        results = map(run_task, tasks)
        for record in results:
            records.append(record)
            if len(records) % PROGRESS_EVERY == 0:
                yield f"Finished {len(records)}/{len(tasks)} trials..."
    else:
        chunksize = max(1, len(tasks) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as executor:
            # map() keeps submission order, so rows come back in cell order.
            for record in executor.map(run_task, tasks, chunksize=chunksize):
                records.append(record)
                if len(records) % PROGRESS_EVERY == 0:
                    yield f"Finished {len(records)}/{len(tasks)} trials..."

    failed = sum(1 for r in records if r.status == ERROR_STATUS)
    if failed:
        yield f"⚠️ {failed} trials raised errors"
    yield results_frame(records)
