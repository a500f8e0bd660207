"""
Command-line entry point: generate, run, batch, replay and validate.

    python cli.py run --maze data/mazes/star4.maze --n 2 --strategy mamt --solver dfs
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

from experiments.metrics import aggregate, compute_metrics, fuel_reduction, write_results
from experiments.plots import plot_sweep
from experiments.sweep import SweepSpec, parse_size, run_sweep
from simulation.baselines import StrategyKind
from simulation.engine import TrialConfig, run_trial
from simulation.maze import (
    MazeError,
    generate_geometric_maze,
    generate_grid_maze,
    load_maze,
    save_maze,
    serialize_maze,
    validate_maze,
)
from simulation.solvers import SolverKind, SolverStateError
from utils.commands_schema import COMMANDS_SCHEMA
from utils.config import ConfigError, configure_logging, get_settings, load_config_file
from utils.render import ascii_frame, frames_from_trace, svg_frame
from utils.trace_io import read_trace, write_trace

ARG_TYPES = {"string": str, "integer": int}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mamt", description="Multi-agent maze traversal simulator")
    parser.add_argument("--log-level", help="Logging level (default from MAMT_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS_SCHEMA:
        sub = subparsers.add_parser(command["name"], help=command["description"], description=command["description"])
        for arg in command["arguments"]:
            options = {"help": arg["help"]}
            if arg["type"] == "boolean":
                options["action"] = "store_true"
            else:
                options["type"] = ARG_TYPES[arg["type"]]
                for key in ("default", "choices", "required"):
                    if key in arg:
                        options[key] = arg[key]
            sub.add_argument(*arg["flags"], **options)
    return parser


def cli_generate(args) -> int:
    if (args.grid is None) == (args.geometric is None):
        raise ConfigError("choose exactly one of --grid WxH or --geometric N")
    if args.grid is not None:
        width, height = parse_size(args.grid)
        maze = generate_grid_maze(width, height, args.seed)
    else:
        maze = generate_geometric_maze(args.geometric, args.seed, parse_size(args.region))
    if args.out:
        save_maze(maze, args.out)
        print(f"✅ Wrote {args.out}: {maze.node_count} nodes, {maze.edge_count} edges")
    else:
        print(serialize_maze(maze), end="")
    return 0


def cli_run(args) -> int:
    if (args.maze is None) == (args.grid is None):
        raise ConfigError("choose exactly one of --maze FILE or --grid WxH")
    config = TrialConfig(
        n=args.n,
        strategy=StrategyKind.parse(args.strategy),
        solver=SolverKind.parse(args.solver),
        seed=args.seed,
        step_cap=args.step_cap if args.step_cap is not None else get_settings().step_cap,
        maze_file=args.maze,
        grid=parse_size(args.grid) if args.grid else None,
        maze_seed=args.maze_seed,
        trace=bool(args.trace),
        check_invariants=args.check,
    )
    config.validate()
    result = run_trial(config)

    if args.trace:
        header = {
            "n": config.n,
            "strategy": config.strategy.value,
            "solver": config.solver.value,
            "seed": config.seed,
            "step_cap": config.step_cap,
            "status": result.status.value,
        }
        write_trace(args.trace, config.resolve_maze(), header, result.trace)

    metrics = compute_metrics(result)
    if metrics is not None:
        print(f"✅ success makespan={metrics.makespan} avg_fuel={round(metrics.avg_fuel, 3)}")
    else:
        icon = "⚠️" if result.status.exit_code == 3 else "❌"
        detail = f" ({result.fault})" if result.fault else ""
        print(f"{icon} {result.status.value} makespan=- avg_fuel=-{detail}")
    for violation in result.violations:
        print(f"⚠️ invariant {violation.name} at agents {list(violation.agents)}: {violation.detail}")
    return result.status.exit_code


def cli_batch(args) -> int:
    values = load_config_file(args.config) if args.config else {}
    for key in ("maze_sizes", "n", "strategies", "solvers", "trials", "base_seed", "step_cap", "out", "plot"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    values.setdefault("step_cap", get_settings().step_cap)
    values.setdefault("out", str(Path(get_settings().output_dir) / "batch.csv"))
    spec = SweepSpec.from_mapping(values)
    threads = args.threads or get_settings().threads

    results = None
    for update in run_sweep(spec, threads=threads):
        if isinstance(update, str):
            print(update)
        else:
            results = update

    Path(spec.output).parent.mkdir(parents=True, exist_ok=True)
    write_results(results, spec.output)
    print(f"✅ Wrote {len(results)} rows to {spec.output}")
    if spec.plot_dir:
        summary = aggregate(results)
        for path in plot_sweep(summary, spec.plot_dir):
            print(f"✅ Wrote {path}")
        report = fuel_reduction(summary)
        if report["vs_single_agent"] is not None:
            print(f"🧭 Fuel reduction at n={report['largest_n']} vs n=1: {report['vs_single_agent']:.1%}")
    return 0


def cli_replay(args) -> int:
    trace = read_trace(args.trace)
    if trace.truncated:
        print(f"⚠️ {args.trace} is truncated; replaying the readable prefix")
    if trace.maze is None:
        raise ConfigError(f"{args.trace} has no header with the maze")
    frames = frames_from_trace(trace.records)
    if not frames:
        print("⚠️ No frames to replay")
        return 0
    if args.format == "ascii":
        for frame in frames:
            print(ascii_frame(trace.maze, frame))
            print()
    else:
        for frame in frames:
            svg_frame(trace.maze, frame, str(Path(args.out) / f"frame_{frame.tick:05d}.svg"))
    print(f"🧭 Replayed {len(frames)} frames")
    return 0


def cli_validate(args) -> int:
    maze = load_maze(args.maze)
    validate_maze(maze)
    print(f"✅ {args.maze} is valid: {maze.node_count} nodes, start {maze.start}, goal {maze.goal}")
    return 0


def get_command_function(command_name: str):
    """Get the handler for a subcommand name"""
    command_functions = {
        "generate": cli_generate,
        "run": cli_run,
        "batch": cli_batch,
        "replay": cli_replay,
        "validate": cli_validate,
    }
    return command_functions.get(command_name)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level)
        return get_command_function(args.command)(args)
    except (MazeError, SolverStateError, ConfigError, ValueError, OSError) as e:
        print(f"❌ {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
