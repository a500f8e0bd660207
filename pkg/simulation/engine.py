"""
Lockstep trial execution.

Every step runs four phases against consistent snapshots: all active agents
decide from the end-of-previous-step state, the moves are validated and
applied together, messages are exchanged from the new positions, and leader
pointers are healed and head transfers accepted. Rule violations end the
trial with a fault status; they are results, not exceptions.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from simulation.baselines import StrategyKind
from simulation.events import TraceRecord
from simulation.maze import MazeGraph, generate_grid_maze, load_maze
from simulation.protocol import AgentState
from simulation.solvers import SolverKind
from simulation.strategies import Strategy, create_strategy
from simulation.world import WorldState
from utils.config import DEFAULT_STEP_CAP, ConfigError

logger = logging.getLogger(__name__)

DecisionHook = Callable[[WorldState, Dict[int, int]], Dict[int, int]]
EvaluationOrder = Callable[[List[int]], Sequence[int]]


class TrialStatus(str, Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout"
    COLLISION_FAULT = "collision_fault"
    WALL_FAULT = "wall_fault"

    @property
    def exit_code(self) -> int:
        if self is TrialStatus.SUCCESS:
            return 0
        if self is TrialStatus.TIMEOUT:
            return 3
        return 2


@dataclass(frozen=True)
class TrialConfig:
    n: int
    strategy: StrategyKind = StrategyKind.MAMT
    solver: SolverKind = SolverKind.DFS
    seed: int = 0
    step_cap: int = DEFAULT_STEP_CAP
    maze: Optional[MazeGraph] = None
    maze_file: Optional[str] = None
    grid: Optional[Tuple[int, int]] = None
    maze_seed: int = 0
    trace: bool = False
    check_invariants: bool = False

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"agent count must be >= 1, got {self.n!r}")
        if not isinstance(self.step_cap, int) or self.step_cap < 1:
            raise ConfigError(f"step cap must be >= 1, got {self.step_cap!r}")
        sources = sum(x is not None for x in (self.maze, self.maze_file, self.grid))
        if sources != 1:
            raise ConfigError("exactly one maze source is required: an inline maze, a maze file or a grid size")

    def resolve_maze(self) -> MazeGraph:
        if self.maze is not None:
            return self.maze
        if self.maze_file is not None:
            return load_maze(self.maze_file)
        width, height = self.grid
        return generate_grid_maze(width, height, self.maze_seed)


@dataclass(frozen=True)
class Violation:
    name: str
    detail: str
    agents: Tuple[int, ...] = ()
    nodes: Tuple[int, ...] = ()


@dataclass
class TrialResult:
    status: TrialStatus
    makespan: Optional[int]
    per_agent_fuel: List[int]
    head_arrival_step: Optional[int]
    trace: Optional[List[TraceRecord]] = None
    violations: List[Violation] = field(default_factory=list)
    fault: Optional[str] = None


@dataclass(frozen=True)
class StepOutcome:
    world: WorldState
    moves: Dict[int, int]
    records: List[TraceRecord]
    fault: Optional[TrialStatus] = None
    fault_detail: Optional[str] = None


def validate_moves(world: WorldState, moves: Mapping[int, int]) -> Optional[Tuple[TrialStatus, str]]:
    """
    Check a step's moves against the snapshot. Returns the fault status and a
    description, or None when the moves are legal.
    """
    maze = world.maze
    movers = {a: t for a, t in moves.items() if t != world.positions[a]}
    for a, target in sorted(movers.items()):
        origin = world.positions[a]
        if origin == maze.goal:
            return TrialStatus.WALL_FAULT, f"agent {a} tried to leave the goal"
        if not isinstance(target, int) or not 0 <= target < maze.node_count or not maze.is_edge(origin, target):
            return TrialStatus.WALL_FAULT, f"agent {a} moved through a wall from {origin} to {target}"
    for a, target in sorted(movers.items()):
        if world.occupied(target):
            return TrialStatus.COLLISION_FAULT, f"agent {a} moved onto occupied node {target}"
    edges = Counter(frozenset((world.positions[a], t)) for a, t in movers.items())
    for edge, uses in edges.items():
        if uses > 1:
            return TrialStatus.COLLISION_FAULT, f"edge {tuple(sorted(edge))} traversed {uses} times"
    after = Counter(moves.get(a, v) for a, v in world.positions.items())
    for node, count in after.items():
        if count > 1 and node not in (maze.start, maze.goal):
            return TrialStatus.COLLISION_FAULT, f"{count} agents on interior node {node}"
    return None


def step(
    world: WorldState,
    strategy: Strategy,
    order: Optional[Sequence[int]] = None,
    decision_hook: Optional[DecisionHook] = None,
) -> StepOutcome:
    active = world.active_agents
    if order is None:
        order = active
    tick = world.tick + 1

    targets = strategy.decide(world, order)
    if decision_hook is not None:
        targets = decision_hook(world, dict(targets))
    records = [
        TraceRecord(tick, "decide", a, world.positions[a], strategy.leader_of(a), targets.get(a, world.positions[a]))
        for a in active
    ]

    fault = validate_moves(world, targets)
    if fault is not None:
        status, detail = fault
        logger.info("tick %s: %s (%s)", tick, status.value, detail)
        records.append(TraceRecord(tick, "fault", event=f"{status.value}: {detail}"))
        return StepOutcome(world, {}, records, status, detail)

    moves = {a: t for a, t in targets.items() if t != world.positions[a]}
    next_world = world.moved(moves)
    for a, node in sorted(moves.items()):
        records.append(TraceRecord(tick, "move", a, node, strategy.leader_of(a), node))
    records.extend(strategy.after_move(next_world, moves, order))
    for a, node in sorted(moves.items()):
        if node == world.maze.goal:
            records.append(TraceRecord(tick, "arrive", a, node, strategy.leader_of(a), node))
    return StepOutcome(next_world, moves, records)


def run_trial(
    config: TrialConfig,
    evaluation_order: Optional[EvaluationOrder] = None,
    decision_hook: Optional[DecisionHook] = None,
) -> TrialResult:
    """
    Run one trial to success, fault or the step cap. Identical configs give
    identical results, trace included.
    """
    config.validate()
    maze = config.resolve_maze()
    world = WorldState.initial(maze, config.n, config.seed)
    strategy = create_strategy(config.strategy, maze, config.n, config.solver, config.seed)
    records = strategy.start(world)
    trace = list(records) if config.trace else None

    fuel = {a: 0 for a in world.agents}
    head_arrival = None
    violations: List[Violation] = []
    fault_detail = None
    if config.check_invariants:
        violations.extend(check_invariants(world, strategy.agent_states()))

    while True:
        if world.all_at_goal:
            status = TrialStatus.SUCCESS
            break
        if world.tick >= config.step_cap:
            status = TrialStatus.TIMEOUT
            break
        order = world.active_agents
        if evaluation_order is not None:
            order = list(evaluation_order(order))
        outcome = step(world, strategy, order, decision_hook)
        if trace is not None:
            trace.extend(outcome.records)
        if outcome.fault is not None:
            status, fault_detail = outcome.fault, outcome.fault_detail
            break
        for a in outcome.moves:
            fuel[a] += 1
        world = outcome.world
        if head_arrival is None and strategy.head_reached(world):
            head_arrival = world.tick
        if config.check_invariants:
            violations.extend(check_invariants(world, strategy.agent_states()))

    logger.debug("trial %s/%s n=%s seed=%s: %s at tick %s",
                 config.strategy, config.solver, config.n, config.seed, status.value, world.tick)
    return TrialResult(
        status=status,
        makespan=world.tick if status is TrialStatus.SUCCESS else None,
        per_agent_fuel=[fuel[a] for a in sorted(fuel)],
        head_arrival_step=head_arrival,
        trace=trace,
        violations=violations,
        fault=fault_detail,
    )


def check_invariants(world: WorldState, agents: Optional[Mapping[int, AgentState]] = None) -> List[Violation]:
    """Per-step safety and protocol checks. An empty list means the step conforms."""
    maze = world.maze
    violations = []
    for node, occupants in sorted(world.occupants.items()):
        if len(occupants) > 1 and node not in (maze.start, maze.goal):
            violations.append(Violation("node_exclusivity", f"{len(occupants)} agents on node {node}", occupants, (node,)))

    if agents is not None:
        violations.extend(_head_violations(world, agents))
        violations.extend(_leader_cycle_violations(world, agents))

    # Comm links join whole nodes, so connectivity is checked over occupied nodes.
    nodes = sorted(world.occupants)
    if nodes:
        seen = {nodes[0]}
        queue = deque([nodes[0]])
        while queue:
            v = queue.popleft()
            for _, x in world.routes(v):
                if x not in seen:
                    seen.add(x)
                    queue.append(x)
        if len(seen) != len(nodes):
            cut = tuple(a for u in nodes if u not in seen for a in world.occupants[u])
            violations.append(Violation("connectivity", "communication graph is disconnected", cut,
                                        tuple(u for u in nodes if u not in seen)))
    return violations


def _head_violations(world, agents):
    goal = world.maze.goal
    active_heads = tuple(a for a, s in sorted(agents.items()) if s.is_head and world.positions[a] != goal)
    finished = any(s.is_head and world.positions[a] == goal for a, s in agents.items())
    if world.all_at_goal:
        return []
    expected = 0 if finished else 1
    if len(active_heads) != expected:
        return [Violation("head_uniqueness", f"{len(active_heads)} active heads, expected {expected}", active_heads)]
    return []


def _leader_cycle_violations(world, agents):
    goal = world.maze.goal
    n = len(agents)
    violations = []
    for a in world.active_agents:
        current, hops, visited = a, 0, {a}
        while agents[current].leader is not None and world.positions[current] != goal:
            current = agents[current].leader
            hops += 1
            if current not in agents:
                violations.append(Violation("leader_acyclicity", f"agent {a} points at unknown agent {current}", (a,)))
                break
            if current in visited or hops > n:
                violations.append(Violation("leader_acyclicity", f"leader chain from agent {a} loops", tuple(sorted(visited))))
                break
            visited.add(current)
    return violations
