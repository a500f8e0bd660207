"""
Comparison strategies: naive independent solving, sequential exploration
over a shared blackboard, and shortest-path streaming with a full map.
"""
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import AbstractSet, FrozenSet, Optional, Tuple

from simulation.maze import MazeGraph
from simulation.solvers import SolverState, solver_next
from simulation.world import LocalView, WorldState


class StrategyKind(str, Enum):
    MAMT = "mamt"
    NAIVE = "naive"
    GLOBAL_COMM = "global_comm"
    FULL_KNOWLEDGE = "full_knowledge"

    @classmethod
    def parse(cls, text: str) -> "StrategyKind":
        aliases = {
            "global": cls.GLOBAL_COMM,
            "global-comm": cls.GLOBAL_COMM,
            "fullknowledge": cls.FULL_KNOWLEDGE,
            "full-knowledge": cls.FULL_KNOWLEDGE,
        }
        key = str(text).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown strategy {text!r}; choose mamt, naive, global or fullknowledge") from None


@dataclass(frozen=True)
class NaiveAgent:
    id: int
    position: int
    solver: SolverState


def naive_decide(
    agent: NaiveAgent, view: LocalView, claimed: AbstractSet[int] = frozenset()
) -> Tuple[int, NaiveAgent]:
    """
    Run the agent's own solver with occupied neighbours and nodes already
    claimed by higher-ID agents treated as walls. Returns the target (the
    current node when everything is masked) and the agent's next state.
    """
    blocked = frozenset(view.occupied | (set(view.neighbors) & set(claimed)))
    target, solver = solver_next(agent.solver, agent.position, view.neighbors, blocked=blocked)
    if target is None:
        return agent.position, agent
    return target, replace(agent, solver=solver)


@dataclass(frozen=True)
class GlobalBlackboard:
    visited: FrozenSet[int]
    goal_found: Optional[int] = None

    @classmethod
    def fresh(cls, maze: MazeGraph) -> "GlobalBlackboard":
        return cls(visited=frozenset({maze.start}))


def _nearest_frontier_step(maze: MazeGraph, visited: AbstractSet[int], position: int) -> Optional[int]:
    for v in maze.neighbors(position):
        if v not in visited:
            return v
    parents = {position: None}
    queue = deque([position])
    while queue:
        u = queue.popleft()
        if u != position and any(w not in visited for w in maze.neighbors(u)):
            while parents[u] != position:
                u = parents[u]
            return u
        for w in maze.neighbors(u):
            if w in visited and w not in parents:
                parents[w] = u
                queue.append(w)
    return None


def global_comm_step(
    world: WorldState, blackboard: GlobalBlackboard, whose_turn: int
) -> Tuple[int, GlobalBlackboard]:
    """
    Move the one agent whose turn it is. Before the goal is known it prefers
    unexplored neighbours and otherwise heads for the nearest frontier; after
    that it walks the unique path to the goal. A blocked agent forfeits.
    """
    maze = world.maze
    position = world.positions[whose_turn]
    if blackboard.goal_found is None:
        target = _nearest_frontier_step(maze, blackboard.visited, position)
    else:
        target = maze.next_hop(position, blackboard.goal_found)
    if target is None or target == position or world.occupied(target):
        return position, blackboard
    goal_found = blackboard.goal_found
    if goal_found is None and target == maze.goal:
        goal_found = target
    return target, GlobalBlackboard(visited=blackboard.visited | {target}, goal_found=goal_found)


def full_knowledge_decide(agent: int, world: WorldState, claimed_at_start: AbstractSet[int] = frozenset()) -> int:
    """
    Step along the unique path to the goal if the next node is free in the
    snapshot and no lower-ID agent on the start node is heading there too.
    """
    maze = world.maze
    position = world.positions[agent]
    target = maze.next_hop(position, maze.goal)
    if world.occupied(target):
        return position
    if position == maze.start and target in claimed_at_start:
        return position
    return target
