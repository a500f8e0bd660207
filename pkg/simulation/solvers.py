"""
Single-agent maze solvers with serializable continuation state.

A solver sees only the node it stands on, that node's ordered neighbours and
its own state; it never sees other agents. Its state is a value, so the head
role can hand the solver to another agent mid-traversal and the traversal
continues exactly as if one agent had walked it.
"""
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

from simulation.maze import MazeGraph
from utils.config import DEFAULT_STEP_CAP
from utils.rng import draw


class SolverKind(str, Enum):
    DFS = "dfs"
    BFS = "bfs"
    RANDOM_WALK = "random_walk"

    @classmethod
    def parse(cls, text: str) -> "SolverKind":
        aliases = {"random": cls.RANDOM_WALK, "random-walk": cls.RANDOM_WALK, "randomwalk": cls.RANDOM_WALK}
        key = str(text).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown solver {text!r}; choose dfs, bfs or random") from None


class SolverStateError(ValueError):
    """A serialized solver state is malformed."""


@dataclass(frozen=True)
class SolverState:
    kind: SolverKind
    came_from: Optional[int] = None
    # node the continuation expects to stand on
    at: Optional[int] = None
    # bfs bookkeeping
    queue: Tuple[int, ...] = ()
    parents: Dict[int, int] = field(default_factory=dict)
    visited: FrozenSet[int] = frozenset()
    route: Tuple[int, ...] = ()
    # random walk stream
    seed: int = 0
    stream: str = ""
    counter: int = 0


class SoloRun(NamedTuple):
    trajectory: List[int]
    timed_out: bool


def initial_state(kind: SolverKind, seed: int = 0, agent: int = 1) -> SolverState:
    """Fresh solver state for an agent standing on the start node."""
    kind = SolverKind(kind)
    if kind is SolverKind.RANDOM_WALK:
        return SolverState(kind=kind, seed=seed, stream=f"solver/{agent}")
    return SolverState(kind=kind)


def solver_next(
    state: SolverState,
    current: int,
    neighbors: Sequence[int],
    blocked: FrozenSet[int] = frozenset(),
) -> Tuple[Optional[int], SolverState]:
    """
    Propose the next node and the continuation state after moving there.

    `blocked` masks neighbours the caller cannot enter this step. When every
    admissible move is masked the result is (None, state) with the state
    unchanged.
    """
    if not neighbors:
        return None, state
    if state.kind is SolverKind.DFS:
        return _dfs_next(state, current, neighbors, blocked)
    if state.kind is SolverKind.BFS:
        return _bfs_next(state, current, neighbors, blocked)
    return _random_next(state, current, neighbors, blocked)


def _dfs_next(state, current, neighbors, blocked):
    # Euler tour: leave by the edge after the arrival edge in cyclic order.
    if state.came_from is None or state.came_from not in neighbors:
        order = list(neighbors)
    else:
        index = list(neighbors).index(state.came_from)
        order = list(neighbors[index + 1:]) + list(neighbors[: index + 1])
    for candidate in order:
        if candidate not in blocked:
            return candidate, replace(state, came_from=current, at=candidate)
    return None, state


def _path_to_root(parents: Dict[int, int], node: int) -> List[int]:
    path = [node]
    while path[-1] in parents:
        path.append(parents[path[-1]])
    return path


def _discovered_path(parents: Dict[int, int], source: int, target: int) -> List[int]:
    up_source = _path_to_root(parents, source)
    up_target = _path_to_root(parents, target)
    on_source = {node: i for i, node in enumerate(up_source)}
    for j, node in enumerate(up_target):
        if node in on_source:
            return up_source[: on_source[node] + 1] + list(reversed(up_target[:j]))
    raise SolverStateError(f"nodes {source} and {target} are not joined by discovered edges")


def _bfs_next(state, current, neighbors, blocked):
    visited, parents, queue = state.visited, state.parents, state.queue
    if current not in visited:
        visited = visited | {current}
        fresh = [v for v in neighbors if v not in parents and v not in visited]
        if fresh:
            parents = dict(parents)
            for v in fresh:
                parents[v] = current
            queue = queue + tuple(fresh)

    route = state.route
    if not route:
        while queue and queue[0] in visited:
            queue = queue[1:]
        if not queue:
            return None, state
        target, queue = queue[0], queue[1:]
        route = tuple(_discovered_path(parents, current, target)[1:])

    step = route[0]
    if step in blocked:
        return None, state
    return step, replace(
        state, came_from=current, at=step, visited=visited, parents=parents, queue=queue, route=route[1:]
    )


def _random_next(state, current, neighbors, blocked):
    options = [v for v in neighbors if v not in blocked]
    if not options:
        return None, state
    index = draw(state.seed, state.stream, state.counter, len(options))
    return options[index], replace(state, came_from=current, at=options[index], counter=state.counter + 1)


def run_solo(
    maze: MazeGraph, kind: SolverKind, seed: int = 0, step_cap: int = DEFAULT_STEP_CAP
) -> SoloRun:
    """Walk one agent from start to goal. `timed_out` marks a truncated walk."""
    state = initial_state(kind, seed)
    position = maze.start
    trajectory = [position]
    while position != maze.goal:
        if len(trajectory) - 1 >= step_cap:
            return SoloRun(trajectory, True)
        position, state = solver_next(state, position, maze.neighbors(position))
        if position is None:
            return SoloRun(trajectory, True)
        trajectory.append(position)
    return SoloRun(trajectory, False)


def serialize_solver_state(state: SolverState) -> str:
    doc = {"kind": state.kind.value, "came_from": state.came_from, "at": state.at}
    if state.kind is SolverKind.BFS:
        doc["queue"] = list(state.queue)
        doc["parents"] = [[child, parent] for child, parent in state.parents.items()]
        doc["visited"] = sorted(state.visited)
        doc["route"] = list(state.route)
    elif state.kind is SolverKind.RANDOM_WALK:
        doc["seed"] = state.seed
        doc["stream"] = state.stream
        doc["counter"] = state.counter
    return json.dumps(doc, separators=(",", ":"))


def _node_list(doc: dict, key: str) -> List[int]:
    value = doc.get(key)
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise SolverStateError(f"solver payload field '{key}' must be a list of node ids")
    return value


def deserialize_solver_state(payload: str) -> SolverState:
    try:
        doc = json.loads(payload)
    except (TypeError, json.JSONDecodeError) as e:
        raise SolverStateError(f"solver payload is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise SolverStateError("solver payload must be a JSON object")
    try:
        kind = SolverKind(doc.get("kind"))
    except ValueError:
        raise SolverStateError(f"unknown solver kind {doc.get('kind')!r}") from None
    came_from, at = doc.get("came_from"), doc.get("at")
    for key, value in (("came_from", came_from), ("at", at)):
        if value is not None and (not isinstance(value, int) or isinstance(value, bool)):
            raise SolverStateError(f"solver payload field '{key}' must be a node id or null")

    if kind is SolverKind.DFS:
        return SolverState(kind=kind, came_from=came_from, at=at)
    if kind is SolverKind.BFS:
        pairs = doc.get("parents")
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p) for p in pairs
        ):
            raise SolverStateError("solver payload field 'parents' must be a list of [child, parent] pairs")
        return SolverState(
            kind=kind,
            came_from=came_from,
            at=at,
            queue=tuple(_node_list(doc, "queue")),
            parents={child: parent for child, parent in pairs},
            visited=frozenset(_node_list(doc, "visited")),
            route=tuple(_node_list(doc, "route")),
        )
    seed, stream, counter = doc.get("seed"), doc.get("stream"), doc.get("counter")
    if not isinstance(seed, int) or not isinstance(stream, str) or not isinstance(counter, int) or counter < 0:
        raise SolverStateError("random walk payload needs integer 'seed', string 'stream', integer 'counter' >= 0")
    return SolverState(kind=kind, came_from=came_from, at=at, seed=seed, stream=stream, counter=counter)
