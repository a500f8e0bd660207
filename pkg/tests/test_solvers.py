import json
from collections import Counter, deque

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from simulation.maze import MazeGraph
from simulation.solvers import (
    SolverKind,
    SolverState,
    SolverStateError,
    deserialize_solver_state,
    initial_state,
    run_solo,
    serialize_solver_state,
    solver_next,
)
from utils.rng import derive_seed, draw
from maze_strategies import grid_mazes, path_maze
from oracles import STAR4_SOLO_BFS, STAR4_SOLO_DFS


def _walk(maze, state, position, steps):
    trajectory = []
    for _ in range(steps):
        if position == maze.goal:
            break
        position, state = solver_next(state, position, maze.neighbors(position))
        trajectory.append(position)
    return trajectory, state, position



def _bfs_order(maze):
    order, seen, queue = [], {maze.start}, deque([maze.start])
    while queue:
        u = queue.popleft()
        order.append(u)
        if u == maze.goal:
            break
        for v in maze.neighbors(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return order


class TestKinds:
    @pytest.mark.parametrize("text,kind", [
        ("dfs", SolverKind.DFS),
        ("BFS", SolverKind.BFS),
        ("random", SolverKind.RANDOM_WALK),
        ("random-walk", SolverKind.RANDOM_WALK),
        ("random_walk", SolverKind.RANDOM_WALK),
    ])
    def test_parse(self, text, kind):
        assert SolverKind.parse(text) is kind

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            SolverKind.parse("astar")


class TestSolo:
    def test_dfs_star4(self, star4):
        assert run_solo(star4, SolverKind.DFS).trajectory == STAR4_SOLO_DFS

    def test_bfs_star4(self, star4):
        assert run_solo(star4, SolverKind.BFS).trajectory == STAR4_SOLO_BFS

    def test_dfs_corridor(self):
        run = run_solo(path_maze(3), SolverKind.DFS)
        assert run.trajectory == [0, 1, 2, 3]
        assert not run.timed_out

    @given(grid_mazes(max_side=7))
    @settings(max_examples=40, deadline=None)
    def test_dfs_bounded_by_euler_tour(self, maze):
        run = run_solo(maze, SolverKind.DFS)
        assert not run.timed_out
        assert run.trajectory[-1] == maze.goal
        assert len(run.trajectory) - 1 <= 2 * (maze.node_count - 1)

    @given(grid_mazes(max_side=6))
    @settings(max_examples=40, deadline=None)
    def test_bfs_reaches_goal_along_edges(self, maze):
        run = run_solo(maze, SolverKind.BFS)
        assert not run.timed_out
        assert run.trajectory[-1] == maze.goal
        assert all(maze.is_edge(u, v) for u, v in zip(run.trajectory, run.trajectory[1:]))

    @given(grid_mazes(max_side=6))
    @settings(max_examples=40, deadline=None)
    def test_bfs_first_visits_follow_queue_order(self, maze):
        run = run_solo(maze, SolverKind.BFS)
        assert list(dict.fromkeys(run.trajectory)) == _bfs_order(maze)

    def test_step_cap(self, path5):
        run = run_solo(path5, SolverKind.DFS, step_cap=2)
        assert run.timed_out
        assert run.trajectory == [0, 1, 2]


class TestRandomWalk:
    def test_same_seed_same_walk(self, path5):
        assert run_solo(path5, SolverKind.RANDOM_WALK, seed=4) == run_solo(path5, SolverKind.RANDOM_WALK, seed=4)

    def test_seeds_change_walk(self):
        maze = path_maze(6)
        walks = {tuple(run_solo(maze, SolverKind.RANDOM_WALK, seed=s).trajectory) for s in range(8)}
        assert len(walks) > 1

    def test_stream_per_agent(self):
        assert initial_state(SolverKind.RANDOM_WALK, seed=1, agent=3).stream == "solver/3"

    def test_draws_uniform(self):
        counts = [0] * 4
        for counter in range(4000):
            counts[draw(99, "solver/1", counter, 4)] += 1
        assert chisquare(counts).pvalue > 0.001

    def test_hub_exits_uniform(self):
        hub = MazeGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)], start=1, goal=2)
        state = initial_state(SolverKind.RANDOM_WALK, seed=2024)
        counts = Counter()
        for _ in range(10000):
            proposal, state = solver_next(state, 0, hub.neighbors(0))
            counts[proposal] += 1
        assert set(counts) == {1, 2, 3, 4}
        assert chisquare([counts[v] for v in (1, 2, 3, 4)]).pvalue > 0.01

    def test_draw_is_replayable(self):
        assert draw(7, "solver/2", 11, 5) == draw(7, "solver/2", 11, 5)

    def test_draw_rejects_empty_range(self):
        with pytest.raises(ValueError):
            draw(0, "x", 0, 0)

    def test_derive_seed_stable(self):
        assert derive_seed("a", 1) == derive_seed("a", 1)
        assert derive_seed("a", 1) != derive_seed("a", 2)
        assert 0 <= derive_seed("x") < 2**63


class TestBlocked:
    @pytest.mark.parametrize("kind", list(SolverKind))
    def test_all_blocked(self, star4, kind):
        state = initial_state(kind, seed=1)
        proposal, after = solver_next(state, 0, star4.neighbors(0), blocked=frozenset({1, 2}))
        assert proposal is None
        assert after == state

    def test_dfs_skips_blocked(self, star4):
        proposal, after = solver_next(initial_state(SolverKind.DFS), 0, (1, 2), blocked=frozenset({1}))
        assert proposal == 2
        assert after.came_from == 0 and after.at == 2


class TestTransfer:
    @pytest.mark.parametrize("kind", list(SolverKind))
    @given(maze=grid_mazes(max_side=6), split=st.integers(0, 30))
    @settings(max_examples=25, deadline=None)
    def test_handover_continues_walk(self, kind, maze, split):
        solo = run_solo(maze, kind, seed=5)
        first, state, position = _walk(maze, initial_state(kind, seed=5), maze.start, split)
        handed = deserialize_solver_state(serialize_solver_state(state))
        rest, _, _ = _walk(maze, handed, position, len(solo.trajectory) - 1 - len(first))
        assert [maze.start] + first + rest == solo.trajectory

    def test_dfs_payload_is_small(self):
        payload = serialize_solver_state(SolverState(SolverKind.DFS, came_from=12, at=13))
        assert json.loads(payload) == {"kind": "dfs", "came_from": 12, "at": 13}

    @pytest.mark.parametrize("payload", [
        "not json",
        "[1, 2]",
        '{"kind": "astar"}',
        '{"kind": "dfs", "came_from": "x"}',
        '{"kind": "bfs", "came_from": 0, "queue": [], "parents": [[1]], "visited": [], "route": []}',
        '{"kind": "bfs", "came_from": 0, "queue": "1", "parents": [], "visited": [], "route": []}',
        '{"kind": "random_walk", "seed": 1, "stream": "s", "counter": -1}',
    ])
    def test_malformed(self, payload):
        with pytest.raises(SolverStateError):
            deserialize_solver_state(payload)
