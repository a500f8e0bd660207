import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from simulation.maze import (
    COMPASS,
    LocationClass,
    MazeError,
    MazeFormatError,
    MazeGraph,
    generate_geometric_maze,
    generate_grid_maze,
    parse_maze,
    render_ascii,
    serialize_maze,
    tree_path,
    validate_maze,
)
from maze_strategies import grid_mazes


def _is_spanning_tree(nodes, edges):
    root = list(range(nodes))

    def find(u):
        while root[u] != u:
            u = root[u]
        return u

    for u, v in edges:
        a, b = find(u), find(v)
        if a == b:
            return False
        root[a] = b
    return True


class TestGridGeneration:
    @given(grid_mazes(max_side=8))
    @settings(max_examples=60, deadline=None)
    def test_spanning_tree(self, maze):
        assert maze.edge_count == maze.node_count - 1
        validate_maze(maze)
        assert maze.start != maze.goal

    @given(grid_mazes(max_side=8))
    @settings(max_examples=40, deadline=None)
    def test_neighbours_in_compass_order(self, maze):
        for u in range(maze.node_count):
            col, row = maze.cell(u)
            directions = [COMPASS.index((maze.cell(v)[0] - col, maze.cell(v)[1] - row)) for v in maze.neighbors(u)]
            assert directions == sorted(directions)

    def test_same_seed_same_maze(self):
        assert generate_grid_maze(7, 5, 11) == generate_grid_maze(7, 5, 11)

    def test_seeds_differ(self):
        mazes = {tuple(generate_grid_maze(6, 6, seed).edges()) for seed in range(10)}
        assert len(mazes) > 1

    def test_two_cells(self):
        maze = generate_grid_maze(2, 1, 0)
        assert maze.edges() == [(0, 1)]
        assert {maze.start, maze.goal} == {0, 1}

    def test_thousand_generated_mazes_validate(self):
        for index in range(1000):
            width, height = 1 + index % 9, 2 + (index // 9) % 8
            maze = generate_grid_maze(width, height, seed=index)
            validate_maze(maze)
            assert maze.edge_count == width * height - 1

    def test_single_cell_rejected(self):
        with pytest.raises(MazeError):
            generate_grid_maze(1, 1, 0)


class TestGeometricGeneration:
    def test_counts(self):
        maze = generate_geometric_maze(12, seed=3)
        assert maze.node_count == 12
        assert maze.edge_count == 11
        validate_maze(maze)

    def test_separation_and_corners(self):
        maze = generate_geometric_maze(30, seed=8, region=(50.0, 40.0))
        separation = 0.05 * math.hypot(50.0, 40.0)
        points = maze.layout
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                assert math.dist(points[i], points[j]) >= separation
        assert maze.start == min(range(30), key=lambda i: math.dist(points[i], (0.0, 0.0)))
        assert maze.goal != maze.start
        assert maze.goal == min(
            (i for i in range(30) if i != maze.start), key=lambda i: math.dist(points[i], (50.0, 40.0))
        )

    def test_neighbours_in_angle_order(self):
        for seed in range(5):
            maze = generate_geometric_maze(25, seed=seed)
            for u in range(maze.node_count):
                xu, yu = maze.layout[u]
                angles = [
                    math.atan2(maze.layout[v][1] - yu, maze.layout[v][0] - xu) % (2 * math.pi)
                    for v in maze.neighbors(u)
                ]
                assert angles == sorted(angles)

    @pytest.mark.parametrize("nodes", [3, 4, 5, 6, 7])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_tree_is_minimum(self, nodes, seed):
        maze = generate_geometric_maze(nodes, seed=seed, region=(50.0, 40.0))
        points = maze.layout

        def weight(edges):
            return sum(math.dist(points[u], points[v]) for u, v in edges)

        pairs = list(itertools.combinations(range(nodes), 2))
        best = min(
            weight(edges) for edges in itertools.combinations(pairs, nodes - 1) if _is_spanning_tree(nodes, edges)
        )
        assert weight(maze.edges()) == pytest.approx(best)

    def test_region_too_small(self):
        with pytest.raises(MazeError):
            generate_geometric_maze(1000, seed=0, region=(1.0, 1.0))

    def test_deterministic(self):
        assert generate_geometric_maze(20, seed=5) == generate_geometric_maze(20, seed=5)


class TestQueries:
    def test_tree_path(self, star4):
        assert tree_path(star4, 0, 3) == [0, 2, 3]
        assert tree_path(star4, 1, 3) == [1, 0, 2, 3]
        assert tree_path(star4, 2, 2) == [2]

    def test_next_hop_and_distance(self, star4):
        assert star4.next_hop(1, 3) == 0
        assert star4.next_hop(3, 3) == 3
        assert star4.distance(1, 3) == 3
        assert star4.optimal_distance == 2

    @given(grid_mazes(max_side=6), st.data())
    @settings(max_examples=40, deadline=None)
    def test_path_is_simple_and_connected(self, maze, data):
        a = data.draw(st.integers(0, maze.node_count - 1))
        b = data.draw(st.integers(0, maze.node_count - 1))
        path = tree_path(maze, a, b)
        assert path[0] == a and path[-1] == b
        assert len(set(path)) == len(path)
        assert all(maze.is_edge(u, v) for u, v in zip(path, path[1:]))
        assert tree_path(maze, b, a) == list(reversed(path))

    @given(grid_mazes(max_side=6), st.data())
    @settings(max_examples=40, deadline=None)
    def test_path_splits_at_nodes_on_it(self, maze, data):
        a = data.draw(st.integers(0, maze.node_count - 1))
        c = data.draw(st.integers(0, maze.node_count - 1))
        path = tree_path(maze, a, c)
        b = data.draw(st.sampled_from(path))
        assert tree_path(maze, a, b) + tree_path(maze, b, c)[1:] == path
        other = data.draw(st.integers(0, maze.node_count - 1))
        joined = tree_path(maze, a, other) + tree_path(maze, other, c)[1:]
        assert (joined == path) == (other in path)

    def test_location_class(self, star4):
        assert star4.location_class(0) is LocationClass.AT_START
        assert star4.location_class(3) is LocationClass.AT_GOAL
        assert star4.location_class(1) is LocationClass.INTERIOR

    def test_neighbours_ascending_without_layout(self, star4):
        assert star4.neighbors(0) == (1, 2)
        assert star4.neighbors(2) == (0, 3)


class TestValidation:
    def test_cycle_rejected(self):
        with pytest.raises(MazeError) as e:
            MazeGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)], 0, 2)
        assert e.value.field == "edges"

    def test_disconnected_rejected(self):
        with pytest.raises(MazeError):
            MazeGraph.from_edges(4, [(0, 1), (2, 3)], 0, 3)

    def test_start_equals_goal(self):
        with pytest.raises(MazeError) as e:
            MazeGraph.from_edges(2, [(0, 1)], 1, 1)
        assert e.value.field == "goal"

    def test_self_loop(self):
        with pytest.raises(MazeError):
            MazeGraph.from_edges(2, [(1, 1)], 0, 1)


class TestFileFormat:
    def test_grid_maze_survives_file(self):
        maze = generate_grid_maze(5, 4, 2)
        assert parse_maze(serialize_maze(maze)) == maze

    def test_geometric_maze_survives_file(self):
        maze = generate_geometric_maze(15, seed=4)
        again = parse_maze(serialize_maze(maze))
        assert again == maze
        assert again.layout == maze.layout
        assert again.adjacency == maze.adjacency

    def test_one_edge_per_line(self, star4):
        text = serialize_maze(star4)
        assert "    [0, 2]," in text.splitlines()

    def test_missing_field(self):
        with pytest.raises(MazeFormatError) as e:
            parse_maze('{"version": 1, "nodes": 2, "goal": 1, "edges": [[0, 1]]}')
        assert e.value.field == "start"

    def test_bad_json_reports_line(self):
        text = '{\n  "version": 1,\n  "nodes": 2\n  "start": 0\n}'
        with pytest.raises(MazeFormatError) as e:
            parse_maze(text)
        assert e.value.line == 4

    def test_cycle_reports_edges_line(self):
        text = "\n".join([
            "{",
            '  "version": 1,',
            '  "nodes": 3,',
            '  "start": 0,',
            '  "goal": 2,',
            '  "edges": [[0, 1], [1, 2], [2, 0]]',
            "}",
        ])
        with pytest.raises(MazeFormatError) as e:
            parse_maze(text)
        assert e.value.field == "edges"
        assert e.value.line == 6
        assert "line 6" in str(e.value)

    def test_grid_size_checked_first(self):
        text = '{"version": 1, "nodes": 20000000, "start": 0, "goal": 1, "grid": [1, 2], "edges": []}'
        with pytest.raises(MazeFormatError) as e:
            parse_maze(text)
        assert e.value.field == "grid"

    def test_coords_count_checked_first(self):
        text = '{"version": 1, "nodes": 3, "start": 0, "goal": 1, "coords": [[0, 0]], "edges": [[0, 1]]}'
        with pytest.raises(MazeFormatError) as e:
            parse_maze(text)
        assert e.value.field == "coords"

    def test_wrong_version(self):
        with pytest.raises(MazeFormatError) as e:
            parse_maze('{"version": 2, "nodes": 2, "start": 0, "goal": 1, "edges": [[0, 1]]}')
        assert e.value.field == "version"


class TestAscii:
    def test_two_cells(self):
        maze = MazeGraph.from_edges(2, [(0, 1)], 0, 1, grid=(2, 1))
        assert render_ascii(maze) == "#####\n#S G#\n#####"

    def test_walls_between_unjoined_cells(self):
        maze = MazeGraph.from_edges(4, [(0, 1), (1, 3), (3, 2)], 0, 2, grid=(2, 2))
        assert render_ascii(maze) == "#####\n#S  #\n### #\n#G  #\n#####"

    def test_marks_override(self):
        maze = MazeGraph.from_edges(2, [(0, 1)], 0, 1, grid=(2, 1))
        assert render_ascii(maze, {0: "H"}) == "#####\n#H G#\n#####"

    def test_needs_grid(self, star4):
        with pytest.raises(MazeError):
            render_ascii(star4)
