from hypothesis import strategies as st

from simulation.maze import MazeGraph, generate_grid_maze


@st.composite
def grid_mazes(draw, max_side: int = 6) -> MazeGraph:
    width = draw(st.integers(min_value=1, max_value=max_side))
    height = draw(st.integers(min_value=2 if width == 1 else 1, max_value=max_side))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return generate_grid_maze(width, height, seed)


def path_maze(length: int) -> MazeGraph:
    """A corridor of `length` edges from start 0 to goal `length`."""
    return MazeGraph.from_edges(length + 1, [(i, i + 1) for i in range(length)], start=0, goal=length)
