import pytest

from simulation.maze import MazeGraph


@pytest.fixture
def star4():
    """s=0 with a dead end d=1 and a corridor c=2 leading to g=3."""
    return MazeGraph.from_edges(4, [(0, 1), (0, 2), (2, 3)], start=0, goal=3)


@pytest.fixture
def path4():
    return MazeGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)], start=0, goal=3)


@pytest.fixture
def path5():
    return MazeGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], start=0, goal=4)
