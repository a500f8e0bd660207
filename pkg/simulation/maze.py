"""
Tree mazes: representation, grid and geometric generators, unique-path
queries and the maze file format.

Node ids are dense integers. Grid node ids are `row * width + column`. Every
maze carries a fixed total order on each node's neighbours; all agents and
solvers see the same order.
"""
import json
import logging
import math
import random
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MIN_SEPARATION_FRACTION = 0.05
MAX_PLACEMENT_RETRIES = 10_000
DEFAULT_REGION = (100.0, 100.0)

# (dcol, drow) in compass order North, East, South, West; rows grow southwards.
COMPASS = ((0, -1), (1, 0), (0, 1), (-1, 0))

Layout = Tuple[Tuple[float, float], ...]


class MazeError(ValueError):
    """A maze violates a structural invariant or a generator precondition."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field


class MazeFormatError(MazeError):
    """A maze file could not be parsed. Carries the line and field at fault."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        super().__init__(message, field)
        self.line = line

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.field is not None:
            where.append(f"field '{self.field}'")
        prefix = ", ".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class LocationClass(str, Enum):
    AT_START = "at_start"
    AT_GOAL = "at_goal"
    INTERIOR = "interior"


@dataclass(frozen=True)
class MazeGraph:
    node_count: int
    adjacency: Tuple[Tuple[int, ...], ...]
    start: int
    goal: int
    layout: Optional[Layout] = None
    grid: Optional[Tuple[int, int]] = None
    _towards: Dict[int, Tuple[Optional[int], ...]] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[Tuple[int, int]],
        start: int,
        goal: int,
        layout: Optional[Sequence[Sequence[float]]] = None,
        grid: Optional[Tuple[int, int]] = None,
    ) -> "MazeGraph":
        """
        Build a maze from an undirected edge list, validating every invariant
        and deriving the neighbour order (compass order for grids, angle order
        for layouts, ascending id otherwise).
        """
        edges = [(int(u), int(v)) for u, v in edges]
        _validate_structure(node_count, edges, start, goal, layout, grid)
        if grid is not None and layout is None:
            width = grid[0]
            layout = [(float(u % width), float(u // width)) for u in range(node_count)]

        neighbors: List[List[int]] = [[] for _ in range(node_count)]
        for u, v in edges:
            neighbors[u].append(v)
            neighbors[v].append(u)

        frozen_layout = None
        if layout is not None:
            frozen_layout = tuple((float(x), float(y)) for x, y in layout)
        adjacency = tuple(
            tuple(_ordered(u, nbrs, frozen_layout, grid)) for u, nbrs in enumerate(neighbors)
        )
        return cls(
            node_count=node_count,
            adjacency=adjacency,
            start=start,
            goal=goal,
            layout=frozen_layout,
            grid=tuple(grid) if grid is not None else None,
        )

    def neighbors(self, u: int) -> Tuple[int, ...]:
        return self.adjacency[u]

    def is_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, v) for u in range(self.node_count) for v in self.adjacency[u] if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def location_class(self, u: int) -> LocationClass:
        if u == self.goal:
            return LocationClass.AT_GOAL
        if u == self.start:
            return LocationClass.AT_START
        return LocationClass.INTERIOR

    def cell(self, u: int) -> Tuple[int, int]:
        """(column, row) of a grid node."""
        if self.grid is None:
            raise MazeError("cell() is only defined for grid mazes", "grid")
        return u % self.grid[0], u // self.grid[0]

    def parents_towards(self, root: int) -> Tuple[Optional[int], ...]:
        """Parent pointers of the tree rooted at `root` (root maps to None). Cached."""
        cached = self._towards.get(root)
        if cached is not None:
            return cached
        parents: List[Optional[int]] = [None] * self.node_count
        seen = [False] * self.node_count
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    parents[v] = u
                    queue.append(v)
        result = tuple(parents)
        self._towards[root] = result
        return result

    def next_hop(self, u: int, target: int) -> int:
        """First node after `u` on the unique path to `target` (u itself if u == target)."""
        if u == target:
            return u
        return self.parents_towards(target)[u]

    def distance(self, a: int, b: int) -> int:
        return len(tree_path(self, a, b)) - 1

    @property
    def optimal_distance(self) -> int:
        """d(s, g): the length of the unique start-goal path."""
        return self.distance(self.start, self.goal)


def _ordered(u: int, nbrs: List[int], layout: Optional[Layout], grid) -> List[int]:
    if grid is not None:
        width = grid[0]
        cu, ru = u % width, u // width

        def compass(v):
            return COMPASS.index((v % width - cu, v // width - ru))

        return sorted(nbrs, key=compass)
    if layout is not None:
        xu, yu = layout[u]

        def angle(v):
            xv, yv = layout[v]
            return math.atan2(yv - yu, xv - xu) % (2 * math.pi), v

        return sorted(nbrs, key=angle)
    return sorted(nbrs)


def _validate_structure(node_count, edges, start, goal, layout, grid) -> None:
    if isinstance(node_count, bool) or not isinstance(node_count, int) or node_count < 2:
        raise MazeError(f"a maze needs at least 2 nodes, got {node_count!r}", "nodes")
    if grid is not None and grid[0] * grid[1] != node_count:
        raise MazeError(f"grid {grid[0]}x{grid[1]} does not match {node_count} nodes", "grid")
    if layout is not None and len(layout) != node_count:
        raise MazeError(f"coords lists {len(layout)} points for {node_count} nodes", "coords")
    for name, value in (("start", start), ("goal", goal)):
        if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < node_count:
            raise MazeError(f"{name} must be a node id in [0, {node_count}), got {value!r}", name)
    if start == goal:
        raise MazeError("start and goal must be distinct nodes", "goal")

    seen = set()
    for index, (u, v) in enumerate(edges):
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise MazeError(f"edge #{index} ({u}, {v}) references a node outside [0, {node_count})", "edges")
        if u == v:
            raise MazeError(f"edge #{index} is a self-loop on node {u}", "edges")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise MazeError(f"edge #{index} ({u}, {v}) is duplicated", "edges")
        seen.add(key)

    if len(edges) != node_count - 1:
        raise MazeError(
            f"edge set is not a tree: {node_count} nodes need {node_count - 1} edges, "
            f"got {len(edges)} (cycle or disconnection)",
            "edges",
        )
    neighbors: List[List[int]] = [[] for _ in range(node_count)]
    for u, v in edges:
        neighbors[u].append(v)
        neighbors[v].append(u)
    reached = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in neighbors[u]:
            if v not in reached:
                reached.add(v)
                queue.append(v)
    if len(reached) != node_count:
        missing = min(set(range(node_count)) - reached)
        raise MazeError(
            f"edge set is not a tree: node {missing} is unreachable from start (cycle or disconnection)",
            "edges",
        )

    if grid is not None:
        width = grid[0]
        for u, v in edges:
            delta = (v % width - u % width, v // width - u // width)
            if delta not in COMPASS:
                raise MazeError(f"edge ({u}, {v}) joins cells that are not grid neighbours", "edges")


def validate_maze(maze: MazeGraph) -> None:
    """Re-check every MazeGraph invariant, raising MazeError on the first violation."""
    _validate_structure(maze.node_count, maze.edges(), maze.start, maze.goal, maze.layout, maze.grid)
    for u in range(maze.node_count):
        for v in maze.adjacency[u]:
            if u not in maze.adjacency[v]:
                raise MazeError(f"adjacency is not symmetric between {u} and {v}", "edges")
        expected = tuple(_ordered(u, list(maze.adjacency[u]), maze.layout, maze.grid))
        if maze.adjacency[u] != expected:
            raise MazeError(f"neighbour order of node {u} is not the canonical order", "edges")


def tree_path(maze: MazeGraph, source: int, target: int) -> List[int]:
    """The unique simple path from `source` to `target`, both endpoints included."""
    parents = maze.parents_towards(target)
    path = [source]
    while path[-1] != target:
        path.append(parents[path[-1]])
    return path


def _grid_neighbors(u: int, width: int, height: int) -> List[int]:
    col, row = u % width, u // width
    result = []
    for dc, dr in COMPASS:
        c, r = col + dc, row + dr
        if 0 <= c < width and 0 <= r < height:
            result.append(r * width + c)
    return result


def generate_grid_maze(width: int, height: int, seed: int) -> MazeGraph:
    """
    Spanning tree of the width x height grid by randomized Prim: a frontier of
    walls between visited and unvisited cells, one picked uniformly per round.
    Start and goal are a uniform pair of distinct cells.
    """
    if width < 1 or height < 1:
        raise MazeError(f"grid dimensions must be >= 1, got {width}x{height}", "grid")
    if width * height < 2:
        raise MazeError("a 1x1 grid has no distinct start and goal", "grid")

    rng = random.Random(seed)
    node_count = width * height
    visited = [False] * node_count
    first = rng.randrange(node_count)
    visited[first] = True
    frontier = [(first, v) for v in _grid_neighbors(first, width, height)]
    edges = []
    while frontier:
        index = rng.randrange(len(frontier))
        frontier[index], frontier[-1] = frontier[-1], frontier[index]
        u, v = frontier.pop()
        if visited[v]:
            continue
        visited[v] = True
        edges.append((u, v))
        frontier.extend((v, w) for w in _grid_neighbors(v, width, height) if not visited[w])

    start, goal = rng.sample(range(node_count), 2)
    logger.debug("grid maze %dx%d seed=%d start=%d goal=%d", width, height, seed, start, goal)
    return MazeGraph.from_edges(node_count, edges, start, goal, grid=(width, height))


def generate_geometric_maze(
    node_count: int, seed: int, region: Tuple[float, float] = DEFAULT_REGION
) -> MazeGraph:
    """
    Non-overlapping random points in a region joined by their Euclidean
    minimum spanning tree. Start is the node nearest the upper-left corner
    (0, 0), goal the node nearest the lower-right corner; y grows downwards.
    """
    if node_count < 2:
        raise MazeError(f"a geometric maze needs at least 2 nodes, got {node_count}", "nodes")
    width, height = float(region[0]), float(region[1])
    if width <= 0 or height <= 0:
        raise MazeError(f"region must have positive size, got {width}x{height}", "coords")

    rng = random.Random(seed)
    separation = MIN_SEPARATION_FRACTION * math.hypot(width, height)
    points: List[Tuple[float, float]] = []
    rejections = 0
    while len(points) < node_count:
        candidate = (rng.uniform(0.0, width), rng.uniform(0.0, height))
        if all(math.dist(candidate, p) >= separation for p in points):
            points.append(candidate)
            continue
        rejections += 1
        if rejections > MAX_PLACEMENT_RETRIES:
            raise MazeError(
                f"region {width:g}x{height:g} is too small for {node_count} nodes "
                f"with separation {separation:.3g} (placed {len(points)})",
                "coords",
            )

    graph = nx.Graph()
    graph.add_nodes_from(range(node_count))
    for i in range(node_count):
        for j in range(i + 1, node_count):
            graph.add_edge(i, j, weight=math.dist(points[i], points[j]))
    tree = nx.minimum_spanning_tree(graph, weight="weight", algorithm="kruskal")
    edges = sorted((min(u, v), max(u, v)) for u, v in tree.edges())

    start = min(range(node_count), key=lambda i: (math.dist(points[i], (0.0, 0.0)), i))
    goal = min(
        (i for i in range(node_count) if i != start),
        key=lambda i: (math.dist(points[i], (width, height)), i),
    )
    logger.debug("geometric maze n=%d seed=%d rejections=%d", node_count, seed, rejections)
    return MazeGraph.from_edges(node_count, edges, start, goal, layout=points)


def serialize_maze(maze: MazeGraph) -> str:
    """Maze file text: a JSON document, one edge and one coordinate per line."""

    def block(key: str, items: Sequence, last: bool) -> List[str]:
        if not items:
            return [f'  "{key}": []' + ("" if last else ",")]
        lines = [f'  "{key}": [']
        for index, item in enumerate(items):
            comma = "," if index < len(items) - 1 else ""
            lines.append("    " + json.dumps(list(item)) + comma)
        lines.append("  ]" + ("" if last else ","))
        return lines

    lines = [
        "{",
        f'  "version": {FORMAT_VERSION},',
        f'  "nodes": {maze.node_count},',
        f'  "start": {maze.start},',
        f'  "goal": {maze.goal},',
    ]
    if maze.grid is not None:
        lines.append(f'  "grid": {json.dumps(list(maze.grid))},')
    has_coords = maze.layout is not None
    lines.extend(block("edges", maze.edges(), last=not has_coords))
    if has_coords:
        lines.extend(block("coords", maze.layout, last=True))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _field_line(text: str, key: Optional[str]) -> Optional[int]:
    if key is None:
        return None
    pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return number
    return None


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_maze(text: str) -> MazeGraph:
    """Parse maze file text, reporting the line and field of the first violation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MazeFormatError(e.msg, line=e.lineno) from e
    if not isinstance(doc, dict):
        raise MazeFormatError("maze document must be a JSON object", line=1)

    def fail(key: str, message: str):
        raise MazeFormatError(message, line=_field_line(text, key), field=key)

    for key in ("version", "nodes", "edges", "start", "goal"):
        if key not in doc:
            raise MazeFormatError(f"missing required field '{key}'", field=key)
    if doc["version"] != FORMAT_VERSION:
        fail("version", f"unsupported version {doc['version']!r}, expected {FORMAT_VERSION}")
    for key in ("nodes", "start", "goal"):
        if not _is_int(doc[key]):
            fail(key, f"'{key}' must be an integer")

    edges = doc["edges"]
    if not isinstance(edges, list):
        fail("edges", "'edges' must be a list of [u, v] pairs")
    for index, pair in enumerate(edges):
        if not (isinstance(pair, list) and len(pair) == 2 and all(_is_int(x) for x in pair)):
            fail("edges", f"edge #{index} must be a pair of integer node ids, got {pair!r}")

    layout = doc.get("coords")
    if layout is not None:
        if not isinstance(layout, list):
            fail("coords", "'coords' must be a list of [x, y] pairs")
        for index, point in enumerate(layout):
            if not (isinstance(point, list) and len(point) == 2 and all(_is_number(x) for x in point)):
                fail("coords", f"coordinate #{index} must be a pair of numbers, got {point!r}")

    grid = doc.get("grid")
    if grid is not None:
        if not (isinstance(grid, list) and len(grid) == 2 and all(_is_int(x) and x >= 1 for x in grid)):
            fail("grid", "'grid' must be a [width, height] pair of positive integers")
        grid = (grid[0], grid[1])

    try:
        return MazeGraph.from_edges(
            doc["nodes"], [tuple(p) for p in edges], doc["start"], doc["goal"], layout=layout, grid=grid
        )
    except MazeFormatError:
        raise
    except MazeError as e:
        raise MazeFormatError(e.message, line=_field_line(text, e.field), field=e.field) from e


def load_maze(path: str) -> MazeGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise MazeFormatError(f"cannot read maze file {path}: {e}") from e
    return parse_maze(text)


def save_maze(maze: MazeGraph, path: str) -> None:
    Path(path).write_text(serialize_maze(maze), encoding="utf-8")


def render_ascii(maze: MazeGraph, marks: Optional[Dict[int, str]] = None) -> str:
    """
    ASCII picture of a grid maze: walls '#', corridors ' ', start 'S', goal
    'G'. `marks` overrides the character drawn in a cell.
    """
    if maze.grid is None:
        raise MazeError("only grid mazes can be rendered as ASCII", "grid")
    width, height = maze.grid
    canvas = [["#"] * (2 * width + 1) for _ in range(2 * height + 1)]
    for u in range(maze.node_count):
        col, row = maze.cell(u)
        canvas[2 * row + 1][2 * col + 1] = " "
        for v in maze.adjacency[u]:
            vc, vr = maze.cell(v)
            canvas[row + vr + 1][col + vc + 1] = " "
    for u, char in ((maze.start, "S"), (maze.goal, "G")):
        col, row = maze.cell(u)
        canvas[2 * row + 1][2 * col + 1] = char
    for u, char in (marks or {}).items():
        col, row = maze.cell(u)
        canvas[2 * row + 1][2 * col + 1] = char
    return "\n".join("".join(line) for line in canvas)
