"""
Replay frames rebuilt from a trace: ASCII for grid mazes, SVG through
matplotlib for any maze with a layout.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from simulation.events import TraceRecord  # noqa: E402
from simulation.maze import COMPASS, MazeError, MazeGraph, render_ascii  # noqa: E402

logger = logging.getLogger(__name__)

ARROWS = {COMPASS[0]: "^", COMPASS[1]: ">", COMPASS[2]: "v", COMPASS[3]: "<"}
HEAD_COLOR = "#8fd694"
FOLLOWER_COLOR = "#1b5e20"


@dataclass(frozen=True)
class Frame:
    tick: int
    positions: Dict[int, int]
    leaders: Dict[int, Optional[int]]


def frames_from_trace(records: Sequence[TraceRecord]) -> List[Frame]:
    """One frame per tick, 0 through the last tick in the trace."""
    if not records:
        logger.warning("trace has no records, nothing to replay")
        return []
    positions: Dict[int, int] = {}
    leaders: Dict[int, Optional[int]] = {}
    by_tick: Dict[int, List[TraceRecord]] = {}
    for record in records:
        by_tick.setdefault(record.tick, []).append(record)

    frames = []
    for tick in range(0, max(by_tick) + 1):
        for record in by_tick.get(tick, []):
            if record.agent is None:
                continue
            if record.phase in ("init", "move") and record.position is not None:
                positions[record.agent] = record.position
            if record.phase in ("init", "decide", "heal", "transfer"):
                leaders[record.agent] = record.leader
        frames.append(Frame(tick, dict(positions), dict(leaders)))
    return frames


def _arrow(maze: MazeGraph, node: int, toward: Optional[int]) -> str:
    if toward is None or toward == node:
        return "*"
    step = maze.next_hop(node, toward)
    (c0, r0), (c1, r1) = maze.cell(node), maze.cell(step)
    return ARROWS.get((c1 - c0, r1 - r0), "*")


def _text_frame(maze: MazeGraph, frame: Frame) -> str:
    # Mazes without a grid: one "agent@node" entry per agent, head marked 'H'.
    entries = []
    for agent, node in sorted(frame.positions.items()):
        head = agent in frame.leaders and frame.leaders[agent] is None
        entries.append(f"{agent}@{node}{'H' if head else ''}")
    return f"k={frame.tick} " + " ".join(entries)


def ascii_frame(maze: MazeGraph, frame: Frame) -> str:
    """
    Grid picture of one frame: 'H' for the head, an arrow along the leader
    pointer for a follower, '*' when the leader shares its node or is unknown.
    Agents on start and goal are summarised below the picture.
    """
    if maze.grid is None:
        return _text_frame(maze, frame)
    marks = {}
    for agent, node in sorted(frame.positions.items()):
        if node in (maze.start, maze.goal) or node in marks:
            continue
        leader = frame.leaders.get(agent)
        if leader is None and agent in frame.leaders:
            marks[node] = "H"
        else:
            marks[node] = _arrow(maze, node, frame.positions.get(leader))
    at_start = sum(1 for v in frame.positions.values() if v == maze.start)
    at_goal = sum(1 for v in frame.positions.values() if v == maze.goal)
    picture = render_ascii(maze, marks)
    return f"k={frame.tick}\n{picture}\nS:{at_start} G:{at_goal}"


def svg_frame(maze: MazeGraph, frame: Frame, path: str) -> None:
    """Draw one frame to an SVG file. Needs a maze layout."""
    if maze.layout is None:
        raise MazeError("SVG replay needs node coordinates", "coords")
    fig, ax = plt.subplots(figsize=(6, 6))
    for u, v in maze.edges():
        (x0, y0), (x1, y1) = maze.layout[u], maze.layout[v]
        ax.plot([x0, x1], [y0, y1], color="#999999", linewidth=1, zorder=1)
    xs, ys = zip(*maze.layout)
    ax.scatter(xs, ys, s=6, color="#bbbbbb", zorder=2)
    for node, label in ((maze.start, "S"), (maze.goal, "G")):
        x, y = maze.layout[node]
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(6, 6), fontsize=10)

    for agent, node in sorted(frame.positions.items()):
        x, y = maze.layout[node]
        leader = frame.leaders.get(agent)
        is_head = leader is None and agent in frame.leaders
        ax.scatter([x], [y], s=60, color=HEAD_COLOR if is_head else FOLLOWER_COLOR, zorder=3)
        target = frame.positions.get(leader) if leader is not None else None
        if target is not None and target != node:
            tx, ty = maze.layout[maze.next_hop(node, target)]
            ax.annotate("", xy=(tx, ty), xytext=(x, y),
                        arrowprops=dict(arrowstyle="->", color=FOLLOWER_COLOR), zorder=4)

    ax.set_title(f"k = {frame.tick}")
    ax.invert_yaxis()
    ax.set_aspect("equal")
    ax.axis("off")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
