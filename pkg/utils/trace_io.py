"""
Trace files: one JSON object per line. The first line is a header holding the
maze document and the trial config, so a trace replays on its own.
"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional

from simulation.events import TraceRecord
from simulation.maze import MazeFormatError, MazeGraph, parse_maze, serialize_maze

logger = logging.getLogger(__name__)


class TraceFile(NamedTuple):
    maze: Optional[MazeGraph]
    config: dict
    records: List[TraceRecord]
    truncated: bool


def write_trace(path: str, maze: MazeGraph, config: dict, records: Iterable[TraceRecord]) -> None:
    header = {"kind": "header", "maze": json.loads(serialize_maze(maze)), "config": config}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for record in records:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def read_trace(path: str) -> TraceFile:
    """
    Read a trace file. A malformed line ends the trace: everything before it
    is returned and `truncated` is set.
    """
    maze, config, records = None, {}, []
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()

    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            if doc.get("kind") == "header":
                maze = parse_maze(json.dumps(doc["maze"]))
                config = dict(doc.get("config") or {})
            else:
                records.append(TraceRecord.from_dict(doc))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError, MazeFormatError) as e:
            logger.warning("trace %s is truncated at line %s: %s", path, number, e)
            return TraceFile(maze, config, records, True)
    return TraceFile(maze, config, records, False)
