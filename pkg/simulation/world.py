"""
Agent positions on a maze, occupancy, the communication graph and per-step
message delivery.

Agents communicate with agents on the same node, on an adjacent node, or two
hops away through a shared unoccupied neighbour. The goal node is never
counted as occupied, so agents parked on the goal relay nothing and block
nothing but still broadcast.

Delivery groups broadcasts by the node their sender stands on. Every receiver
on the same node sees the same buckets, so a crowd of agents on the start node
costs one bucket rather than one message per pair.
"""
import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple

from simulation.maze import LocationClass, MazeGraph

Route = Tuple[int, int]  # (arrival node, sender node)


class NodeStatus(str, Enum):
    OCCUPIED = "occupied"
    UNOCCUPIED = "unoccupied"


@dataclass(frozen=True)
class WorldState:
    maze: MazeGraph
    positions: Mapping[int, int]
    tick: int = 0
    seed: int = 0
    occupants: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)
    _routes: Dict[int, Tuple[Route, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = dict(self.positions)
        grouped = defaultdict(list)
        for agent in sorted(positions):
            grouped[positions[agent]].append(agent)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "occupants", {u: tuple(a) for u, a in grouped.items()})
        object.__setattr__(self, "_routes", {})

    @classmethod
    def initial(cls, maze: MazeGraph, n: int, seed: int = 0) -> "WorldState":
        """n agents, numbered 1..n, all on the start node."""
        if n < 1:
            raise ValueError(f"agent count must be >= 1, got {n}")
        return cls(maze=maze, positions={a: maze.start for a in range(1, n + 1)}, seed=seed)

    @property
    def agents(self) -> List[int]:
        return sorted(self.positions)

    @property
    def active_agents(self) -> List[int]:
        goal = self.maze.goal
        return [a for a in sorted(self.positions) if self.positions[a] != goal]

    @property
    def all_at_goal(self) -> bool:
        goal = self.maze.goal
        return all(v == goal for v in self.positions.values())

    def occupied(self, u: int) -> bool:
        return u != self.maze.goal and u in self.occupants

    def moved(self, moves: Mapping[int, int]) -> "WorldState":
        """The next tick's world with `moves` (agent -> node) applied."""
        positions = dict(self.positions)
        positions.update(moves)
        return WorldState(maze=self.maze, positions=positions, tick=self.tick + 1, seed=self.seed)

    def routes(self, v: int) -> Tuple[Route, ...]:
        """
        Every occupied node a receiver standing on `v` hears from, paired with
        the node the message arrives through. Cached per node.
        """
        cached = self._routes.get(v)
        if cached is not None:
            return cached
        adjacency = self.maze.adjacency
        routes = []
        if v in self.occupants:
            routes.append((v, v))
        for w in adjacency[v]:
            if w in self.occupants:
                routes.append((w, w))
        for u in adjacency[v]:
            if self.occupied(u):
                continue
            for x in adjacency[u]:
                # on a tree x cannot also be adjacent to v
                if x != v and x in self.occupants:
                    routes.append((u, x))
        result = tuple(routes)
        self._routes[v] = result
        return result


def node_status(world: WorldState, u: int) -> NodeStatus:
    return NodeStatus.OCCUPIED if world.occupied(u) else NodeStatus.UNOCCUPIED


def comm_neighbors(world: WorldState, agent: int) -> FrozenSet[int]:
    """Agents that exchange messages with `agent` this step (never the agent itself)."""
    result = set()
    for _, node in world.routes(world.positions[agent]):
        result.update(world.occupants[node])
    result.discard(agent)
    return frozenset(result)


def node_towards(world: WorldState, agent: int, other: int) -> Optional[int]:
    """
    The node through which `other`'s message reaches `agent`: the shared node,
    the adjacent node, or the unoccupied middle node of a two-hop link.
    None when the two agents are out of range.
    """
    v, w = world.positions[agent], world.positions[other]
    if v == w or world.maze.is_edge(v, w):
        return w
    for u in world.maze.neighbors(v):
        if not world.occupied(u) and world.maze.is_edge(u, w):
            return u
    return None


@dataclass(frozen=True)
class LocalView:
    position: int
    neighbors: Tuple[int, ...]
    occupied: FrozenSet[int]
    location_class: LocationClass


def local_view(world: WorldState, agent: int) -> LocalView:
    """What an agent senses about its own node and its neighbours."""
    v = world.positions[agent]
    neighbors = world.maze.neighbors(v)
    return LocalView(
        position=v,
        neighbors=neighbors,
        occupied=frozenset(u for u in neighbors if world.occupied(u)),
        location_class=world.maze.location_class(v),
    )


@dataclass(frozen=True)
class HeadTransfer:
    to: int
    solver_payload: str


@dataclass(frozen=True)
class Broadcast:
    """What an agent sends this step, before it is stamped per receiver."""
    sender: int
    location_class: LocationClass
    leader: Optional[int]
    payload: Optional[HeadTransfer] = None


@dataclass(frozen=True)
class Message:
    sender: int
    location_class: LocationClass
    leader_of_sender: Optional[int]
    arrival_node: int
    payload: Optional[HeadTransfer] = None


class Bucket:
    """Broadcasts from every agent standing on one node."""

    __slots__ = ("node", "location_class", "broadcasts", "ids", "_by_sender", "_transfers")

    def __init__(self, node: int, location_class: LocationClass, broadcasts: Tuple[Broadcast, ...]):
        self.node = node
        self.location_class = location_class
        self.broadcasts = tuple(sorted(broadcasts, key=lambda b: b.sender))
        self._by_sender = {b.sender: b for b in self.broadcasts}
        self.ids = frozenset(self._by_sender)
        self._transfers = None

    def __len__(self):
        return len(self.broadcasts)

    @property
    def senders(self) -> Tuple[int, ...]:
        return tuple(b.sender for b in self.broadcasts)

    @property
    def transfers(self) -> Tuple[Broadcast, ...]:
        if self._transfers is None:
            self._transfers = tuple(b for b in self.broadcasts if b.payload is not None)
        return self._transfers

    def get(self, sender: int) -> Optional[Broadcast]:
        return self._by_sender.get(sender)


class LeaderView(Mapping):
    """Read-only sender -> leader_of_sender mapping over an inbox."""

    def __init__(self, inbox: "Inbox"):
        self._inbox = inbox

    def __getitem__(self, sender: int) -> Optional[int]:
        found = self._inbox.get(sender)
        if found is None:
            raise KeyError(sender)
        return found.leader

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._inbox.senders))

    def __len__(self) -> int:
        return len(self._inbox.senders)


class Inbox:
    """
    The messages one agent receives in a step: the buckets it hears, each
    tagged with its arrival node. Iterating yields `Message`s by sender id.
    """

    def __init__(self, owner: int, groups: Tuple[Tuple[int, Bucket], ...]):
        self.owner = owner
        self.groups = groups
        self._senders = None

    def __iter__(self) -> Iterator[Message]:
        def stamped(arrival: int, bucket: Bucket):
            for b in bucket.broadcasts:
                if b.sender != self.owner:
                    yield Message(b.sender, b.location_class, b.leader, arrival, b.payload)

        return heapq.merge(*(stamped(a, b) for a, b in self.groups), key=lambda m: m.sender)

    def __len__(self) -> int:
        total = sum(len(bucket) for _, bucket in self.groups)
        own = any(self.owner in bucket.ids for _, bucket in self.groups)
        return total - 1 if own else total

    def __contains__(self, sender: int) -> bool:
        """Whether `sender` was heard this step. The owner never hears itself."""
        if sender == self.owner:
            return False
        return any(sender in bucket.ids for _, bucket in self.groups)

    @property
    def senders(self) -> FrozenSet[int]:
        if self._senders is None:
            ids = set()
            for _, bucket in self.groups:
                ids.update(bucket.ids)
            ids.discard(self.owner)
            self._senders = frozenset(ids)
        return self._senders

    @property
    def leaders(self) -> LeaderView:
        return LeaderView(self)

    def via(self, node: int) -> List[Bucket]:
        return [bucket for arrival, bucket in self.groups if arrival == node]

    def senders_via(self, node: int) -> List[int]:
        return [a for bucket in self.via(node) for a in bucket.senders if a != self.owner]

    def _find(self, sender: int) -> Optional[Tuple[int, Bucket]]:
        if sender == self.owner:
            return None
        for arrival, bucket in self.groups:
            if sender in bucket.ids:
                return arrival, bucket
        return None

    def get(self, sender: int) -> Optional[Broadcast]:
        found = self._find(sender)
        return found[1].get(sender) if found else None

    def arrival_node(self, sender: int) -> Optional[int]:
        """NodeTowards(sender) as seen by the owner, None when not heard."""
        found = self._find(sender)
        return found[0] if found else None

    def location_of(self, sender: int) -> Optional[LocationClass]:
        found = self._find(sender)
        return found[1].location_class if found else None

    def transfer_for(self, agent: int) -> Optional[HeadTransfer]:
        for _, bucket in self.groups:
            for b in bucket.transfers:
                if b.sender != self.owner and b.payload.to == agent:
                    return b.payload
        return None


def deliver_messages(world: WorldState, outbox: Mapping[int, Broadcast]) -> Dict[int, Inbox]:
    """
    Deliver one broadcast per sender to every agent in communication range,
    as seen from the current positions. Agents without a broadcast are silent
    but still receive.
    """
    buckets: Dict[int, Bucket] = {}
    for node, agents in world.occupants.items():
        drafts = tuple(outbox[a] for a in agents if a in outbox)
        if drafts:
            buckets[node] = Bucket(node, world.maze.location_class(node), drafts)

    groups_at: Dict[int, Tuple[Tuple[int, Bucket], ...]] = {}
    inboxes = {}
    for agent, v in world.positions.items():
        groups = groups_at.get(v)
        if groups is None:
            groups = tuple((arrival, buckets[x]) for arrival, x in world.routes(v) if x in buckets)
            groups_at[v] = groups
        inboxes[agent] = Inbox(agent, groups)
    return inboxes
