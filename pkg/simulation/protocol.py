"""
The per-agent MAMT state machine.

One agent, the head, runs the maze solver. Every other agent follows a
leader pointer towards the head. Whenever the head's next node would be taken
by a competing agent, the head stays, points its leader at that agent and
hands it the solver. The new head's walk therefore continues the old head's
walk exactly, and the chain of leaders stays connected.

Every function here reads only the agent's own state and its inbox, so the
engine may evaluate agents in any order within a phase.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, Mapping, Optional, Set

from simulation.maze import LocationClass
from simulation.solvers import (
    SolverState,
    deserialize_solver_state,
    serialize_solver_state,
    solver_next,
)
from simulation.world import Inbox, LocalView

logger = logging.getLogger(__name__)


def selector(ids: Iterable[int]) -> int:
    ids = list(ids)
    assert ids, "selector needs at least one id"
    return min(ids)


@dataclass(frozen=True)
class AgentState:
    id: int
    position: int
    leader: Optional[int] = None
    prev_leader: Optional[int] = None
    target: Optional[int] = None
    leader_target: Optional[int] = None
    solver: Optional[SolverState] = None
    fuel: int = 0
    known_leaders: Mapping[int, Optional[int]] = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_head(self) -> bool:
        return self.leader is None


@dataclass(frozen=True)
class Decision:
    move_to: int
    leader: Optional[int]
    transfer_head_to: Optional[int] = None
    solver_payload: Optional[str] = None
    state: Optional[AgentState] = None


def initialize(
    agents: Iterable[int],
    inboxes: Mapping[int, Inbox],
    solver_factory: Callable[[], SolverState],
    start: int,
) -> Dict[int, AgentState]:
    """
    Elect the head among co-located agents and point everyone else at it.
    `inboxes` must come from a delivery in which nobody claims a leader yet.
    """
    states = {}
    for agent in agents:
        inbox = inboxes[agent]
        head = selector(set(inbox.senders) | {agent})
        known = {j: (None if j == head else head) for j in inbox.senders}
        if head == agent:
            states[agent] = AgentState(
                id=agent, position=start, target=start, solver=solver_factory(), known_leaders=known
            )
        else:
            states[agent] = AgentState(id=agent, position=start, leader=head, target=start, known_leaders=known)
    return states


def competing_agents(agent: AgentState, inbox: Inbox, nodes: Iterable[Optional[int]]) -> Set[int]:
    """
    Agents that may claim one of `nodes` this step: heard through one of
    those nodes, not on the goal, not held back on the start node by a leader
    that is still there, and not our own leader unless it shares our node.
    Leaders of the senders come from `agent.known_leaders`; a head has none
    and so counts as having left the start.
    """
    leaders = agent.known_leaders
    competing = set()
    for node in set(nodes):
        if node is None:
            continue
        for bucket in inbox.via(node):
            if bucket.location_class is LocationClass.AT_GOAL:
                continue
            on_start = bucket.location_class is LocationClass.AT_START
            for a in bucket.senders:
                if a == agent.id:
                    continue
                if on_start and leaders.get(a) in bucket.ids:
                    continue
                if a == agent.leader and node != agent.position:
                    continue
                competing.add(a)
    return competing


def resolve_leader_conflict(agent: AgentState, inbox: Inbox, leader: int) -> int:
    """
    When several agents would follow the same leader, the smallest of them
    keeps it and every other one follows that smallest agent instead.
    """
    towards = inbox.arrival_node(leader)
    rivals = competing_agents(agent, inbox, {towards, agent.position})
    chosen = selector(rivals | {agent.id})
    return leader if chosen == agent.id else chosen


def decide(agent: AgentState, inbox: Inbox, view: LocalView) -> Decision:
    if agent.is_head:
        return _decide_head(agent, inbox, view)
    return _decide_follower(agent, inbox, view)


def _decide_head(agent: AgentState, inbox: Inbox, view: LocalView) -> Decision:
    anchor = agent.solver.at
    if anchor is not None and anchor != agent.position and anchor in view.neighbors:
        # Handed the solver from two hops away: reach its node before resuming.
        proposal, continuation = anchor, agent.solver
    else:
        proposal, continuation = solver_next(agent.solver, agent.position, view.neighbors)
    if proposal is None:
        logger.warning("head %s has no move from node %s", agent.id, agent.position)
        state = replace(agent, prev_leader=None, target=agent.position)
        return Decision(move_to=agent.position, leader=None, state=state)

    claimants = competing_agents(agent, inbox, {proposal})
    if not claimants:
        state = replace(agent, prev_leader=None, target=proposal, solver=continuation)
        return Decision(move_to=proposal, leader=None, state=state)

    successor = selector(claimants)
    payload = serialize_solver_state(continuation)
    state = replace(
        agent,
        leader=successor,
        prev_leader=None,
        target=agent.position,
        leader_target=proposal,
        solver=None,
    )
    logger.debug("head %s hands over to %s at node %s", agent.id, successor, proposal)
    return Decision(
        move_to=agent.position,
        leader=successor,
        transfer_head_to=successor,
        solver_payload=payload,
        state=state,
    )


def _decide_follower(agent: AgentState, inbox: Inbox, view: LocalView) -> Decision:
    previous = agent.leader
    leader = resolve_leader_conflict(agent, inbox, previous)
    towards = inbox.arrival_node(leader)

    move_to = agent.position
    if towards is not None and leader == previous:
        leader_at_goal = inbox.location_of(leader) is LocationClass.AT_GOAL
        if leader_at_goal or towards not in view.occupied:
            move_to = towards

    state = replace(
        agent,
        leader=leader,
        prev_leader=previous,
        target=move_to,
        leader_target=towards if towards is not None else agent.leader_target,
    )
    return Decision(move_to=move_to, leader=leader, state=state)


def post_move_update(agent: AgentState, inbox: Inbox) -> AgentState:
    """
    Re-point a leader that dropped out of range at whoever now stands between
    us and where it was, then accept a head transfer addressed to us.
    """
    leader = agent.leader
    if leader is not None and leader not in inbox:
        candidates = inbox.senders_via(agent.leader_target) if agent.leader_target is not None else []
        if candidates:
            leader = selector(candidates)
        else:
            logger.debug("agent %s lost leader %s, holding", agent.id, leader)

    solver = agent.solver
    transfer = inbox.transfer_for(agent.id)
    if transfer is not None:
        leader = None
        solver = deserialize_solver_state(transfer.solver_payload)

    return replace(agent, leader=leader, solver=solver, known_leaders=inbox.leaders)
