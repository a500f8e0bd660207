"""
Strategy adapters the engine drives: each one owns its agents' private state
and turns a world snapshot into per-agent targets.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import replace
from typing import Dict, List, Mapping, Optional, Sequence

from simulation.baselines import (
    GlobalBlackboard,
    NaiveAgent,
    StrategyKind,
    full_knowledge_decide,
    global_comm_step,
    naive_decide,
)
from simulation.events import TraceRecord
from simulation.maze import MazeGraph
from simulation.protocol import AgentState, Decision, decide, initialize, post_move_update
from simulation.solvers import SolverKind, initial_state
from simulation.world import Broadcast, HeadTransfer, WorldState, deliver_messages, local_view

logger = logging.getLogger(__name__)


class Strategy(ABC):
    kind: StrategyKind

    def __init__(self, maze: MazeGraph, n: int, solver: SolverKind, seed: int):
        self.maze = maze
        self.n = n
        self.solver = SolverKind(solver)
        self.seed = seed

    @abstractmethod
    def start(self, world: WorldState) -> List[TraceRecord]:
        """Set up agent state on the initial world."""

    @abstractmethod
    def decide(self, world: WorldState, order: Sequence[int]) -> Dict[int, int]:
        """Targets for the agents considered this step (omitted agents stay)."""

    def after_move(self, world: WorldState, moves: Mapping[int, int], order: Sequence[int]) -> List[TraceRecord]:
        return []

    def leader_of(self, agent: int) -> Optional[int]:
        return None

    def head_reached(self, world: WorldState) -> bool:
        return any(v == self.maze.goal for v in world.positions.values())

    def agent_states(self) -> Optional[Dict[int, AgentState]]:
        return None


class MamtStrategy(Strategy):
    kind = StrategyKind.MAMT

    def start(self, world):
        silent = {a: Broadcast(a, self.maze.location_class(v), None) for a, v in world.positions.items()}
        self.states = initialize(
            world.agents,
            deliver_messages(world, silent),
            lambda: initial_state(self.solver, self.seed),
            self.maze.start,
        )
        self.decisions: Dict[int, Decision] = {}
        self.inboxes = deliver_messages(world, self._outbox(world))
        return [
            TraceRecord(world.tick, "init", a, s.position, s.leader, s.target, "head" if s.is_head else None)
            for a, s in sorted(self.states.items())
        ]

    def _outbox(self, world: WorldState) -> Dict[int, Broadcast]:
        outbox = {}
        for a, state in self.states.items():
            decision = self.decisions.get(a)
            payload = None
            if decision is not None and decision.transfer_head_to is not None:
                payload = HeadTransfer(decision.transfer_head_to, decision.solver_payload)
            outbox[a] = Broadcast(a, self.maze.location_class(state.position), state.leader, payload)
        return outbox

    def decide(self, world, order):
        self.decisions = {}
        targets = {}
        for a in order:
            decision = decide(self.states[a], self.inboxes[a], local_view(world, a))
            self.states[a] = decision.state
            self.decisions[a] = decision
            targets[a] = decision.move_to
        return targets

    def after_move(self, world, moves, order):
        for a, node in moves.items():
            state = self.states[a]
            if node != state.position:
                self.states[a] = replace(state, position=node, fuel=state.fuel + 1)
        self.inboxes = deliver_messages(world, self._outbox(world))
        delivered = sum(len(inbox) for inbox in self.inboxes.values())
        records = [TraceRecord(world.tick, "message", event=f"{delivered} messages")]

        for a in sorted(order):
            before = self.states[a]
            if before.position == self.maze.goal:
                continue
            after = post_move_update(before, self.inboxes[a])
            self.states[a] = after
            if after.leader == before.leader:
                continue
            if after.is_head:
                records.append(TraceRecord(world.tick, "transfer", a, after.position, None, after.target, "head"))
            else:
                records.append(
                    TraceRecord(world.tick, "heal", a, after.position, after.leader, after.target,
                                f"leader {before.leader} -> {after.leader}")
                )
        return records

    def leader_of(self, agent):
        return self.states[agent].leader

    def head_reached(self, world):
        goal = self.maze.goal
        return any(s.is_head and s.position == goal for s in self.states.values())

    def agent_states(self):
        return self.states


class NaiveStrategy(Strategy):
    kind = StrategyKind.NAIVE

    def start(self, world):
        self.agents = {
            a: NaiveAgent(a, v, initial_state(self.solver, self.seed, agent=a)) for a, v in world.positions.items()
        }
        return [TraceRecord(world.tick, "init", a, v) for a, v in sorted(world.positions.items())]

    def decide(self, world, order):
        # Higher IDs claim first; evaluation order does not matter.
        # Start and goal hold any number of agents, so they are never claimed.
        staging = (self.maze.start, self.maze.goal)
        targets = {}
        claimed = set()
        for a in sorted(order, reverse=True):
            target, self.agents[a] = naive_decide(self.agents[a], local_view(world, a), claimed)
            targets[a] = target
            if target != world.positions[a] and target not in staging:
                claimed.add(target)
        return targets

    def after_move(self, world, moves, order):
        for a, node in moves.items():
            self.agents[a] = replace(self.agents[a], position=node)
        return []


class GlobalCommStrategy(Strategy):
    kind = StrategyKind.GLOBAL_COMM

    def start(self, world):
        self.blackboard = GlobalBlackboard.fresh(self.maze)
        self.last_turn = 0
        return [TraceRecord(world.tick, "init", a, v) for a, v in sorted(world.positions.items())]

    def _turn_order(self, active: Sequence[int]) -> List[int]:
        later = [a for a in active if a > self.last_turn]
        earlier = [a for a in active if a <= self.last_turn]
        return later + earlier

    def decide(self, world, order):
        # A blocked agent forfeits and the turn passes on within the same step.
        for turn in self._turn_order(sorted(order)):
            target, blackboard = global_comm_step(world, self.blackboard, turn)
            if target != world.positions[turn]:
                self.last_turn = turn
                self.blackboard = blackboard
                return {turn: target}
            logger.debug("tick %s: agent %s forfeits its turn", world.tick + 1, turn)
        return {}


class FullKnowledgeStrategy(Strategy):
    kind = StrategyKind.FULL_KNOWLEDGE

    def start(self, world):
        return [TraceRecord(world.tick, "init", a, v) for a, v in sorted(world.positions.items())]

    def decide(self, world, order):
        targets = {}
        claimed_at_start = set()
        for a in sorted(order):
            targets[a] = full_knowledge_decide(a, world, claimed_at_start)
            if world.positions[a] == self.maze.start:
                claimed_at_start.add(self.maze.next_hop(self.maze.start, self.maze.goal))
        return targets


def get_strategy(kind: StrategyKind):
    """Get the strategy class for a strategy kind"""
    strategies = {
        StrategyKind.MAMT: MamtStrategy,
        StrategyKind.NAIVE: NaiveStrategy,
        StrategyKind.GLOBAL_COMM: GlobalCommStrategy,
        StrategyKind.FULL_KNOWLEDGE: FullKnowledgeStrategy,
    }
    return strategies.get(StrategyKind(kind))


def create_strategy(kind: StrategyKind, maze: MazeGraph, n: int, solver: SolverKind, seed: int) -> Strategy:
    return get_strategy(kind)(maze, n, solver, seed)
