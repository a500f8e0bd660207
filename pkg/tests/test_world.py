from hypothesis import given, settings, strategies as st

from simulation.maze import LocationClass, MazeGraph
from simulation.world import (
    Broadcast,
    HeadTransfer,
    NodeStatus,
    WorldState,
    comm_neighbors,
    deliver_messages,
    local_view,
    node_status,
    node_towards,
)
from maze_strategies import grid_mazes


def _world(maze, positions):
    return WorldState(maze=maze, positions=positions)


def _silent(world):
    return {a: Broadcast(a, world.maze.location_class(v), None) for a, v in world.positions.items()}


class TestOccupancy:
    def test_goal_never_occupied(self, path4):
        world = _world(path4, {1: 3, 2: 3, 3: 1})
        assert node_status(world, 3) is NodeStatus.UNOCCUPIED
        assert node_status(world, 1) is NodeStatus.OCCUPIED
        assert node_status(world, 2) is NodeStatus.UNOCCUPIED

    def test_start_counts_as_occupied(self, path4):
        world = WorldState.initial(path4, 3)
        assert world.occupied(0)
        assert world.occupants[0] == (1, 2, 3)

    def test_moved_advances_tick(self, path4):
        world = WorldState.initial(path4, 2).moved({1: 1})
        assert world.tick == 1
        assert world.positions == {1: 1, 2: 0}
        assert world.active_agents == [1, 2]

    def test_local_view(self, star4):
        world = _world(star4, {1: 0, 2: 2})
        view = local_view(world, 1)
        assert view.neighbors == (1, 2)
        assert view.occupied == frozenset({2})
        assert view.location_class is LocationClass.AT_START


class TestCommGraph:
    def test_two_hop_through_free_node(self, path5):
        world = _world(path5, {1: 0, 2: 0, 3: 2})
        assert comm_neighbors(world, 1) == {2, 3}
        assert node_towards(world, 1, 3) == 1
        assert node_towards(world, 1, 2) == 0

    def test_occupied_node_blocks_relay(self, path5):
        world = _world(path5, {1: 0, 2: 1, 3: 2})
        assert comm_neighbors(world, 1) == {2}
        assert node_towards(world, 1, 3) is None
        assert node_towards(world, 1, 2) == 1

    def test_three_hops_out_of_range(self, path5):
        world = _world(path5, {1: 0, 2: 3})
        assert comm_neighbors(world, 1) == frozenset()

    def test_goal_relays(self):
        maze = MazeGraph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], start=0, goal=2)
        world = _world(maze, {1: 1, 2: 3, 3: 2})
        assert comm_neighbors(world, 1) == {2, 3}
        assert node_towards(world, 1, 2) == 2

    @given(grid_mazes(max_side=5), st.data())
    @settings(max_examples=50, deadline=None)
    def test_symmetric(self, maze, data):
        n = data.draw(st.integers(2, 6))
        positions = {a: data.draw(st.integers(0, maze.node_count - 1)) for a in range(1, n + 1)}
        world = _world(maze, positions)
        for i in positions:
            for j in comm_neighbors(world, i):
                assert i in comm_neighbors(world, j)
                assert node_towards(world, i, j) is not None

    @given(grid_mazes(max_side=7), st.data())
    @settings(max_examples=50, deadline=None)
    def test_link_node_next_to_receiver(self, maze, data):
        n = data.draw(st.integers(2, 15))
        positions = {a: data.draw(st.integers(0, maze.node_count - 1)) for a in range(1, n + 1)}
        world = _world(maze, positions)
        for i in positions:
            for j in comm_neighbors(world, i):
                via = node_towards(world, i, j)
                assert via is not None
                assert via == positions[i] or maze.is_edge(positions[i], via)


class TestDelivery:
    def test_stamped_with_arrival_node(self, path5):
        world = _world(path5, {1: 0, 2: 0, 3: 2})
        inboxes = deliver_messages(world, _silent(world))
        messages = list(inboxes[1])
        assert [m.sender for m in messages] == [2, 3]
        assert [m.arrival_node for m in messages] == [0, 1]
        assert messages[0].location_class is LocationClass.AT_START
        assert len(inboxes[1]) == 2
        assert 1 not in inboxes[1]
        assert 3 in inboxes[1]

    def test_senders_match_comm_graph(self, path5):
        world = _world(path5, {1: 0, 2: 0, 3: 2, 4: 4})
        inboxes = deliver_messages(world, _silent(world))
        for agent in world.positions:
            assert inboxes[agent].senders == comm_neighbors(world, agent)

    def test_leaders_view(self, path5):
        world = _world(path5, {1: 2, 2: 0, 3: 0})
        outbox = {
            1: Broadcast(1, LocationClass.INTERIOR, None),
            2: Broadcast(2, LocationClass.AT_START, 1),
            3: Broadcast(3, LocationClass.AT_START, 2),
        }
        inbox = deliver_messages(world, outbox)[3]
        assert dict(inbox.leaders) == {1: None, 2: 1}
        assert inbox.arrival_node(1) == 1
        assert inbox.location_of(2) is LocationClass.AT_START

    def test_start_bucket_carries_leaders(self, path5):
        world = _world(path5, {1: 2, 2: 0, 3: 0})
        outbox = {
            1: Broadcast(1, LocationClass.INTERIOR, None),
            2: Broadcast(2, LocationClass.AT_START, 1),
            3: Broadcast(3, LocationClass.AT_START, 2),
        }
        inbox = deliver_messages(world, outbox)[1]
        (bucket,) = inbox.via(1)
        assert bucket.ids == {2, 3}
        assert bucket.location_class is LocationClass.AT_START
        assert dict(inbox.leaders) == {2: 1, 3: 2}

    def test_transfer_reaches_addressee(self, path4):
        world = _world(path4, {1: 1, 2: 0})
        outbox = {
            1: Broadcast(1, LocationClass.INTERIOR, 2, HeadTransfer(2, "{}")),
            2: Broadcast(2, LocationClass.AT_START, 1),
        }
        inboxes = deliver_messages(world, outbox)
        assert inboxes[2].transfer_for(2) == HeadTransfer(2, "{}")
        assert inboxes[1].transfer_for(1) is None
