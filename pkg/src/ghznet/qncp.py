"""Quantum network configuration protocols: joining devices at run time.

Server-driven joins hand out fresh GHZ_{m+1} copies from a designated server;
device-driven joins grow the copies hop by hop over the quantum channel graph;
decorated joins extend the decorated network state with locally attached
decorator chains.  Existing network components are never touched.

Cost accounting follows the closed-form convention of the linear-chain
analysis: ``bell_measurements`` counts the merges between relay-created GHZ
states, while the merge that consumes a leaf sent by the joining device
itself is booked separately as an attach measurement (the raw transcript
records both kinds).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ghznet import clifford as cl
from ghznet.arch.common import ProtocolError
from ghznet.arch.decorated_b import NetworkStateB
from ghznet.arch.ghz_a import CopyA, NetworkStateA
from ghznet.ghz import bell_merge, make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId


class JoinError(ProtocolError):
    pass


@dataclass
class JoinEvent:
    new_device: str
    clients: int
    mode: str
    qubits_created: int = 0
    qubits_transmitted: int = 0
    bell_measurements: int = 0
    attach_measurements: int = 0
    rounds: int = 0
    relays: list[str] = field(default_factory=list)
    event_range: tuple[int, int] = (0, 0)

    def per_copy(self, field_name: str) -> int:
        total = getattr(self, field_name)
        if self.clients == 0:
            return 0
        if total % self.clients:
            raise JoinError(f"{field_name}={total} not divisible across {self.clients} copies")
        return total // self.clients


def qncp_server_join(
    state: GraphState,
    net: NetworkStateA,
    new_device: str,
    clients: int,
    server: str,
) -> JoinEvent:
    """Server-driven join: c fresh copies of GHZ_{m+1}, roots at the new device.

    The server prepares each copy locally and teleports the qubits out over
    pre-shared Bell pairs; the transmission count is reported, the Bell-pair
    budget is assumed available.
    """
    if net.secure:
        raise JoinError("joins are unsupported for the secure network variant")
    if server not in net.device_order:
        raise JoinError(f"QNCP server {server!r} is not a network device")
    if new_device in net.device_order:
        raise JoinError(f"device {new_device!r} is already part of the network")
    ev = JoinEvent(new_device, clients, "server")
    start = len(state.transcript.events)
    existing = list(net.device_order)
    for j in range(1, clients + 1):
        plan = {0: new_device}
        for pos, dev in enumerate(existing, start=1):
            plan[pos] = dev
        comp = make_ghz(state, len(existing) + 1, owner_plan=plan, root_role="network-proxy")
        leaf_at = {dev: comp.leaves[pos - 1] for pos, dev in enumerate(existing, start=1)}
        net.copies[(new_device, j)] = CopyA(new_device, j, comp.root, leaf_at, comp=comp)
        ev.qubits_created += comp.size
        ev.qubits_transmitted += sum(1 for q in comp.qubits if q.location != server)
    net.device_order.append(new_device)
    net.c[new_device] = clients
    ev.event_range = (start, len(state.transcript.events))
    return ev


def qncp_device_join(
    state: GraphState,
    net: NetworkStateA,
    new_device: str,
    clients: int,
    channels: dict[str, set[str]],
) -> JoinEvent:
    """Device-driven join: leaves propagate hop by hop until every device holds one.

    The new device boots with GHZ_{a+1} per copy (a = channel neighbors);
    each device that received a leaf and still has unserved neighbors creates
    GHZ_{a'+2}, Bell-merges its root onto the received leaf, keeps one leaf
    and forwards the rest.  Terminates after at most m rounds.
    """
    if net.secure:
        raise JoinError("joins are unsupported for the secure network variant")
    if new_device in net.device_order:
        raise JoinError(f"device {new_device!r} is already part of the network")
    existing = list(net.device_order)
    first_neighbors = sorted(set(channels.get(new_device, set())) & set(existing))
    if not first_neighbors:
        raise JoinError(f"device {new_device!r} has no quantum channel into the network")
    ev = JoinEvent(new_device, clients, "device")
    start = len(state.transcript.events)
    max_rounds = 0
    relays: set[str] = set()
    for j in range(1, clients + 1):
        plan = {0: new_device}
        for pos, dev in enumerate(first_neighbors, start=1):
            plan[pos] = dev
        comp = make_ghz(state, len(first_neighbors) + 1, owner_plan=plan, root_role="network-proxy")
        ev.qubits_created += comp.size
        ev.qubits_transmitted += len(first_neighbors)
        held = {dev: comp.leaves[pos - 1] for pos, dev in enumerate(first_neighbors, start=1)}
        from_new = set(first_neighbors)
        served = {new_device, *first_neighbors}
        frontier = list(first_neighbors)
        rounds = 1
        while frontier:
            next_frontier = []
            for dev in sorted(frontier):
                unserved = sorted(set(channels.get(dev, set())) & set(existing) - served)
                if not unserved:
                    continue
                relays.add(dev)
                plan = {0: dev, 1: dev}
                for pos, other in enumerate(unserved, start=2):
                    plan[pos] = other
                relay = make_ghz(state, len(unserved) + 2, owner_plan=plan, root_role="root")
                ev.qubits_created += relay.size
                ev.qubits_transmitted += len(unserved)
                purpose = "bell-attach" if dev in from_new else "bell"
                comp, _, _ = bell_merge(comp, held[dev], relay, relay.root, purpose=purpose)
                if dev in from_new:
                    ev.attach_measurements += 1
                else:
                    ev.bell_measurements += 1
                held[dev] = relay.leaves[0]
                for pos, other in enumerate(unserved, start=1):
                    held[other] = relay.leaves[pos]
                served.update(unserved)
                next_frontier.extend(unserved)
            frontier = next_frontier
            rounds += 1
        missing = set(existing) - served
        if missing:
            raise JoinError(f"channel graph is disconnected; unreachable devices: {sorted(missing)}")
        max_rounds = max(max_rounds, rounds)
        by_loc: dict[str, QubitId] = {}
        for leaf in comp.leaves:
            if leaf.location in by_loc:
                raise JoinError(f"device {leaf.location} holds two leaves of one copy")
            by_loc[leaf.location] = leaf
        net.copies[(new_device, j)] = CopyA(new_device, j, comp.root, by_loc, comp=comp)
    ev.rounds = max_rounds
    ev.relays = sorted(relays)
    net.device_order.append(new_device)
    net.c[new_device] = clients
    ev.event_range = (start, len(state.transcript.events))
    return ev


def qncp_decorated_join(
    state: GraphState,
    net: NetworkStateB,
    new_device: str,
    clients: int,
) -> JoinEvent:
    """Decorated join: one single-decorated GHZ of size 1 + sum(c) per new client.

    Each existing device CZ-attaches a fresh local decorator to each of its
    proxies and CZ-attaches the received leaf to it, extending every chain
    without disturbing the established network state.
    """
    if net.secure:
        raise JoinError("joins are unsupported for the secure decorated variant")
    if new_device in net.device_order:
        raise JoinError(f"device {new_device!r} is already part of the network")
    ev = JoinEvent(new_device, clients, "decorated")
    start = len(state.transcript.events)
    existing_clients = [
        (dev, l) for dev in net.device_order for l in range(1, net.c[dev] + 1)
    ]
    for j in range(1, clients + 1):
        me = (new_device, j)
        root = state.fresh_qubit(new_device, "network-proxy")
        ev.qubits_created += 1
        net.proxies[me] = root
        net.consumed[me] = False
        for other in existing_clients:
            d_edge = state.fresh_qubit(new_device, "decorator")
            leaf = state.fresh_qubit(other[0], "decorator")
            ev.qubits_created += 2
            ev.qubits_transmitted += 1
            state._adj[root].add(d_edge)
            state._adj[d_edge].add(root)
            state._adj[d_edge].add(leaf)
            state._adj[leaf].add(d_edge)
            d_local = state.fresh_qubit(other[0], "decorator")
            ev.qubits_created += 1
            state.apply_cz(d_local, net.proxies[other])
            state.apply_cz(leaf, d_local)
            key = (other, me) if other < me else (me, other)
            chain = [d_local, leaf, d_edge] if other < me else [d_edge, leaf, d_local]
            net.chains[key] = chain
    net.device_order.append(new_device)
    net.c[new_device] = clients
    ev.event_range = (start, len(state.transcript.events))
    return ev


def recount_from_transcript(state: GraphState, ev: JoinEvent) -> dict[str, int]:
    """Independent recount of a join's cost from its transcript slice."""
    lo, hi = ev.event_range
    created = transmitted = 0
    by_purpose: dict[str, int] = {}
    for e in state.transcript.events[lo:hi]:
        if e[0] == "create":
            created += 1
        elif e[0] == "measure":
            by_purpose[e[4]] = by_purpose.get(e[4], 0) + 1
    return {
        "qubits_created": created,
        "bell_measurements": by_purpose.get("bell", 0) // 2,
        "attach_measurements": by_purpose.get("bell-attach", 0) // 2,
    }
