"""Architecture B: fully connected decorated device states and the m-partite
decorated network state.

Every potential edge carries decorator qubits; a Y measurement of a decorator
establishes the edge, a Z measurement deletes it.  At the network level each
inter-partition edge is decorated once (trusted) or three times (secure: two
qubits owned by the earlier device for its forward edges plus one owned by the
later device), which keeps the overall state two-colorable and lets every
device cut unwanted edges locally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ghznet import clifford as cl
from ghznet.arch.common import (
    ClientKey,
    DeliveryResult,
    ProtocolError,
    Request,
    check_delivery,
    client_location,
    flush_delivery,
    handoff_embedded,
    merge_into,
)
from ghznet.arch.ghz_a import ResourceError
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId


@dataclass
class DeviceStateB:
    device: str
    n: int
    proxies: dict[int, QubitId]
    client_qubits: dict[int, QubitId]
    decorators: dict[tuple[int, int], QubitId]
    consumed: dict[int, bool]

    def qubit_count(self) -> int:
        """Stored qubits: proxies plus decorators (client halves sit at the clients)."""
        return len(self.proxies) + len(self.decorators)


def build_device_state_B(state: GraphState, device: str, n: int, networked: bool = False) -> DeviceStateB:
    if n < 2 and not networked:
        raise ProtocolError(f"decorated device state needs at least 2 clients, got {n}")
    if n < 1:
        raise ProtocolError(f"decorated device state needs at least 1 client, got {n}")
    dev = DeviceStateB(device, n, {}, {}, {}, {j: False for j in range(1, n + 1)})
    for j in range(1, n + 1):
        p = state.fresh_qubit(device, "proxy")
        c = state.fresh_qubit(client_location(device, j), "client-qubit")
        state._adj[p].add(c)
        state._adj[c].add(p)
        dev.proxies[j] = p
        dev.client_qubits[j] = c
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            d = state.fresh_qubit(device, "decorator")
            state._adj[dev.proxies[j]].add(d)
            state._adj[d].add(dev.proxies[j])
            state._adj[dev.proxies[k]].add(d)
            state._adj[d].add(dev.proxies[k])
            dev.decorators[(j, k)] = d
    return dev


@dataclass
class NetworkStateB:
    device_order: list[str]
    c: dict[str, int]
    secure: bool
    proxies: dict[ClientKey, QubitId]
    chains: dict[tuple[ClientKey, ClientKey], list[QubitId]]
    consumed: dict[ClientKey, bool] = field(default_factory=dict)

    def pos(self, device: str) -> int:
        return self.device_order.index(device) + 1

    def qubit_count(self) -> int:
        return len(self.proxies) + sum(len(ch) for ch in self.chains.values())

    def chain_of(self, a: ClientKey, b: ClientKey) -> list[QubitId]:
        return self.chains[(a, b) if a < b else (b, a)]


def build_network_state_B(
    state: GraphState,
    device_order: list[str],
    c: dict[str, int],
    secure: bool = False,
) -> NetworkStateB:
    if len(device_order) < 2:
        raise ProtocolError(f"network state needs at least 2 devices, got {len(device_order)}")
    net = NetworkStateB(list(device_order), dict(c), secure, {}, {})
    for dev in device_order:
        for j in range(1, c[dev] + 1):
            net.proxies[(dev, j)] = state.fresh_qubit(dev, "network-proxy")
            net.consumed[(dev, j)] = False
    for ia, dev_a in enumerate(device_order):
        for dev_b in device_order[ia + 1 :]:
            for j in range(1, c[dev_a] + 1):
                for l in range(1, c[dev_b] + 1):
                    a, b = (dev_a, j), (dev_b, l)
                    if secure:
                        # two decorators owned by the earlier device (forward edge),
                        # one by the later device (backward edge)
                        chain = [
                            state.fresh_qubit(dev_a, "decorator"),
                            state.fresh_qubit(dev_a, "decorator"),
                            state.fresh_qubit(dev_b, "decorator"),
                        ]
                    else:
                        chain = [state.fresh_qubit(dev_b, "decorator")]
                    path = [net.proxies[a], *chain, net.proxies[b]]
                    for u, v in zip(path, path[1:]):
                        state._adj[u].add(v)
                        state._adj[v].add(u)
                    key = (a, b) if a < b else (b, a)
                    net.chains[key] = chain
    return net


def contract_chain(state: GraphState, chain: list[QubitId]) -> None:
    """Keep an edge: Y-measure every decorator along the chain, in path order.

    Each measurement's byproducts are applied before the next so the wire
    keeps shortening by the plain graph rule.
    """
    for q in chain:
        state.resolve_frame(q, cl.I)
        state.measure(q, "Y", purpose="routing")


def cut_chain(state: GraphState, chain: list[QubitId]) -> None:
    """Delete an edge: Z-measure its decorators (each one local to its owner)."""
    for q in chain:
        if q in state:
            state.resolve_frame(q, cl.I)
            state.measure(q, "Z", purpose="routing-cut")


def route_network_B(state: GraphState, net: NetworkStateB, request: Request) -> None:
    wanted = {tuple(sorted(e)) for e in request.target_edges() if e[0][0] != e[1][0]}
    participating = set(request.clients)
    for key in sorted(net.chains):
        a, b = key
        if a not in participating and b not in participating:
            continue
        chain = net.chains[key]
        if not chain or chain[0] not in state:
            if key in wanted:
                raise ResourceError([f"network decorators for edge {a}-{b}"])
            continue
        if key in wanted:
            contract_chain(state, chain)
        else:
            cut_chain(state, chain)
        net.chains[key] = []


def transfer_to_device_proxy(state: GraphState, device_proxy: QubitId, network_proxy: QubitId) -> None:
    """Move the routed network adjacency onto the device proxy (CNOT merge + Z)."""
    merge_into(state, device_proxy, network_proxy)


def route_device_B(state: GraphState, dev: DeviceStateB, request: Request) -> None:
    local = {j for d, j in request.clients if d == dev.device}
    wanted = {
        tuple(sorted((a[1], b[1])))
        for a, b in request.target_edges()
        if a[0] == dev.device and b[0] == dev.device
    }
    for (j, k) in sorted(dev.decorators):
        if j not in local and k not in local:
            continue
        d = dev.decorators[(j, k)]
        if d is None:
            if (j, k) in wanted:
                raise ResourceError([f"device decorator {dev.device}:{j}-{k}"])
            continue
        state.resolve_frame(d, cl.I)
        if (j, k) in wanted:
            state.measure(d, "Y", purpose="routing")
        else:
            state.measure(d, "Z", purpose="routing-cut")
        dev.decorators[(j, k)] = None


def run_request_B(
    state: GraphState,
    devices: dict[str, DeviceStateB],
    net: NetworkStateB | None,
    request: Request,
) -> dict[ClientKey, QubitId]:
    if net is not None:
        route_network_B(state, net, request)
        for me in request.clients:
            nq = net.proxies[me]
            transfer_to_device_proxy(state, devices[me[0]].proxies[me[1]], nq)
            net.consumed[me] = True
    delivered: dict[ClientKey, QubitId] = {}
    for dev_name in request.devices():
        dev = devices[dev_name]
        route_device_B(state, dev, request)
        for _, j in request.clients_at(dev_name):
            handoff_embedded(state, dev.proxies[j], dev.client_qubits[j])
            dev.consumed[j] = True
            delivered[(dev_name, j)] = dev.client_qubits[j]
    return delivered


@dataclass
class ProvisionB:
    devices: dict[str, DeviceStateB]
    network: NetworkStateB | None


class ArchB:
    name = "B"

    def __init__(self, secure: bool = False):
        self.secure = secure

    def provision(self, state: GraphState, device_order: list[str], c: dict[str, int]) -> ProvisionB:
        networked = len(device_order) > 1
        devices = {d: build_device_state_B(state, d, c[d], networked=networked) for d in device_order}
        network = (
            build_network_state_B(state, device_order, c, secure=self.secure)
            if len(device_order) > 1
            else None
        )
        return ProvisionB(devices, network)

    def check_available(self, prov: ProvisionB, request: Request) -> None:
        deficits = []
        for dev_name, j in request.clients:
            dev = prov.devices.get(dev_name)
            if dev is None or j > dev.n:
                deficits.append(f"unknown client {dev_name}.{j}")
            elif dev.consumed[j]:
                deficits.append(f"device proxy for {dev_name}.{j}")
        for a, b in request.target_edges():
            if a[0] == b[0]:
                dev = prov.devices.get(a[0])
                if dev and dev.decorators.get(tuple(sorted((a[1], b[1]))), "missing") is None:
                    deficits.append(f"device decorator {a[0]}:{a[1]}-{b[1]}")
            elif prov.network is None:
                deficits.append(f"no network state for edge {a}-{b}")
            elif not prov.network.chain_of(a, b):
                deficits.append(f"network decorators for edge {a}-{b}")
        if prov.network is not None:
            for me in request.clients:
                if prov.network.consumed.get(me, False):
                    deficits.append(f"network proxy for {me[0]}.{me[1]}")
        if deficits:
            raise ResourceError(sorted(set(deficits)))

    def serve(self, state: GraphState, prov: ProvisionB, request: Request) -> DeliveryResult:
        self.check_available(prov, request)
        state.transcript.note(f"begin-request {request.id} arch=B")
        delivered = run_request_B(state, prov.devices, prov.network, request)
        state.transcript.note(f"phase {request.id} post-generation")
        flush_delivery(state, delivered)
        result = DeliveryResult(request.id, delivered)
        check_delivery(state, result, request.target_edges())
        state.transcript.note(f"end-request {request.id} served")
        return result
