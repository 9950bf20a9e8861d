"""Network-level simulation: topology, resource pools, request lifecycle.

One deterministic event queue drives provisioning, joins, and requests over a
single shared graph state.  Routers abstract their subnetwork as a device of
the parent network holding one slot per subnet client; cross-network requests
decompose into subnet fragments, a parent-level fragment, and teleport-style
swaps at the routers.  Everything is single-writer and replayable: the same
topology, seed, and event list produce identical transcripts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ghznet import accounting
from ghznet.arch.bell_d import ArchD
from ghznet.arch.common import (
    ClientKey,
    DeliveryResult,
    ProtocolError,
    Request,
    check_delivery,
    flush_delivery,
    teleport_via_link,
)
from ghznet.arch.decorated_b import ArchB, build_device_state_B
from ghznet.arch.ghz_a import ArchA, ResourceError, build_device_state_A
from ghznet.arch.hybrid_c import ArchC
from ghznet.arch.optimized import ArchOptimized
from ghznet.ghz import make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId
from ghznet import qncp


class TopologyError(ValueError):
    pass


@dataclass
class Device:
    name: str
    kind: str  # "switch" | "router"
    clients: int
    bridge: int = 0  # extra parent-level slots for side-by-side bridging


@dataclass
class Network:
    name: str
    devices: list[Device] = field(default_factory=list)
    channels: list[tuple[str, str]] = field(default_factory=list)
    qncp_server: str | None = None
    parents: list[tuple[str, str]] = field(default_factory=list)  # (parent net, via router)

    def device(self, name: str) -> Device | None:
        return next((d for d in self.devices if d.name == name), None)

    def client_total(self) -> int:
        return sum(d.clients for d in self.devices)


@dataclass
class NetworkTopology:
    architecture: str = "A"
    secure: bool = False
    hybrid_flavor: str = "devices-B"
    copies: int = 1
    embedded: bool = False
    tailored: bool = True
    networks: dict[str, Network] = field(default_factory=dict)

    def parent_nets(self) -> list[str]:
        children_parents = {p for net in self.networks.values() for p, _ in net.parents}
        roots = [n for n, net in self.networks.items() if not net.parents]
        return sorted(set(roots) | children_parents & set(self.networks))

    def find_device(self, name: str) -> tuple[str, Device]:
        for net_name in sorted(self.networks):
            d = self.networks[net_name].device(name)
            if d is not None:
                return net_name, d
        raise TopologyError(f"unknown device {name!r}")

    def network_of_client(self, client: ClientKey) -> str:
        net_name, dev = self.find_device(client[0])
        if not 1 <= client[1] <= dev.clients:
            raise TopologyError(f"device {client[0]} has no client {client[1]}")
        return net_name


def load_topology(desc: dict) -> NetworkTopology:
    """Validate a parsed topology description.

    Raises TopologyError on dangling references, client-to-client channels,
    unknown architectures, or multi-level recursion.
    """
    topo = NetworkTopology(
        architecture=desc.get("architecture", "A"),
        secure=bool(desc.get("secure", False)),
        hybrid_flavor=desc.get("hybrid", "devices-B"),
        copies=int(desc.get("copies", 1)),
        embedded=bool(desc.get("embedded", False)),
        tailored=bool(desc.get("tailored", True)),
    )
    if topo.architecture not in ("A", "B", "C", "D", "optimized"):
        raise TopologyError(f"unknown architecture {topo.architecture!r}")
    seen_devices: set[str] = set()
    for nd in desc["networks"]:
        net = Network(nd["name"])
        if net.name in topo.networks:
            raise TopologyError(f"duplicate network {net.name!r}")
        for dd in nd.get("devices", []):
            if dd["name"] in seen_devices:
                raise TopologyError(f"duplicate device {dd['name']!r}")
            if dd.get("kind", "switch") not in ("switch", "router"):
                raise TopologyError(f"unknown device kind {dd.get('kind')!r}")
            if dd.get("clients", 0) < 0:
                raise TopologyError(f"negative client count on {dd['name']!r}")
            seen_devices.add(dd["name"])
            net.devices.append(
                Device(dd["name"], dd.get("kind", "switch"), dd.get("clients", 0), dd.get("bridge", 0))
            )
        for a, b in nd.get("channels", []):
            for x in (a, b):
                if "." in x:
                    raise TopologyError(
                        f"channel endpoint {x!r} is a client; clients never share channels"
                    )
                if net.device(x) is None:
                    raise TopologyError(f"channel references unknown device {x!r} in {net.name}")
            net.channels.append((a, b))
        if nd.get("qncp_server"):
            if net.device(nd["qncp_server"]) is None:
                raise TopologyError(f"QNCP server {nd['qncp_server']!r} is not a device of {net.name}")
            net.qncp_server = nd["qncp_server"]
        for parent, via in nd.get("parents", []):
            dev = net.device(via)
            if dev is None or dev.kind != "router":
                raise TopologyError(f"network {net.name} joins {parent} via {via!r}, which is not its router")
            net.parents.append((parent, via))
        topo.networks[net.name] = net
    for net in topo.networks.values():
        for parent, _ in net.parents:
            if parent not in topo.networks:
                raise TopologyError(f"network {net.name} references unknown parent {parent!r}")
            if topo.networks[parent].parents:
                raise TopologyError("recursion deeper than one level is not supported")
    if not topo.networks:
        raise TopologyError("topology declares no networks")
    return topo


_ARCH_FACTORY = {
    "A": lambda t: ArchA(secure=t.secure, embedded=t.embedded, tailored=t.tailored),
    "B": lambda t: ArchB(secure=t.secure),
    "C": lambda t: ArchC(flavor=t.hybrid_flavor, secure=t.secure, tailored=t.tailored),
    "D": lambda t: ArchD(),
    "optimized": lambda t: ArchOptimized(copies=t.copies),
}


@dataclass
class PoolNetwork:
    arch: object
    prov: object
    device_order: list[str]
    c: dict[str, int]
    next_bridge: dict[str, int] = field(default_factory=dict)  # router slot allocation


@dataclass
class RequestOutcome:
    request: Request
    status: str  # served | failed | rejected
    reason: str = ""
    delivery: DeliveryResult | None = None
    client_qubits: dict[ClientKey, QubitId] = field(default_factory=dict)
    event_range: tuple[int, int] = (0, 0)


class ResourcePool:
    """All provisioned components over one shared graph state."""

    def __init__(self, topology: NetworkTopology, seed: int | None = 0, oracle_cap: int = 12):
        self.topology = topology
        self.state = GraphState(seed=seed)
        self.oracle_cap = oracle_cap
        self.nets: dict[str, PoolNetwork] = {}
        self.outcomes: list[RequestOutcome] = []
        self.joins: list[qncp.JoinEvent] = []
        self._provision()

    # -- provisioning -------------------------------------------------------

    def _effective_counts(self, net_name: str) -> tuple[list[str], dict[str, int]]:
        topo = self.topology
        net = topo.networks[net_name]
        order = [d.name for d in net.devices]
        counts: dict[str, int] = {}
        via_routers = {via for _, via in net.parents}
        remote_total = sum(
            n.client_total() for name, n in topo.networks.items() if name != net_name
        )
        for d in net.devices:
            if d.name in via_routers:
                # router inside its own subnetwork: slots for cross-network endpoints
                counts[d.name] = d.clients + remote_total
            else:
                counts[d.name] = d.clients
        # routers of child networks join the parent as aggregation devices
        hosted = sorted(
            (via, child)
            for child, cnet in topo.networks.items()
            for parent, via in cnet.parents
            if parent == net_name
        )
        for via, child in hosted:
            order.append(via)
            bridge = topo.networks[child].device(via).bridge
            counts[via] = topo.networks[child].client_total() + bridge
        return order, counts

    def _provision(self) -> None:
        topo = self.topology
        self.state.transcript.note("provision")
        for net_name in sorted(topo.networks):
            order, counts = self._effective_counts(net_name)
            if not order:
                raise TopologyError(f"network {net_name} has no devices")
            arch = _ARCH_FACTORY[topo.architecture](topo)
            prov = arch.provision(self.state, order, counts)
            self.nets[net_name] = PoolNetwork(arch, prov, order, counts)
        self.state.transcript.note("provision-done")

    # -- requests ------------------------------------------------------------

    def submit_request(self, request: Request) -> RequestOutcome:
        lo = len(self.state.transcript.events)
        try:
            delivery = self._serve(request)
            outcome = RequestOutcome(
                request, "served", delivery=delivery, client_qubits=delivery.client_qubits
            )
        except ResourceError as exc:
            self.state.transcript.note(f"end-request {request.id} failed")
            outcome = RequestOutcome(request, "failed", reason=str(exc))
        outcome.event_range = (lo, len(self.state.transcript.events))
        self.outcomes.append(outcome)
        return outcome

    def submit_parallel(self, requests: list[Request]) -> list[RequestOutcome]:
        """Serve disjoint-client requests from one provisioning, id order."""
        taken: set[ClientKey] = set()
        out = []
        for req in sorted(requests, key=lambda r: r.id):
            overlap = taken & set(req.clients)
            if overlap:
                o = RequestOutcome(
                    req, "rejected",
                    reason="clients busy in parallel group: "
                    + ",".join(f"{d}.{j}" for d, j in sorted(overlap)),
                )
                self.outcomes.append(o)
                out.append(o)
                continue
            taken.update(req.clients)
            out.append(self.submit_request(req))
        return out

    def _serve(self, request: Request) -> DeliveryResult:
        topo = self.topology
        by_net: dict[str, list[ClientKey]] = {}
        for cl_ in request.clients:
            by_net.setdefault(topo.network_of_client(cl_), []).append(cl_)
        if len(by_net) == 1:
            net_name = next(iter(by_net))
            pool = self.nets[net_name]
            result = pool.arch.serve(self.state, pool.prov, request)
            self._oracle_check(result, request)
            return result
        return self._serve_cross(request, by_net)

    def _serve_cross(self, request: Request, by_net: dict[str, list[ClientKey]]) -> DeliveryResult:
        """Cross-network service: subnet fragments, a parent fragment, router swaps.

        Each cross edge gets a dedicated wire through its endpoint's router:
        one subnet-level slot carrying the edge down to the client and one
        parent-level slot carrying it across.  The router then runs the
        connecting procedure on the two degree-1 slot qubits, splicing the
        chains into the requested edge.
        """
        topo = self.topology
        if request.kind == "ghz":
            raise ProtocolError("cross-network GHZ requests are not supported")
        net_of = {c: n for n, cls in by_net.items() for c in cls}
        cross = [e for e in request.target_edges() if net_of[e[0]] != net_of[e[1]]]
        parents_used = set()
        for n in by_net:
            parents = topo.networks[n].parents
            parents_used.add(parents[0][0] if parents else n)
        if len(parents_used) > 1:
            raise ProtocolError(
                "side-by-side bridging across multiple parent networks is configuration-only; "
                "requests must stay within one parent hierarchy"
            )
        parent_name = next(iter(parents_used))
        parent_pool = self.nets[parent_name]

        sub_extra: dict[str, list] = {n: [] for n in by_net}
        parent_clients: set[ClientKey] = set()
        parent_edges: list[tuple[ClientKey, ClientKey]] = []
        swaps: list[tuple[ClientKey, ClientKey]] = []  # (subnet slot, parent slot)

        def wire_endpoint(x: ClientKey) -> ClientKey:
            n = net_of[x]
            if not topo.networks[n].parents:
                return x  # direct parent-level client, no swap needed
            via = topo.networks[n].parents[0][1]
            sub_slot = self._alloc_slot(self.nets[n], n, via)
            parent_slot = self._alloc_slot(parent_pool, parent_name, via)
            sub_extra[n].append((x, sub_slot))
            swaps.append((sub_slot, parent_slot))
            return parent_slot

        for a, b in sorted(cross):
            pa, pb = wire_endpoint(a), wire_endpoint(b)
            parent_clients.update((pa, pb))
            parent_edges.append((pa, pb) if pa < pb else (pb, pa))

        delivered: dict[ClientKey, QubitId] = {}
        slot_qubits: dict[ClientKey, QubitId] = {}
        for n in sorted(by_net):
            if not topo.networks[n].parents:
                continue  # root-level clients are served in the parent fragment
            clients = list(by_net[n])
            frag_edges = [
                e for e in request.target_edges() if net_of[e[0]] == n and net_of[e[1]] == n
            ]
            for x, slot in sub_extra[n]:
                clients.append(slot)
                frag_edges.append((x, slot))
            frag = Request(f"{request.id}@{n}", clients, frag_edges)
            pool = self.nets[n]
            res = pool.arch.serve(self.state, pool.prov, frag)
            for c in by_net[n]:
                delivered[c] = res.client_qubits[c]
            for _, slot in sub_extra[n]:
                slot_qubits[slot] = res.client_qubits[slot]
        root_clients = by_net.get(parent_name, [])
        parent_clients.update(root_clients)
        parent_edges.extend(
            e
            for e in request.target_edges()
            if net_of[e[0]] == parent_name and net_of[e[1]] == parent_name
        )
        parent_frag = Request(f"{request.id}@{parent_name}", sorted(parent_clients), parent_edges)
        res = parent_pool.arch.serve(self.state, parent_pool.prov, parent_frag)
        for x in request.clients:
            if net_of[x] == parent_name:
                delivered[x] = res.client_qubits[x]
        for sub_slot, parent_slot in swaps:
            self.state.transcript.note(f"bridge {request.id} at {sub_slot[0]}")
            self.state.connect_wire(slot_qubits[sub_slot], res.client_qubits[parent_slot])
        flush_delivery(self.state, delivered)
        final = DeliveryResult(request.id, delivered)
        check_delivery(self.state, final, request.target_edges())
        self._oracle_check(final, request)
        return final

    def _alloc_slot(self, pool: PoolNetwork, net_name: str, via: str) -> ClientKey:
        dev = self.topology.networks[net_name].device(via)
        declared = dev.clients if dev is not None else 0
        nxt = pool.next_bridge.setdefault(via, declared + 1)
        cap = pool.c.get(via, 0)
        if nxt > cap:
            raise ResourceError([f"bridge slots at router {via} exhausted ({cap} provisioned)"])
        pool.next_bridge[via] = nxt + 1
        return (via, nxt)

    def _oracle_check(self, result: DeliveryResult, request: Request) -> None:
        if self.oracle_cap <= 0 or len(result.client_qubits) > self.oracle_cap:
            return
        from ghznet.oracle import equal_up_to_phase, graph_vector, realize

        cq = result.client_qubits
        want = graph_vector(sorted(cq.values()), [(cq[a], cq[b]) for a, b in request.target_edges()])
        got = realize(self.state, sorted(cq.values()))
        if not equal_up_to_phase(got, want):
            raise ProtocolError(f"request {request.id}: delivered state failed the oracle check")

    # -- joins ----------------------------------------------------------------

    def apply_join(self, device: str, clients: int, mode: str, network: str | None = None) -> qncp.JoinEvent:
        topo = self.topology
        net_name = network or sorted(topo.networks)[0]
        if net_name not in topo.networks:
            raise TopologyError(f"unknown network {net_name!r}")
        net = topo.networks[net_name]
        if any(net.device(device) for net in topo.networks.values()):
            raise qncp.JoinError(f"device {device!r} already exists")
        pool = self.nets[net_name]
        arch_name = topo.architecture
        self.state.transcript.note(f"join {device} clients={clients} mode={mode}")
        if arch_name == "A" and mode == "server":
            if net.qncp_server is None:
                raise qncp.JoinError(f"network {net_name} has no QNCP server")
            if pool.prov.network is None:
                raise qncp.JoinError("server joins need an established network state")
            ev = qncp.qncp_server_join(self.state, pool.prov.network, device, clients, net.qncp_server)
        elif arch_name == "A" and mode == "device":
            channels: dict[str, set[str]] = {}
            for a, b in net.channels:
                channels.setdefault(a, set()).add(b)
                channels.setdefault(b, set()).add(a)
            if pool.prov.network is None:
                raise qncp.JoinError("device joins need an established network state")
            ev = qncp.qncp_device_join(self.state, pool.prov.network, device, clients, channels)
        elif arch_name == "B" and mode == "decorated":
            if pool.prov.network is None:
                raise qncp.JoinError("decorated joins need an established network state")
            ev = qncp.qncp_decorated_join(self.state, pool.prov.network, device, clients)
        else:
            raise qncp.JoinError(
                f"join mode {mode!r} is unsupported for architecture {arch_name}"
                + (" (secure)" if topo.secure else "")
            )
        # the new device generates its own device state and client links locally
        if arch_name == "A":
            pool.prov.devices[device] = build_device_state_A(
                self.state, device, clients, embedded=topo.embedded, networked=True
            )
            if not topo.embedded:
                for j in range(1, clients + 1):
                    pool.prov.links[(device, j)] = make_ghz(
                        self.state, 2, owner_plan={0: device, 1: f"{device}.c{j}"}, root_role="plain"
                    )
        else:
            pool.prov.devices[device] = build_device_state_B(self.state, device, clients, networked=True)
        net.devices.append(Device(device, "switch", clients))
        pool.device_order.append(device)
        pool.c[device] = clients
        self.joins.append(ev)
        self.state.transcript.note(f"join-done {device}")
        return ev

    # -- reporting -------------------------------------------------------------

    def request_report(self, outcome: RequestOutcome) -> accounting.ResourceReport:
        return accounting.measured_counts(
            self.state.transcript,
            outcome.event_range,
            architecture=self.topology.architecture,
            level=f"request:{outcome.request.id}",
        )
