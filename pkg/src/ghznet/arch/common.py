"""Shared request/delivery plumbing used by every architecture."""

from __future__ import annotations

from dataclasses import dataclass, field

from ghznet import clifford as cl
from ghznet.graphstate import GraphError, GraphState
from ghznet.ids import QubitId

# A client is addressed by (device name, 1-based index within the device).
ClientKey = tuple[str, int]


class ProtocolError(GraphError):
    pass


def client_location(device: str, index: int) -> str:
    return f"{device}.c{index}"


@dataclass
class Request:
    id: str
    clients: list[ClientKey]
    edges: list[tuple[ClientKey, ClientKey]] = field(default_factory=list)
    kind: str = "graph"  # "graph" | "ghz"
    group: str | None = None

    def __post_init__(self) -> None:
        self.clients = sorted(set(self.clients))
        cset = set(self.clients)
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ProtocolError(f"request {self.id}: self edge at {a}")
            if a not in cset or b not in cset:
                raise ProtocolError(f"request {self.id}: edge endpoint outside client set")
            norm.add((a, b) if a < b else (b, a))
        self.edges = sorted(norm)
        if self.kind == "ghz" and self.edges:
            raise ProtocolError(f"request {self.id}: ghz requests carry no edge list")

    def target_edges(self) -> list[tuple[ClientKey, ClientKey]]:
        """The requested adjacency; GHZ requests mean the star on the client set."""
        if self.kind == "ghz":
            root = self.clients[0]
            return [(root, c) for c in self.clients[1:]]
        return self.edges

    def devices(self) -> list[str]:
        return sorted({d for d, _ in self.clients})

    def clients_at(self, device: str) -> list[ClientKey]:
        return [c for c in self.clients if c[0] == device]


@dataclass
class DeliveryResult:
    request_id: str
    client_qubits: dict[ClientKey, QubitId]
    snapshots: list[tuple[str, str]] = field(default_factory=list)

    def delivered_edges(self, state: GraphState) -> list[tuple[ClientKey, ClientKey]]:
        inv = {q: c for c, q in self.client_qubits.items()}
        out = set()
        for c, q in self.client_qubits.items():
            for w in state.neighbors(q):
                if w not in inv:
                    raise ProtocolError(f"delivered qubit {q} still entangled with {w}")
                pair = (c, inv[w]) if c < inv[w] else (inv[w], c)
                out.add(pair)
        return sorted(out)


def cut_leaf(state: GraphState, leaf: QubitId, outcome: int | None = None) -> None:
    """Remove an unused star leaf: rotate to graph form, then Z-measure."""
    state.resolve_frame(leaf, cl.I)
    state.measure(leaf, "Z", outcome, purpose="cut")


def merge_into(state: GraphState, proxy: QubitId, target_leaf: QubitId, outcome: int | None = None) -> None:
    """Merging procedure: CNOT(proxy -> leaf) then Z-measure the leaf.

    Moves the leaf's neighborhood onto the proxy; the leaf is consumed.
    Accumulated corrections on both operands are cleared first, as the
    entangling gate demands.
    """
    if not state.frame(proxy).is_diagonal:
        state.resolve_frame(proxy, cl.I)
    state.resolve_frame(target_leaf, cl.I)
    state.cnot_merge(proxy, target_leaf)
    state.measure(target_leaf, "Z", outcome, purpose="merge")


def connect_ends(state: GraphState, a: QubitId, b: QubitId) -> None:
    """Connecting procedure on two degree-1 wire ends."""
    state.connect_wire(a, b)


def teleport_via_link(state: GraphState, proxy: QubitId, link_root: QubitId, client_q: QubitId) -> None:
    """Teleport the proxy onto the client qubit through a shared Bell pair.

    Bell measurement of (proxy, link half): CNOT, X on the proxy with the
    client qubit as pivot, Z on the device half.
    """
    state.resolve_frame(proxy, cl.I)
    state.resolve_frame(link_root, cl.I)
    state.cnot_merge(proxy, link_root)
    state.measure(link_root, "Z", purpose="teleport")
    state.measure(proxy, "X", neighbor=client_q, purpose="teleport")


def handoff_embedded(state: GraphState, proxy: QubitId, client_q: QubitId) -> None:
    """Embedded-client handoff: one X measurement moves the proxy onto its client leaf."""
    state.resolve_frame(proxy, cl.I)
    state.measure(proxy, "X", neighbor=client_q, purpose="teleport")


def flush_delivery(state: GraphState, client_qubits: dict[ClientKey, QubitId]) -> None:
    """Apply all accumulated corrections so each client qubit ends frame-free."""
    for _, q in sorted(client_qubits.items()):
        state.resolve_frame(q, cl.I)


def check_delivery(
    state: GraphState,
    result: DeliveryResult,
    target: list[tuple[ClientKey, ClientKey]],
) -> None:
    got = result.delivered_edges(state)
    want = sorted((a, b) if a < b else (b, a) for a, b in target)
    if got != want:
        raise ProtocolError(
            f"request {result.request_id}: delivered adjacency {got} != requested {want}"
        )
