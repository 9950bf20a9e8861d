"""GHZ-only optimized network: one GHZ_m across devices plus one local
GHZ_{c_i + 1} per device, nu copies of each for parallel requests.

Serving a GHZ request over any client subset fuses the participating device
stars into the network star, removes every non-participant by a graph-level Z
measurement, and re-roots the remaining star onto a client qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

from ghznet import clifford as cl
from ghznet.arch.common import (
    ClientKey,
    DeliveryResult,
    ProtocolError,
    Request,
    check_delivery,
    client_location,
    cut_leaf,
    flush_delivery,
)
from ghznet.arch.ghz_a import ResourceError
from ghznet.ghz import GhzComponent, _restar, fusion_merge, make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId


@dataclass
class GhzCopySet:
    network: GhzComponent
    network_qubit_at: dict[str, QubitId]
    device_star: dict[str, GhzComponent]
    client_leaf: dict[ClientKey, QubitId]
    consumed: bool = False


@dataclass
class ProvisionOptimized:
    device_order: list[str]
    c: dict[str, int]
    copies: list[GhzCopySet]


def build_optimized_ghz(
    state: GraphState,
    device_order: list[str],
    c: dict[str, int],
    copies: int = 1,
) -> ProvisionOptimized:
    if len(device_order) < 2:
        raise ProtocolError(f"optimized network needs at least 2 devices, got {len(device_order)}")
    if copies < 1:
        raise ProtocolError(f"need at least one copy, got {copies}")
    out = ProvisionOptimized(list(device_order), dict(c), [])
    for _ in range(copies):
        plan = {i: dev for i, dev in enumerate(device_order)}
        net = make_ghz(state, len(device_order), owner_plan=plan, root_role="network-proxy")
        at = {device_order[0]: net.root}
        for i, dev in enumerate(device_order[1:], start=1):
            at[dev] = net.leaves[i - 1]
        stars = {}
        leafmap = {}
        for dev in device_order:
            plan = {0: dev}
            for j in range(1, c[dev] + 1):
                plan[j] = client_location(dev, j)
            star = make_ghz(state, c[dev] + 1, owner_plan=plan, root_role="proxy")
            stars[dev] = star
            for j in range(1, c[dev] + 1):
                leafmap[(dev, j)] = star.leaves[j - 1]
                state.set_role(star.leaves[j - 1], "client-qubit")
        out.copies.append(GhzCopySet(net, at, stars, leafmap))
    return out


def _remove_star_vertex(state: GraphState, comp_root: QubitId, victim: QubitId) -> QubitId:
    """Drop one vertex from a star component, re-rooting first if it is the root."""
    root = comp_root
    if victim == root:
        members = sorted(state.component_of(root))
        others = [v for v in members if v != victim]
        root = others[0]
        _restar(state, members, root)
    cut_leaf(state, victim)
    return root


class ArchOptimized:
    name = "optimized"

    def __init__(self, copies: int = 1):
        self.copies = copies

    def provision(self, state: GraphState, device_order: list[str], c: dict[str, int]) -> ProvisionOptimized:
        return build_optimized_ghz(state, device_order, c, self.copies)

    def serve(self, state: GraphState, prov: ProvisionOptimized, request: Request) -> DeliveryResult:
        if request.kind != "ghz":
            raise ProtocolError(
                f"request {request.id}: the optimized GHZ network serves GHZ requests only"
            )
        copy = next((cs for cs in prov.copies if not cs.consumed), None)
        if copy is None:
            raise ResourceError([f"all {len(prov.copies)} GHZ copies consumed"])
        copy.consumed = True
        state.transcript.note(f"begin-request {request.id} arch=optimized")
        participating = request.devices()
        comp = copy.network
        root = comp.root
        for dev in participating:
            merged, _ = fusion_merge(comp, copy.network_qubit_at[dev], copy.device_star[dev], copy.device_star[dev].root)
            comp = merged
            root = comp.root
        # drop non-participating network qubits and client leaves
        for dev in prov.device_order:
            if dev not in participating and copy.network_qubit_at[dev] in state:
                root = _remove_star_vertex(state, root, copy.network_qubit_at[dev])
        for key in sorted(copy.client_leaf):
            if key not in request.clients and copy.client_leaf[key] in state:
                root = _remove_star_vertex(state, root, copy.client_leaf[key])
        # drop the internal relay qubits (fused network qubits and the old root)
        members = sorted(state.component_of(root))
        client_qs = {copy.client_leaf[k] for k in request.clients}
        internals = [v for v in members if v not in client_qs]
        target_root = copy.client_leaf[request.clients[0]]
        _restar(state, members, target_root)
        root = target_root
        for v in internals:
            root = _remove_star_vertex(state, root, v)
        delivered = {k: copy.client_leaf[k] for k in request.clients}
        flush_delivery(state, delivered)
        result = DeliveryResult(request.id, delivered)
        check_delivery(state, result, request.target_edges())
        state.transcript.note(f"end-request {request.id} served")
        return result
