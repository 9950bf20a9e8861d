"""Architecture D: the bipartite baseline built entirely from Bell pairs.

One pair per potential edge: n(n-1)/2 local pairs inside each device and
c_i * c_k pairs between each device pair.  A request keeps the pairs of the
requested edges and CNOT-merges each client's kept ends into a single proxy,
which is then teleported to the client.
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
    flush_delivery,
    merge_into,
    teleport_via_link,
)
from ghznet.arch.ghz_a import ResourceError
from ghznet.ghz import GhzComponent, make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId

PairKey = tuple[ClientKey, ClientKey]


@dataclass
class BellNetworkState:
    device_order: list[str]
    c: dict[str, int]
    pairs: dict[PairKey, tuple[QubitId, QubitId] | None]

    def pair_count(self) -> int:
        return sum(1 for v in self.pairs.values() if v is not None)

    def qubit_count(self) -> int:
        return 2 * self.pair_count()


def _pair_key(a: ClientKey, b: ClientKey) -> PairKey:
    return (a, b) if a < b else (b, a)


def build_network_state_D(state: GraphState, device_order: list[str], c: dict[str, int]) -> BellNetworkState:
    if len(device_order) < 2:
        raise ProtocolError(f"network state needs at least 2 devices, got {len(device_order)}")
    net = BellNetworkState(list(device_order), dict(c), {})
    for ia, dev_a in enumerate(device_order):
        for dev_b in device_order[ia + 1 :]:
            for j in range(1, c[dev_a] + 1):
                for l in range(1, c[dev_b] + 1):
                    comp = make_ghz(state, 2, owner_plan={0: dev_a, 1: dev_b}, root_role="plain")
                    net.pairs[_pair_key((dev_a, j), (dev_b, l))] = (comp.root, comp.leaves[0])
    return net


@dataclass
class DevicePairsD:
    device: str
    n: int
    pairs: dict[tuple[int, int], tuple[QubitId, QubitId] | None]

    def qubit_count(self) -> int:
        return 2 * sum(1 for v in self.pairs.values() if v is not None)


def build_device_pairs_D(state: GraphState, device: str, n: int) -> DevicePairsD:
    dev = DevicePairsD(device, n, {})
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            comp = make_ghz(state, 2, location=device, root_role="plain")
            dev.pairs[(j, k)] = (comp.root, comp.leaves[0])
    return dev


@dataclass
class ProvisionD:
    devices: dict[str, DevicePairsD]
    network: BellNetworkState | None
    links: dict[ClientKey, GhzComponent]


def _end_for(prov: ProvisionD, me: ClientKey, partner: ClientKey) -> QubitId | None:
    if me[0] == partner[0]:
        pair = prov.devices[me[0]].pairs.get(tuple(sorted((me[1], partner[1]))))
    else:
        pair = (prov.network.pairs if prov.network else {}).get(_pair_key(me, partner))
    if pair is None:
        return None
    a, b = _pair_key(me, partner)
    return pair[0] if me == a else pair[1]


def run_request_D(
    state: GraphState,
    prov: ProvisionD,
    request: Request,
) -> dict[ClientKey, QubitId]:
    partners: dict[ClientKey, list[ClientKey]] = {m: [] for m in request.clients}
    for a, b in request.target_edges():
        partners[a].append(b)
        partners[b].append(a)
    proxies: dict[ClientKey, QubitId] = {}
    for me in request.clients:
        mine = sorted(partners[me])
        if not mine:
            proxies[me] = state.fresh_qubit(me[0], "proxy")
            continue
        ends = [_end_for(prov, me, p) for p in mine]
        proxy = ends[0]
        state.resolve_frame(proxy, cl.I)
        state.set_role(proxy, "proxy")
        for e in ends[1:]:
            merge_into(state, proxy, e)
        proxies[me] = proxy
    for a, b in request.target_edges():
        if a[0] == b[0]:
            prov.devices[a[0]].pairs[tuple(sorted((a[1], b[1])))] = None
        else:
            prov.network.pairs[_pair_key(a, b)] = None
    delivered: dict[ClientKey, QubitId] = {}
    for me in request.clients:
        link = prov.links[me]
        client_q = link.leaves[0]
        teleport_via_link(state, proxies[me], link.root, client_q)
        link.stale = True
        state.set_role(client_q, "client-qubit")
        delivered[me] = client_q
    return delivered


class ArchD:
    name = "D"

    def provision(self, state: GraphState, device_order: list[str], c: dict[str, int]) -> ProvisionD:
        devices = {d: build_device_pairs_D(state, d, c[d]) for d in device_order}
        network = build_network_state_D(state, device_order, c) if len(device_order) > 1 else None
        links = {
            (d, j): make_ghz(state, 2, owner_plan={0: d, 1: client_location(d, j)}, root_role="plain")
            for d in device_order
            for j in range(1, c[d] + 1)
        }
        return ProvisionD(devices, network, links)

    def check_available(self, prov: ProvisionD, request: Request) -> None:
        deficits = []
        for me in request.clients:
            link = prov.links.get(me)
            if link is None:
                deficits.append(f"unknown client {me[0]}.{me[1]}")
            elif link.stale:
                deficits.append(f"client link {me[0]}.{me[1]}")
        for a, b in request.target_edges():
            if a[0] == b[0]:
                if prov.devices[a[0]].pairs.get(tuple(sorted((a[1], b[1]))), None) is None:
                    deficits.append(f"device pair {a}-{b}")
            elif prov.network is None or prov.network.pairs.get(_pair_key(a, b)) is None:
                deficits.append(f"network pair {a}-{b}")
        if deficits:
            raise ResourceError(sorted(set(deficits)))

    def serve(self, state: GraphState, prov: ProvisionD, request: Request) -> DeliveryResult:
        self.check_available(prov, request)
        state.transcript.note(f"begin-request {request.id} arch=D")
        delivered = run_request_D(state, prov, request)
        state.transcript.note(f"phase {request.id} post-generation")
        flush_delivery(state, delivered)
        result = DeliveryResult(request.id, delivered)
        check_delivery(state, result, request.target_edges())
        state.transcript.note(f"end-request {request.id} served")
        return result
