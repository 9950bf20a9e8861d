"""Architecture C: hybrid combinations of the GHZ and decorated styles.

Two flavors: decorated device states with a GHZ network (default, as in the
paper's hybrid illustration) and GHZ device states with a decorated network.
In both, the final network attachment is a CNOT merge from the device proxy
into the client's network proxy instead of a Bell measurement.
"""

from __future__ import annotations

from dataclasses import dataclass

from ghznet import clifford as cl
from ghznet.arch.common import (
    ClientKey,
    DeliveryResult,
    Request,
    check_delivery,
    cut_leaf,
    flush_delivery,
    handoff_embedded,
    merge_into,
)
from ghznet.arch import decorated_b, ghz_a
from ghznet.arch.ghz_a import ResourceError
from ghznet.ghz import GhzComponent, make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId


@dataclass
class ProvisionC:
    flavor: str
    devices: dict
    network: object
    links: dict[ClientKey, GhzComponent]


class ArchC:
    name = "C"

    def __init__(self, flavor: str = "devices-B", secure: bool = False, tailored: bool = True):
        if flavor not in ("devices-B", "devices-A"):
            raise ValueError(f"unknown hybrid flavor {flavor!r}")
        self.flavor = flavor
        self.secure = secure
        self.tailored = tailored

    def provision(self, state: GraphState, device_order: list[str], c: dict[str, int]) -> ProvisionC:
        links: dict[ClientKey, GhzComponent] = {}
        if self.flavor == "devices-B":
            networked = len(device_order) > 1
            devices = {
                d: decorated_b.build_device_state_B(state, d, c[d], networked=networked)
                for d in device_order
            }
            network = (
                ghz_a.build_network_state_A(state, device_order, c, secure=self.secure)
                if len(device_order) > 1
                else None
            )
        else:
            devices = {
                d: ghz_a.build_device_state_A(state, d, c[d], networked=len(device_order) > 1)
                for d in device_order
            }
            network = (
                decorated_b.build_network_state_B(state, device_order, c, secure=self.secure)
                if len(device_order) > 1
                else None
            )
            for d in device_order:
                for j in range(1, c[d] + 1):
                    links[(d, j)] = make_ghz(
                        state, 2, owner_plan={0: d, 1: f"{d}.c{j}"}, root_role="plain"
                    )
        return ProvisionC(self.flavor, devices, network, links)

    def serve(self, state: GraphState, prov: ProvisionC, request: Request) -> DeliveryResult:
        state.transcript.note(f"begin-request {request.id} arch=C/{self.flavor}")
        if self.flavor == "devices-B":
            delivered = self._serve_devices_b(state, prov, request)
        else:
            delivered = self._serve_devices_a(state, prov, request)
        flush_delivery(state, delivered)
        result = DeliveryResult(request.id, delivered)
        check_delivery(state, result, request.target_edges())
        state.transcript.note(f"end-request {request.id} served")
        return result

    # -- decorated devices + GHZ network --------------------------------------

    def _serve_devices_b(self, state, prov: ProvisionC, request: Request):
        devices: dict[str, decorated_b.DeviceStateB] = prov.devices
        net: ghz_a.NetworkStateA | None = prov.network
        deficits = []
        for d, j in request.clients:
            if devices[d].consumed[j]:
                deficits.append(f"device proxy for {d}.{j}")
        network_proxy: dict[ClientKey, QubitId] = {}
        if net is not None:
            for me in request.clients:
                copy = net.copies.get(me)
                if copy is not None and copy.consumed:
                    deficits.append(f"network copy for {me[0]}.{me[1]}")
        if deficits:
            raise ResourceError(sorted(set(deficits)))

        cross = [e for e in request.target_edges() if e[0][0] != e[1][0]]
        if cross and net is None:
            raise ResourceError([f"no network state for edge {a}-{b}" for a, b in cross])
        if net is not None:
            # every participating client needs a network proxy carrying its
            # cross-device adjacency; first-position clients get a fresh one
            partners = ghz_a.involved_copies(net, request)
            wire_ends = ghz_a.expansion_phase(state, net, request, partners, tailored=self.tailored)
            for me in request.clients:
                copy = net.copies.get(me)
                if copy is None:
                    network_proxy[me] = state.fresh_qubit(me[0], "network-proxy")
                else:
                    if not copy.routed:
                        ghz_a.route_copy(state, net, copy, set())
                    network_proxy[me] = copy.root
                    copy.consumed = True
            # cross edges: merge the later client's wire end into the earlier
            # client's network proxy, locally at the earlier device
            for a, b in cross:
                hi, lo = (a, b) if net.pos(a[0]) > net.pos(b[0]) else (b, a)
                end = wire_ends.pop((hi, lo))
                merge_into(state, network_proxy[lo], end)
            for key in sorted(wire_ends):
                if wire_ends[key] in state:
                    cut_leaf(state, wire_ends[key])
            # CNOT merge instead of the final Bell measurement
            for me in request.clients:
                merge_into(state, devices[me[0]].proxies[me[1]], network_proxy[me])
        delivered: dict[ClientKey, QubitId] = {}
        for dev_name in request.devices():
            dev = devices[dev_name]
            decorated_b.route_device_B(state, dev, request)
            for _, j in request.clients_at(dev_name):
                handoff_embedded(state, dev.proxies[j], dev.client_qubits[j])
                dev.consumed[j] = True
                delivered[(dev_name, j)] = dev.client_qubits[j]
        return delivered

    # -- GHZ devices + decorated network --------------------------------------

    def _serve_devices_a(self, state, prov: ProvisionC, request: Request):
        devices: dict[str, ghz_a.DeviceStateA] = prov.devices
        net: decorated_b.NetworkStateB | None = prov.network
        deficits = []
        for d, j in request.clients:
            if devices[d].consumed[j]:
                deficits.append(f"device component for {d}.{j}")
            link = prov.links.get((d, j))
            if link is None or link.stale:
                deficits.append(f"client link {d}.{j}")
        if deficits:
            raise ResourceError(sorted(set(deficits)))

        if net is not None:
            decorated_b.route_network_B(state, net, request)
        delivered: dict[ClientKey, QubitId] = {}
        for dev_name in request.devices():
            dev = devices[dev_name]
            local = request.clients_at(dev_name)
            for _, j in local:
                slot = dev.slot_of_client(j)
                if dev.networked:
                    cut_leaf(state, dev.virtual_leaf(j))
                if net is not None:
                    merge_into(state, dev.components[slot].root, net.proxies[(dev_name, j)])
                    net.consumed[(dev_name, j)] = True
            slot_edges = [
                tuple(sorted((dev.slot_of_client(a[1]), dev.slot_of_client(b[1]))))
                for a, b in request.target_edges()
                if a[0] == dev_name and b[0] == dev_name
            ]
            active = {dev.slot_of_client(j) for _, j in local}
            proxies = ghz_a._generate_intra(state, dev, slot_edges, active)
            for _, j in local:
                dev.consumed[j] = True
                link = prov.links[(dev_name, j)]
                client_q = link.leaves[0]
                from ghznet.arch.common import teleport_via_link

                teleport_via_link(state, proxies[dev.slot_of_client(j)], link.root, client_q)
                link.stale = True
                state.set_role(client_q, "client-qubit")
                delivered[(dev_name, j)] = client_q
        return delivered
