"""Architecture A: GHZ device states, GHZ network states, three-phase requests.

Device state for n clients: GHZ_2 (x) ... (x) GHZ_n, the root of GHZ_j being
client j's proxy (client 1 borrows a leaf).  Networked devices extend the
tensor product by one index for the virtual network client, so every real
client owns a root.  The network state holds, for the i-th device, c_i copies
of GHZ_i whose root sits at that device and whose leaves sit one per earlier
device.  A request runs routing (cut or keep network leaves), expansion
(local expander GHZ states multiply kept leaves per participating client),
combination (adapters Bell-merge network roots into the device states) and
generation (connecting procedures for network edges, CNOT merges for device
edges, then teleportation to the clients).
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
    connect_ends,
    cut_leaf,
    flush_delivery,
    handoff_embedded,
    merge_into,
    teleport_via_link,
)
from ghznet.ghz import GhzComponent, bell_merge, expand_leaf, make_ghz
from ghznet.graphstate import GraphState
from ghznet.ids import QubitId


class ResourceError(ProtocolError):
    """A request needs components that were already consumed."""

    def __init__(self, deficits: list[str]):
        self.deficits = deficits
        super().__init__("missing components: " + "; ".join(deficits))


# ---------------------------------------------------------------- device state


@dataclass
class DeviceStateA:
    device: str
    n: int
    embedded: bool
    networked: bool
    components: dict[int, GhzComponent]
    leaf_for: dict[tuple[int, int], QubitId]
    client_leaf: dict[int, QubitId]
    consumed: dict[int, bool]

    @property
    def n_slots(self) -> int:
        return self.n + 1 if self.networked else self.n

    def slot_of_client(self, j: int) -> int:
        return j + 1 if self.networked else j

    def client_of_slot(self, s: int) -> int | None:
        if self.networked:
            return s - 1 if s >= 2 else None
        return s

    def qubit_count(self) -> int:
        return sum(c.size for c in self.components.values())

    def proxy_of(self, j: int) -> QubitId:
        """Current proxy qubit of client j (root of its component, or the borrowed leaf)."""
        s = self.slot_of_client(j)
        if s >= 2:
            return self.components[s].root
        raise ProtocolError("client 1 of a plain device has no fixed root; run the generation")

    def virtual_leaf(self, j: int) -> QubitId:
        if not self.networked:
            raise ProtocolError(f"device {self.device} has no virtual network slot")
        return self.leaf_for[(self.slot_of_client(j), 1)]


def build_device_state_A(
    state: GraphState,
    device: str,
    n: int,
    embedded: bool = False,
    networked: bool = False,
) -> DeviceStateA:
    """Build the device state; ``networked`` adds the virtual network client."""
    if n < 2 and not networked:
        raise ProtocolError(f"device state needs at least 2 clients, got {n}")
    if n < 1:
        raise ProtocolError(f"device state needs at least 1 client, got {n}")
    dev = DeviceStateA(device, n, embedded, networked, {}, {}, {}, {j: False for j in range(1, n + 1)})
    for s in range(2, dev.n_slots + 1):
        j = dev.client_of_slot(s)
        size = s + (1 if embedded and j is not None else 0)
        plan = {0: device}
        for pos in range(1, s):
            plan[pos] = device
        if embedded and j is not None:
            plan[s] = client_location(device, j)
        comp = make_ghz(state, size, owner_plan=plan, root_role="proxy")
        dev.components[s] = comp
        for pos in range(1, s):
            dev.leaf_for[(s, pos)] = comp.leaves[pos - 1]
        if embedded and j is not None:
            dev.client_leaf[j] = comp.leaves[s - 1]
            state.set_role(comp.leaves[s - 1], "client-qubit")
    return dev


def _generate_intra(
    state: GraphState,
    dev: DeviceStateA,
    slot_edges: list[tuple[int, int]],
    active_slots: set[int],
) -> dict[int, QubitId]:
    """Device-level merging procedure over slots; returns slot -> proxy qubit.

    Edges must be (low, high) slot pairs.  Only components of active slots are
    touched; their unused leaves are cut.
    """
    edges = {tuple(sorted(e)) for e in slot_edges}
    proxies: dict[int, QubitId] = {s: dev.components[s].root for s in active_slots if s >= 2}
    used_leaf: set[QubitId] = set()

    if 1 in active_slots and not dev.networked:
        nb1 = sorted(j for (a, j) in edges if a == 1)
        if nb1:
            anchor = nb1[0]
            proxy1 = dev.leaf_for[(anchor, 1)]
            state.resolve_frame(proxy1, cl.I)
            state.set_role(proxy1, "proxy")
            used_leaf.add(proxy1)
            proxies[1] = proxy1
            for j in nb1[1:]:
                target = dev.leaf_for[(j, 1)]
                used_leaf.add(target)
                merge_into(state, proxy1, target)
        else:
            proxies[1] = state.fresh_qubit(dev.device, "proxy")

    for a, b in sorted(edges):
        if a == 1 and not dev.networked:
            continue
        target = dev.leaf_for[(b, a)]
        used_leaf.add(target)
        merge_into(state, proxies[a], target)

    for s in sorted(active_slots):
        if s < 2:
            continue
        for k in range(1, s):
            if dev.networked and k == 1:
                continue  # virtual leaves belong to the combination phase
            leaf = dev.leaf_for[(s, k)]
            if leaf not in used_leaf and leaf in state:
                cut_leaf(state, leaf)
    return proxies


def generate_device_graph_A(
    state: GraphState,
    dev: DeviceStateA,
    target_edges: list[tuple[int, int]],
) -> dict[int, QubitId]:
    """Generate an arbitrary client graph on the proxies of a plain device state."""
    for a, b in target_edges:
        for x in (a, b):
            if not 1 <= x <= dev.n:
                raise ProtocolError(f"unknown client {x} for device {dev.device}")
        if a == b:
            raise ProtocolError("self edge in device target")
    slot_edges = [tuple(sorted((dev.slot_of_client(a), dev.slot_of_client(b)))) for a, b in target_edges]
    active = {dev.slot_of_client(j) for j in range(1, dev.n + 1)}
    slot_proxies = _generate_intra(state, dev, slot_edges, active)
    return {dev.client_of_slot(s): q for s, q in slot_proxies.items() if dev.client_of_slot(s)}


# ---------------------------------------------------------------- network state


@dataclass
class CopyA:
    """One network GHZ copy: root (network proxy) at its device, leaves at earlier devices."""

    device: str
    client: int
    root: QubitId
    leaf_at: dict[str, QubitId]
    dec_root_side: dict[str, QubitId] = field(default_factory=dict)
    dec_leaf_side: dict[str, QubitId] = field(default_factory=dict)
    comp: GhzComponent | None = None
    consumed: bool = False
    routed: bool = False

    @property
    def key(self) -> ClientKey:
        return (self.device, self.client)

    def qubit_count(self) -> int:
        return 1 + len(self.leaf_at) + len(self.dec_root_side) + len(self.dec_leaf_side)


@dataclass
class NetworkStateA:
    device_order: list[str]
    c: dict[str, int]
    secure: bool
    copies: dict[ClientKey, CopyA]

    def pos(self, device: str) -> int:
        return self.device_order.index(device) + 1

    def qubit_count(self) -> int:
        return sum(cp.qubit_count() for cp in self.copies.values())

    def expanded_qubit_count(self) -> int:
        """Post-expansion size per the comparison formula: sum c_i (1 + sum_{k<i} c_k)."""
        total = 0
        for i, dev in enumerate(self.device_order, start=1):
            if i == 1:
                continue
            earlier = sum(self.c[d] for d in self.device_order[: i - 1])
            total += self.c[dev] * (1 + earlier)
        return total


def build_network_state_A(
    state: GraphState,
    device_order: list[str],
    c: dict[str, int],
    secure: bool = False,
) -> NetworkStateA:
    if len(device_order) < 2:
        raise ProtocolError(f"network state needs at least 2 devices, got {len(device_order)}")
    net = NetworkStateA(list(device_order), dict(c), secure, {})
    for i, dev in enumerate(device_order, start=1):
        if i == 1:
            continue
        earlier = device_order[: i - 1]
        for j in range(1, c[dev] + 1):
            if not secure:
                plan = {0: dev}
                for pos, other in enumerate(earlier, start=1):
                    plan[pos] = other
                comp = make_ghz(state, i, owner_plan=plan, root_role="network-proxy")
                copy = CopyA(dev, j, comp.root, {other: comp.leaves[k] for k, other in enumerate(earlier)}, comp=comp)
            else:
                root = state.fresh_qubit(dev, "network-proxy")
                leaf_at: dict[str, QubitId] = {}
                dec_r: dict[str, QubitId] = {}
                dec_l: dict[str, QubitId] = {}
                for other in earlier:
                    d1 = state.fresh_qubit(dev, "decorator")
                    d2 = state.fresh_qubit(other, "decorator")
                    leaf = state.fresh_qubit(other, "leaf")
                    state._adj[root].add(d1); state._adj[d1].add(root)
                    state._adj[d1].add(d2); state._adj[d2].add(d1)
                    state._adj[d2].add(leaf); state._adj[leaf].add(d2)
                    state.apply_local(leaf, cl.H, record=False)
                    leaf_at[other] = leaf
                    dec_r[other] = d1
                    dec_l[other] = d2
                copy = CopyA(dev, j, root, leaf_at, dec_r, dec_l)
            net.copies[(dev, j)] = copy
    return net


def route_copy(state: GraphState, net: NetworkStateA, copy: CopyA, keep: set[str]) -> GhzComponent:
    """Cut or keep each leaf of one network copy, leaving a clean star.

    Trusted mode: non-participating devices Z-measure their leaves.  Secure
    mode: kept edges lose their decorators via Y measurements; unwanted edges
    are cut by the root-side decorator locally, without remote cooperation.
    """
    unknown = keep - set(copy.leaf_at)
    if unknown:
        raise ProtocolError(f"copy {copy.key} has no leaves at {sorted(unknown)}")
    if not net.secure:
        for dev in sorted(copy.leaf_at):
            if dev not in keep:
                cut_leaf(state, copy.leaf_at[dev])
    else:
        for dev in sorted(copy.leaf_at):
            if dev in keep:
                state.measure(copy.dec_root_side[dev], "Y", purpose="routing")
                state.measure(copy.dec_leaf_side[dev], "Y", purpose="routing")
                state.resolve_frame(copy.leaf_at[dev], cl.H)
            else:
                state.measure(copy.dec_root_side[dev], "Z", purpose="routing-cut")
    state.resolve_frame(copy.root, cl.I)
    comp = GhzComponent(copy.root, sorted(copy.leaf_at[d] for d in keep), state)
    comp.check_star()
    copy.comp = comp
    copy.routed = True
    return comp


WireEnds = dict[tuple[ClientKey, ClientKey], QubitId]


def expansion_phase(
    state: GraphState,
    net: NetworkStateA,
    request: Request,
    partners_by_copy: dict[ClientKey, dict[str, list[ClientKey]]],
    tailored: bool = True,
) -> WireEnds:
    """Expand kept leaves of every involved copy into per-client wire ends.

    The expander at device k is sized by the participating client count there
    (one leaf per participant); with a single participant the network leaf is
    used directly and no expander is needed.  Full-size mode always prepares
    GHZ_{c_k + 1}.
    """
    ends: WireEnds = {}
    for key in sorted(partners_by_copy):
        copy = net.copies[key]
        by_dev = partners_by_copy[key]
        comp = route_copy(state, net, copy, set(by_dev))
        for dev in sorted(by_dev):
            participants = sorted(request.clients_at(dev)) if tailored else [
                (dev, j) for j in range(1, net.c[dev] + 1)
            ]
            leaf = copy.leaf_at[dev]
            if tailored and len(participants) == 1:
                ends[(key, participants[0])] = leaf
                continue
            expander = make_ghz(state, len(participants) + 1, location=dev, root_role="expander")
            comp, _, _ = expand_leaf(comp, leaf, expander)
            for client, end in zip(participants, expander.leaves):
                ends[(key, client)] = end
        copy.comp = comp
    return ends


def combination_phase(
    state: GraphState,
    devices: dict[str, DeviceStateA],
    net: NetworkStateA | None,
    request: Request,
) -> WireEnds:
    """Create adapters and Bell-merge network roots into the device states.

    Returns the local wire ends reserved for partners at later devices, keyed
    by (owning client, partner client).
    """
    local_ends: WireEnds = {}
    partner_map = _partners(request)
    for me in request.clients:
        dev_name, j = me
        dev = devices[dev_name]
        slot = dev.slot_of_client(j)
        if slot < 2:
            raise ProtocolError("combination phase requires networked device states")
        pos = net.pos(dev_name) if net else 1
        earlier = [p for p in partner_map[me] if p[0] != dev_name and net.pos(p[0]) < pos]
        later = sorted(p for p in partner_map[me] if p[0] != dev_name and net.pos(p[0]) > pos)
        vleaf = dev.virtual_leaf(j)
        if not earlier and not later:
            cut_leaf(state, vleaf)
            continue
        my_comp = dev.components[slot]
        if later:
            size = 1 + (1 if earlier else 0) + len(later)
            adapter = make_ghz(state, size, location=dev_name, root_role="adapter")
            ends = list(adapter.leaves)
            hub = adapter
            if earlier:
                hub, _, _ = bell_merge(adapter, ends[0], net.copies[me].comp, net.copies[me].root)
                ends = ends[1:]
            for partner, end in zip(later, ends):
                local_ends[(me, partner)] = end
            merged, _, _ = bell_merge(my_comp, vleaf, hub, adapter.root)
        else:
            merged, _, _ = bell_merge(my_comp, vleaf, net.copies[me].comp, net.copies[me].root)
        if merged.root != my_comp.root:
            raise ProtocolError("combination lost the device proxy root")
        dev.components[slot] = merged
    return local_ends


def _partners(request: Request) -> dict[ClientKey, list[ClientKey]]:
    out: dict[ClientKey, list[ClientKey]] = {c: [] for c in request.clients}
    for a, b in request.target_edges():
        out[a].append(b)
        out[b].append(a)
    return out


def involved_copies(net: NetworkStateA, request: Request) -> dict[ClientKey, dict[str, list[ClientKey]]]:
    """Map each copy serving this request to its kept devices and partners there.

    The copy owned by the later-positioned endpoint of each network edge
    serves that edge.
    """
    out: dict[ClientKey, dict[str, list[ClientKey]]] = {}
    for a, b in request.target_edges():
        if a[0] == b[0]:
            continue
        hi, lo = (a, b) if net.pos(a[0]) > net.pos(b[0]) else (b, a)
        out.setdefault(hi, {}).setdefault(lo[0], []).append(lo)
    return out


def generation_phase(
    state: GraphState,
    devices: dict[str, DeviceStateA],
    net: NetworkStateA | None,
    request: Request,
    wire_ends: WireEnds,
    local_ends: WireEnds,
    links: dict[ClientKey, GhzComponent] | None,
) -> dict[ClientKey, QubitId]:
    """Connect network edges, generate device-level adjacency, deliver to clients."""
    # network edges via the connecting procedure
    for a, b in request.target_edges():
        if a[0] == b[0]:
            continue
        hi, lo = (a, b) if net.pos(a[0]) > net.pos(b[0]) else (b, a)
        connect_ends(state, local_ends.pop((lo, hi)), wire_ends.pop((hi, lo)))
    # unused wire ends (full-size expanders, non-partner participants)
    for key in sorted(wire_ends):
        q = wire_ends[key]
        if q in state:
            cut_leaf(state, q)
    for key in sorted(local_ends):
        q = local_ends[key]
        if q in state:
            cut_leaf(state, q)
    # device-level adjacency
    delivered: dict[ClientKey, QubitId] = {}
    for dev_name in request.devices():
        dev = devices[dev_name]
        local = request.clients_at(dev_name)
        slot_edges = [
            (dev.slot_of_client(a[1]), dev.slot_of_client(b[1]))
            for a, b in request.target_edges()
            if a[0] == dev_name and b[0] == dev_name
        ]
        active = {dev.slot_of_client(j) for _, j in local}
        proxies = _generate_intra(state, dev, [tuple(sorted(e)) for e in slot_edges], active)
        for _, j in local:
            dev.consumed[j] = True
            proxy = proxies[dev.slot_of_client(j)]
            if dev.embedded:
                client_q = dev.client_leaf[j]
                handoff_embedded(state, proxy, client_q)
            else:
                link = links[(dev_name, j)]
                if link.stale:
                    raise ResourceError([f"client link {dev_name}.{j}"])
                client_q = link.leaves[0]
                teleport_via_link(state, proxy, link.root, client_q)
                link.stale = True
            state.set_role(client_q, "client-qubit")
            delivered[(dev_name, j)] = client_q
    return delivered


# ---------------------------------------------------------------- architecture


@dataclass
class ProvisionA:
    devices: dict[str, DeviceStateA]
    network: NetworkStateA | None
    links: dict[ClientKey, GhzComponent]


class ArchA:
    name = "A"

    def __init__(self, secure: bool = False, embedded: bool = False, tailored: bool = True):
        self.secure = secure
        self.embedded = embedded
        self.tailored = tailored

    def provision(self, state: GraphState, device_order: list[str], c: dict[str, int]) -> ProvisionA:
        networked = len(device_order) > 1
        devices = {
            d: build_device_state_A(state, d, c[d], embedded=self.embedded, networked=networked)
            for d in device_order
        }
        network = (
            build_network_state_A(state, device_order, c, secure=self.secure) if networked else None
        )
        links: dict[ClientKey, GhzComponent] = {}
        if not self.embedded:
            for d in device_order:
                for j in range(1, c[d] + 1):
                    links[(d, j)] = make_ghz(
                        state, 2, owner_plan={0: d, 1: client_location(d, j)}, root_role="plain"
                    )
        return ProvisionA(devices, network, links)

    def check_available(self, prov: ProvisionA, request: Request) -> None:
        deficits = []
        for dev_name, j in request.clients:
            dev = prov.devices.get(dev_name)
            if dev is None or j > dev.n:
                deficits.append(f"unknown client {dev_name}.{j}")
            elif dev.consumed[j]:
                deficits.append(f"device component for {dev_name}.{j}")
            if not self.embedded:
                link = prov.links.get((dev_name, j))
                if link is None or link.stale:
                    deficits.append(f"client link {dev_name}.{j}")
        if prov.network:
            for key in involved_copies(prov.network, request):
                copy = prov.network.copies.get(key)
                if copy is None:
                    deficits.append(f"network copy for {key[0]}.{key[1]}")
                elif copy.consumed:
                    deficits.append(f"network copy for {key[0]}.{key[1]} (consumed)")
        else:
            for a, b in request.target_edges():
                if a[0] != b[0]:
                    deficits.append(f"no network state for edge {a}-{b}")
        if deficits:
            raise ResourceError(sorted(set(deficits)))

    def serve(self, state: GraphState, prov: ProvisionA, request: Request) -> DeliveryResult:
        self.check_available(prov, request)
        state.transcript.note(f"begin-request {request.id} arch=A")
        if prov.network:
            partners = involved_copies(prov.network, request)
            wire_ends = expansion_phase(state, prov.network, request, partners, tailored=self.tailored)
            for key in partners:
                prov.network.copies[key].consumed = True
            state.transcript.note(f"phase {request.id} post-expansion")
            local_ends = combination_phase(state, prov.devices, prov.network, request)
            state.transcript.note(f"phase {request.id} post-combination")
        else:
            wire_ends, local_ends = {}, {}
        delivered = generation_phase(
            state, prov.devices, prov.network, request, wire_ends, local_ends,
            prov.links if not self.embedded else None,
        )
        flush_delivery(state, delivered)
        result = DeliveryResult(request.id, delivered)
        check_delivery(state, result, request.target_edges())
        state.transcript.note(f"phase {request.id} post-generation")
        state.transcript.note(f"end-request {request.id} served")
        return result
