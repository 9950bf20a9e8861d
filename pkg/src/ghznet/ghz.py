"""GHZ components in star form and the merge operations the network phases use.

A GHZ state lives inside a shared GraphState as a star: the root carries an
identity frame, every leaf carries a Hadamard frame, so the realized state is
exactly (|0...0> + |1...1>)/sqrt(2).  Bell and fusion measurements between two
components are decomposed into the core calculus (frame resolution, a CNOT
merge and single-qubit measurements); afterwards the surviving component is
re-normalized to exact star form, with all outcome corrections folded into
recorded local rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ghznet import clifford as cl
from ghznet.graphstate import GraphError, GraphState, MeasurementRecord
from ghznet.ids import QubitId


class GhzError(GraphError):
    pass


@dataclass
class GhzComponent:
    """Star-form GHZ state embedded in a shared graph state."""

    root: QubitId
    leaves: list[QubitId]
    state: GraphState = field(repr=False)
    stale: bool = field(default=False, repr=False)

    @property
    def size(self) -> int:
        return 1 + len(self.leaves)

    @property
    def qubits(self) -> list[QubitId]:
        return [self.root, *self.leaves]

    def __contains__(self, q: QubitId) -> bool:
        return q == self.root or q in self.leaves

    def check_star(self) -> None:
        """Assert the component is a star on root with identity/Hadamard frames."""
        if self.stale:
            raise GhzError("component was consumed by a merge")
        g = self.state
        leaf_set = set(self.leaves)
        if g.neighbors(self.root) != leaf_set:
            raise GhzError(
                f"component at {self.root} is not a star: root neighbors "
                f"{sorted(map(str, g.neighbors(self.root)))} != leaves"
            )
        for leaf in self.leaves:
            if g.neighbors(leaf) != {self.root}:
                raise GhzError(f"leaf {leaf} has neighbors outside the star")
            if g.frame(leaf) is not cl.H:
                raise GhzError(f"leaf {leaf} frame is {g.frame(leaf).name}, expected H")
        if not g.frame(self.root).is_identity:
            raise GhzError(f"root frame is {g.frame(self.root).name}, expected I")


def make_ghz(
    state: GraphState,
    n: int,
    owner_plan: Mapping[int, str] | None = None,
    location: str = "node",
    root_role: str = "root",
    leaf_role: str = "leaf",
) -> GhzComponent:
    """Create a fresh GHZ_n in star form; position 0 of ``owner_plan`` is the root."""
    if n < 1:
        raise GhzError(f"GHZ size must be >= 1, got {n}")
    locs = [owner_plan.get(i, location) if owner_plan else location for i in range(n)]
    root = state.fresh_qubit(locs[0], root_role)
    leaves = [state.fresh_qubit(locs[i], leaf_role) for i in range(1, n)]
    for leaf in leaves:
        state._adj[root].add(leaf)
        state._adj[leaf].add(root)
        state.apply_local(leaf, cl.H, record=False)
    return GhzComponent(root, leaves, state)


def _restar(state: GraphState, survivors: list[QubitId], want_root: QubitId) -> None:
    """Bring a GHZ-class component (star or complete graph) to star form on want_root."""
    if len(survivors) <= 1:
        return
    sset = set(survivors)
    for v in survivors:
        if state.neighbors(v) - sset:
            raise GhzError(f"merge left {v} entangled outside the component")
    degs = {v: len(state.neighbors(v) & sset) for v in survivors}
    k = len(survivors)
    if all(d == k - 1 for d in degs.values()):
        state.local_complement(want_root)
        return
    centers = [v for v, d in degs.items() if d == k - 1]
    leaves_ok = all(d == 1 for v, d in degs.items() if v not in centers)
    if len(centers) == 1 and leaves_ok:
        if centers[0] != want_root:
            state.local_complement(centers[0])
            state.local_complement(want_root)
        return
    raise GhzError("merge result is not in the star/complete orbit; not a GHZ component")


def _normalize(state: GraphState, survivors: list[QubitId], root: QubitId) -> GhzComponent:
    _restar(state, survivors, root)
    state.resolve_frame(root, cl.I)
    leaves = sorted(v for v in survivors if v != root)
    for leaf in leaves:
        state.resolve_frame(leaf, cl.H)
        state.set_role(leaf, "leaf")
    state.set_role(root, "root")
    comp = GhzComponent(root, leaves, state)
    comp.check_star()
    return comp


def _pick_root(g1: GhzComponent, g2: GhzComponent, consumed: set[QubitId]) -> QubitId:
    # The root of the component owning q2's root side persists when it can;
    # the paper leaves the surviving-label choice open, so this is pinned here.
    if g2.root not in consumed:
        return g2.root
    if g1.root not in consumed:
        return g1.root
    return min(q for q in g1.qubits + g2.qubits if q not in consumed)


def _check_mergeable(g1: GhzComponent, q1: QubitId, g2: GhzComponent, q2: QubitId) -> None:
    for g, q in ((g1, q1), (g2, q2)):
        if g.stale:
            raise GhzError("component was already consumed")
        if q not in g:
            raise GhzError(f"{q} is not part of the component rooted at {g.root}")
    if g1.state is not g2.state:
        raise GhzError("components live in different graph states")
    if set(g1.qubits) & set(g2.qubits):
        raise GhzError("bell/fusion merge needs two distinct components")
    g1.check_star()
    g2.check_star()


def bell_merge(
    g1: GhzComponent,
    q1: QubitId,
    g2: GhzComponent,
    q2: QubitId,
    outcomes: tuple[int | None, int | None] = (None, None),
    purpose: str = "bell",
) -> tuple[GhzComponent, MeasurementRecord, MeasurementRecord]:
    """Bell measurement between q1 and q2, consuming both.

    Decomposed as CNOT(q1 -> q2) followed by an X measurement of q1 and a Z
    measurement of q2, acting on the physical (unrotated) qubits.  Since the
    Bell basis is swap-symmetric, the decomposition direction flips when the
    frame pattern requires it.  The result is the GHZ state of size m+n-2 on
    the survivors, exact after the recorded corrections.
    """
    _check_mergeable(g1, q1, g2, q2)
    state = g1.state
    if state.frame(q1) is cl.H and state.frame(q2) is cl.I:
        a, b = q2, q1
    else:
        a, b = q1, q2
    state.cnot_physical(a, b)
    rec_x = state.measure(a, "X", outcomes[0], purpose=purpose)
    rec_z = state.measure(b, "Z", outcomes[1], purpose=purpose)
    consumed = {q1, q2}
    root = _pick_root(g1, g2, consumed)
    survivors = [q for q in g1.qubits + g2.qubits if q not in consumed]
    comp = _normalize(state, survivors, root)
    g1.stale = g2.stale = True
    return comp, rec_x, rec_z


def fusion_merge(
    g1: GhzComponent,
    q1: QubitId,
    g2: GhzComponent,
    q2: QubitId,
    outcome: int | None = None,
) -> tuple[GhzComponent, MeasurementRecord]:
    """Fusion measurement |0><00| + |1><11| on (q1, q2), yielding GHZ_{m+n-1}.

    Decomposed as CNOT(q1 -> q2) followed by a Z measurement of q2.  The
    merged qubit is q1 except for the one frame pattern (H on q1, I on q2)
    that forces the swapped but physically identical decomposition, in which
    case q2 survives; the returned component reports the survivors either way.
    """
    _check_mergeable(g1, q1, g2, q2)
    state = g1.state
    if state.frame(q1) is cl.H and state.frame(q2) is cl.I:
        control, measured = q2, q1
    else:
        control, measured = q1, q2
    state.cnot_physical(control, measured)
    rec = state.measure(measured, "Z", outcome, purpose="fusion")
    root = g1.root if g1.root != measured else g2.root
    survivors = [q for q in g1.qubits + g2.qubits if q != measured]
    comp = _normalize(state, survivors, root)
    g1.stale = g2.stale = True
    return comp, rec


def expand_leaf(
    network: GhzComponent,
    leaf: QubitId,
    expander: GhzComponent,
    outcomes: tuple[int | None, int | None] = (None, None),
) -> tuple[GhzComponent, MeasurementRecord, MeasurementRecord]:
    """Bell-merge a local expander's root into a network leaf.

    The network component keeps its root and gains the expander's leaves; the
    expander must be local to the device holding the leaf.
    """
    if leaf not in network.leaves:
        raise GhzError(f"{leaf} is not a leaf of the network component")
    if expander.root.location != leaf.location:
        raise GhzError(
            f"expander at {expander.root.location} is not local to the device "
            f"holding leaf {leaf}"
        )
    return bell_merge(network, leaf, expander, expander.root, outcomes)
