"""Graph states with per-vertex local Clifford frames and their calculus.

The tracked object is a graph G plus a frame map; the physical state is
(prod_a frame(a)) |G> with |G> = prod_{ab in E} CZ_ab |+>^V.  All rules below
(CZ edge toggling, local complementation, Pauli measurements with byproduct
tracking, the CNOT neighborhood merge and the wire connecting procedure) are
verified against the dense oracle in the test suite.

Measurement byproducts and local-complementation corrections are folded into
the frames, never applied as separate state mutations; callers flush frames
at delivery time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ghznet import clifford as cl
from ghznet.ids import QubitId

_BASIS_PAULI = {"X": cl.PAULI_X, "Y": cl.PAULI_Y, "Z": cl.PAULI_Z}


class GraphError(ValueError):
    """Structural misuse: unknown vertices, self loops, bad preconditions."""


class FrameError(GraphError):
    """An entangling gate hit a frame it cannot commute through."""


class OutcomeError(GraphError):
    """A forced measurement outcome has probability zero."""


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: QubitId
    basis: str
    outcome: int
    probability: float
    corrections: tuple[tuple[QubitId, cl.LocalClifford], ...]


class Transcript:
    """Ordered log of state creations, gates and measurements for one run.

    Owns the only PRNG in the simulation; replaying the recorded events with
    their recorded outcomes reproduces adjacency, frames and records exactly.
    """

    def __init__(self, seed: int | None = 0):
        self.seed = seed
        self.rng = random.Random(seed)
        self.events: list[tuple] = []
        self.on_note: Callable[[str], None] | None = None

    def emit(self, *event) -> None:
        self.events.append(tuple(event))

    def draw_bit(self) -> int:
        return self.rng.randrange(2)

    def note(self, text: str) -> None:
        self.emit("note", text)
        if self.on_note is not None:
            self.on_note(text)

    def lines(self) -> list[str]:
        return [_format_event(e) for e in self.events]

    def __len__(self) -> int:
        return len(self.events)


def _format_event(e: tuple) -> str:
    kind = e[0]
    parts = [kind]
    for x in e[1:]:
        if isinstance(x, QubitId):
            parts.append(str(x))
        elif isinstance(x, cl.LocalClifford):
            parts.append(x.name)
        elif isinstance(x, tuple):
            parts.append(",".join(f"{q}:{c.name}" for q, c in x) or "-")
        else:
            parts.append(str(x))
    return " ".join(parts)


class GraphState:
    """Mutable single-writer graph state: adjacency + frames + role tags."""

    def __init__(
        self,
        vertices: Iterable[QubitId] = (),
        edges: Iterable[tuple[QubitId, QubitId]] = (),
        transcript: Transcript | None = None,
        seed: int | None = 0,
    ):
        self._adj: dict[QubitId, set[QubitId]] = {}
        self._frames: dict[QubitId, cl.LocalClifford] = {}
        self._roles: dict[QubitId, str] = {}
        self._counters: dict[str, int] = {}
        self.transcript = transcript if transcript is not None else Transcript(seed)
        vertices = list(vertices)
        if len(set(vertices)) != len(vertices):
            raise GraphError("duplicate vertex id")
        for v in vertices:
            self.add_vertex(v, record=False)
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop edge at {a}")
            self._require(a)
            self._require(b)
            self._adj[a].add(b)
            self._adj[b].add(a)

    # -- structure -------------------------------------------------------

    @property
    def vertices(self) -> set[QubitId]:
        return set(self._adj)

    def __contains__(self, v: QubitId) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def _require(self, v: QubitId) -> None:
        if v not in self._adj:
            raise GraphError(f"unknown vertex {v}")

    def add_vertex(self, v: QubitId, role: str = "plain", record: bool = True) -> QubitId:
        if v in self._adj:
            raise GraphError(f"duplicate vertex id {v}")
        self._adj[v] = set()
        self._frames[v] = cl.I
        self._roles[v] = role
        loc = v.location
        self._counters[loc] = max(self._counters.get(loc, 0), v.index + 1)
        if record:
            self.transcript.emit("create", v, role)
        return v

    def fresh_qubit(self, location: str, role: str = "plain") -> QubitId:
        """Allocate a new qubit at ``location`` with the next free index."""
        v = QubitId(location, self._counters.get(location, 0))
        return self.add_vertex(v, role)

    def neighbors(self, v: QubitId) -> set[QubitId]:
        self._require(v)
        return set(self._adj[v])

    def degree(self, v: QubitId) -> int:
        self._require(v)
        return len(self._adj[v])

    def has_edge(self, a: QubitId, b: QubitId) -> bool:
        self._require(a)
        self._require(b)
        return b in self._adj[a]

    def edges(self) -> list[tuple[QubitId, QubitId]]:
        out = []
        for v in sorted(self._adj):
            for w in self._adj[v]:
                if v < w:
                    out.append((v, w))
        return out

    def frame(self, v: QubitId) -> cl.LocalClifford:
        self._require(v)
        return self._frames[v]

    def role(self, v: QubitId) -> str:
        self._require(v)
        return self._roles[v]

    def set_role(self, v: QubitId, role: str) -> None:
        self._require(v)
        self._roles[v] = role

    def component_of(self, v: QubitId) -> set[QubitId]:
        self._require(v)
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in self._adj[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def copy(self) -> "GraphState":
        g = GraphState(transcript=Transcript(self.transcript.seed))
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g._frames = dict(self._frames)
        g._roles = dict(self._roles)
        g._counters = dict(self._counters)
        return g

    def snapshot(self, vertices: Iterable[QubitId]) -> tuple:
        """Hashable (adjacency, frames) view used for untouched-component checks."""
        vs = sorted(vertices)
        return tuple((v, tuple(sorted(self._adj[v])), self._frames[v].index) for v in vs)

    # -- local operations --------------------------------------------------

    def apply_local(self, v: QubitId, c: cl.LocalClifford, record: bool = True) -> None:
        """Physically apply a single-qubit Clifford: frame(v) <- c . frame(v)."""
        self._require(v)
        self._frames[v] = c @ self._frames[v]
        if record and not c.is_identity:
            self.transcript.emit("rotate", v, c)

    def resolve_frame(self, v: QubitId, target: cl.LocalClifford = cl.I) -> None:
        """Physically rotate v so its frame becomes ``target``.

        This is the explicit "apply and clear corrections" step the entangling
        gates require from their callers.
        """
        self._require(v)
        self.apply_local(v, target @ ~self._frames[v])

    def flush_frames(self, vertices: Iterable[QubitId]) -> None:
        """Delivery-time flush: rotate every listed vertex to the identity frame."""
        for v in sorted(vertices):
            self.resolve_frame(v, cl.I)

    # -- entangling gates ---------------------------------------------------

    def apply_cz(self, a: QubitId, b: QubitId) -> None:
        """Toggle edge ab.  Frames at a and b must be diagonal ({I,S,Z,Sdg})."""
        if a == b:
            raise GraphError("CZ needs two distinct vertices")
        self._require(a)
        self._require(b)
        for v in (a, b):
            if not self._frames[v].is_diagonal:
                raise FrameError(
                    f"apply_cz needs a diagonal frame at {v}, found {self._frames[v].name}; "
                    "resolve the frame first"
                )
        self._toggle_edge(a, b)
        self.transcript.emit("cz", a, b)

    def _toggle_edge(self, a: QubitId, b: QubitId) -> None:
        if b in self._adj[a]:
            self._adj[a].discard(b)
            self._adj[b].discard(a)
        else:
            self._adj[a].add(b)
            self._adj[b].add(a)

    def _check_merge_shape(self, source: QubitId, target: QubitId) -> None:
        if source == target:
            raise GraphError("CNOT needs two distinct vertices")
        self._require(source)
        self._require(target)
        if target in self._adj[source]:
            raise GraphError(f"cnot_merge: {source} and {target} are adjacent")
        common = self._adj[source] & self._adj[target]
        if common:
            raise GraphError(
                f"cnot_merge: shared neighbors {sorted(map(str, common))} between {source} and {target}"
            )

    def cnot_merge(self, source: QubitId, target: QubitId) -> None:
        """CNOT between non-adjacent vertices with disjoint neighborhoods.

        The source inherits the target's neighborhood (symmetric difference);
        the target keeps its own.  Requires a diagonal frame on the source and
        a Pauli frame on the target; Pauli parts push through with a Z
        byproduct on the source.
        """
        self._check_merge_shape(source, target)
        fs, ft = self._frames[source], self._frames[target]
        if not fs.is_diagonal:
            raise FrameError(f"cnot_merge needs a diagonal source frame, found {fs.name} at {source}")
        if not ft.is_pauli:
            raise FrameError(f"cnot_merge needs a Pauli target frame, found {ft.name} at {target}")
        if ft is cl.Z or ft is cl.Y:
            self._frames[source] = fs @ cl.Z
        for w in sorted(self._adj[target]):
            self._toggle_edge(source, w)
        self.transcript.emit("cnot", source, target)

    def cnot_physical(self, source: QubitId, target: QubitId) -> None:
        """Physical CNOT for operand frames in {I, H} (the GHZ merge cases).

        With both frames identity this is ``cnot_merge``.  A Hadamard on the
        target pulls out as CNOT (I x H) = H_t CZ, so the graph just gains the
        edge.  Hadamards on both sides satisfy CNOT (H x H) = (H x H) CNOT
        with source and target exchanged.  A Hadamard on the source alone
        cannot be pushed through; Bell-measurement callers flip their own
        decomposition direction instead.
        """
        self._require(source)
        self._require(target)
        fs, ft = self._frames[source], self._frames[target]
        if fs is cl.I and ft.is_pauli:
            self.cnot_merge(source, target)
            return
        if fs is cl.I and ft is cl.H:
            self._toggle_edge(source, target)
            self.transcript.emit("cnot", source, target)
            return
        if fs is cl.H and ft is cl.H:
            self._check_merge_shape(target, source)
            for w in sorted(self._adj[source]):
                self._toggle_edge(target, w)
            self.transcript.emit("cnot", source, target)
            return
        raise FrameError(
            f"cnot_physical cannot push frames ({fs.name} at {source}, {ft.name} at {target})"
        )

    # -- local complementation ------------------------------------------------

    def _complement_adjacency(self, v: QubitId) -> None:
        nb = sorted(self._adj[v])
        for i, a in enumerate(nb):
            for b in nb[i + 1 :]:
                self._toggle_edge(a, b)

    def local_complement(self, v: QubitId) -> None:
        """Complement the subgraph on N(v); physically a no-op.

        The standard byproducts (a sqrt(iX) on v, a sqrt(-iZ) on each
        neighbor, folded into the frames) keep the realized state unchanged.
        """
        self._require(v)
        for b in self._adj[v]:
            self._frames[b] = self._frames[b] @ _LC_NEIGHBOR
        self._frames[v] = self._frames[v] @ _LC_CENTER
        self._complement_adjacency(v)
        self.transcript.emit("lc", v)

    # -- measurements -----------------------------------------------------------

    def measure(
        self,
        v: QubitId,
        basis: str,
        outcome: int | None = None,
        neighbor: QubitId | None = None,
        purpose: str = "measure",
    ) -> MeasurementRecord:
        """Measure the physical qubit v in the given Pauli basis.

        The requested basis is conjugated through frame(v), the matching graph
        rule is applied, and outcome byproducts are folded into the remaining
        frames.  ``outcome`` forces the physical result (tests, replay);
        otherwise the transcript PRNG draws it.
        """
        self._require(v)
        if basis not in _BASIS_PAULI:
            raise GraphError(f"unknown basis {basis!r}")
        if outcome not in (None, 0, 1):
            raise GraphError(f"outcome must be 0 or 1, got {outcome!r}")
        f = self._frames[v]
        eff_pauli, sign = (~f).conjugate_pauli(_BASIS_PAULI[basis])
        flip = 1 if sign < 0 else 0

        if not self._adj[v] and eff_pauli == cl.PAULI_X:
            # X is in the stabilizer of an isolated vertex: deterministic.
            det = flip
            if outcome is None:
                outcome = det
            elif outcome != det:
                raise OutcomeError(f"forced outcome {outcome} on {v} has probability 0")
            prob = 1.0
        else:
            if outcome is None:
                outcome = self.transcript.draw_bit()
            prob = 0.5
        eff_outcome = outcome ^ flip

        if eff_pauli == cl.PAULI_Z:
            corrections = self._rule_z(v, eff_outcome)
        elif eff_pauli == cl.PAULI_Y:
            corrections = self._rule_y(v, eff_outcome)
        else:
            corrections = self._rule_x(v, eff_outcome, neighbor)

        record = MeasurementRecord(v, basis, outcome, prob, tuple(corrections))
        self.transcript.emit("measure", v, basis, outcome, purpose, tuple(corrections))
        return record

    def measure_z(self, v, outcome=None, purpose="measure"):
        return self.measure(v, "Z", outcome, purpose=purpose)

    def measure_y(self, v, outcome=None, purpose="measure"):
        return self.measure(v, "Y", outcome, purpose=purpose)

    def measure_x(self, v, outcome=None, neighbor=None, purpose="measure"):
        return self.measure(v, "X", outcome, neighbor=neighbor, purpose=purpose)

    def _remove_vertex(self, v: QubitId) -> None:
        for w in self._adj[v]:
            self._adj[w].discard(v)
        del self._adj[v]
        del self._frames[v]
        del self._roles[v]

    def _fold(self, targets: Iterable[QubitId], c: cl.LocalClifford) -> list[tuple[QubitId, cl.LocalClifford]]:
        out = []
        for w in sorted(targets):
            self._frames[w] = self._frames[w] @ c
            out.append((w, c))
        return out

    def _rule_z(self, v: QubitId, eff_outcome: int):
        nb = self._adj[v]
        corrections = self._fold(nb, cl.Z) if eff_outcome else []
        self._remove_vertex(v)
        return corrections

    def _rule_y(self, v: QubitId, eff_outcome: int):
        nb = set(self._adj[v])
        self._complement_adjacency(v)
        corrections = self._fold(nb, _Y_BYPRODUCT[eff_outcome])
        self._remove_vertex(v)
        return corrections

    def _rule_x(self, v: QubitId, eff_outcome: int, neighbor: QubitId | None):
        nb_v = set(self._adj[v])
        if not nb_v:
            self._remove_vertex(v)
            return []
        if neighbor is None:
            b0 = min(nb_v)
        else:
            if neighbor not in nb_v:
                raise GraphError(f"chosen neighbor {neighbor} is not adjacent to {v}")
            b0 = neighbor
        nb_b0 = set(self._adj[b0])
        if eff_outcome == 0:
            pivot_op = _X_BYPRODUCT[0]
            z_targets = nb_v - nb_b0 - {b0}
        else:
            pivot_op = _X_BYPRODUCT[1]
            z_targets = nb_b0 - nb_v - {v}
        self._complement_adjacency(b0)
        self._complement_adjacency(v)
        self._remove_vertex(v)
        self._complement_adjacency(b0)
        corrections = [(b0, pivot_op)]
        self._frames[b0] = self._frames[b0] @ pivot_op
        corrections += self._fold(z_targets - {b0}, cl.Z)
        return corrections

    # -- composite procedures ---------------------------------------------------

    def connect_wire(self, a: QubitId, b: QubitId, outcomes: tuple[int | None, int | None] = (None, None)):
        """Connecting procedure: CZ then Y-measure both degree-1 vertices.

        The unique former neighbors of a and b end up adjacent.  Corrections
        accumulated on the endpoints (including the first measurement's
        byproduct on b) are applied before each step so both measurements act
        as graph-level Y and the wire rule holds structurally.
        """
        for v in (a, b):
            if self.degree(v) != 1:
                raise GraphError(f"connect_wire needs degree-1 endpoints, {v} has degree {self.degree(v)}")
        if b in self._adj[a]:
            raise GraphError("connect_wire endpoints are already adjacent")
        (na,) = self._adj[a]
        (nb,) = self._adj[b]
        if na == nb:
            raise GraphError("connect_wire endpoints hang off the same vertex")
        self.resolve_frame(a, cl.I)
        self.resolve_frame(b, cl.I)
        self.apply_cz(a, b)
        ra = self.measure(a, "Y", outcomes[0], purpose="wire")
        self.resolve_frame(b, cl.I)
        rb = self.measure(b, "Y", outcomes[1], purpose="wire")
        return ra, rb

    def __repr__(self) -> str:
        return f"GraphState({len(self)} vertices, {len(self.edges())} edges)"


# Byproduct conventions, oracle-pinned (see tests/test_graphstate.py):
#   local complementation at v:   frame(v) *= sqrt(iX), frame(b) *= sqrt(-iZ)=S
#   Y measurement, outcome 0/1:   neighbors get S / Sdg
#   X measurement, outcome 0/1:   pivot gets sqrt(iY) / sqrt(-iY), plus Z fans
_LC_CENTER = cl.SQRT_IX
_LC_NEIGHBOR = cl.S
_Y_BYPRODUCT = (cl.S, cl.SDG)
_X_BYPRODUCT = (cl.SQRT_IY, cl.SQRT_MIY)


# -- spec-surface functions ------------------------------------------------------


def new_graph_state(vertices: Iterable[QubitId], edges: Iterable[tuple[QubitId, QubitId]] = (), seed: int | None = 0) -> GraphState:
    return GraphState(vertices, edges, seed=seed)


def apply_cz(state: GraphState, a: QubitId, b: QubitId) -> GraphState:
    state.apply_cz(a, b)
    return state


def local_complement(state: GraphState, v: QubitId) -> GraphState:
    state.local_complement(v)
    return state


def measure_z(state: GraphState, v: QubitId, outcome: int | None = None) -> tuple[GraphState, MeasurementRecord]:
    return state, state.measure_z(v, outcome)


def measure_y(state: GraphState, v: QubitId, outcome: int | None = None) -> tuple[GraphState, MeasurementRecord]:
    return state, state.measure_y(v, outcome)


def measure_x(
    state: GraphState, v: QubitId, outcome: int | None = None, neighbor: QubitId | None = None
) -> tuple[GraphState, MeasurementRecord]:
    return state, state.measure_x(v, outcome, neighbor=neighbor)


def cnot_merge(state: GraphState, source: QubitId, target: QubitId) -> GraphState:
    state.cnot_merge(source, target)
    return state


def connect_wire(state: GraphState, a: QubitId, b: QubitId) -> GraphState:
    state.connect_wire(a, b)
    return state


def is_bipartite(state: GraphState, vertices: Iterable[QubitId] | None = None) -> bool:
    """Two-colorability check (BFS bipartition) over an induced subgraph."""
    verts = sorted(vertices) if vertices is not None else sorted(state.vertices)
    vset = set(verts)
    color: dict[QubitId, int] = {}
    for start in verts:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for w in state.neighbors(v):
                if w not in vset:
                    continue
                if w not in color:
                    color[w] = color[v] ^ 1
                    queue.append(w)
                elif color[w] == color[v]:
                    return False
    return True


# -- LC orbit search -----------------------------------------------------------


def _adjacency_masks(state_or_edges, order: Sequence[QubitId]) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(order)}
    rows = [0] * len(order)
    if isinstance(state_or_edges, GraphState):
        pairs = state_or_edges.edges()
    else:
        pairs = list(state_or_edges)
    for a, b in pairs:
        rows[pos[a]] |= 1 << pos[b]
        rows[pos[b]] |= 1 << pos[a]
    return tuple(rows)


def _lc_mask(rows: tuple[int, ...], v: int) -> tuple[int, ...]:
    nb = rows[v]
    out = list(rows)
    m = nb
    while m:
        i = (m & -m).bit_length() - 1
        m &= m - 1
        out[i] ^= nb & ~(1 << i)
    return tuple(out)


def lc_orbit_equivalent(g1: GraphState, g2: GraphState, max_n: int = 8) -> bool:
    """Decide whether g2's adjacency is reachable from g1's by local complementations.

    Vertices are matched positionally in sorted order.  Breadth-first orbit
    search; sizes above ``max_n`` are rejected.
    """
    v1, v2 = sorted(g1.vertices), sorted(g2.vertices)
    if len(v1) != len(v2):
        return False
    if len(v1) > max_n:
        raise GraphError(f"lc_orbit_equivalent supports at most {max_n} vertices")
    start = _adjacency_masks(g1, v1)
    goal = _adjacency_masks(g2, v2)
    if start == goal:
        return True
    n = len(v1)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for rows in frontier:
            for v in range(n):
                if not rows[v]:
                    continue
                cand = _lc_mask(rows, v)
                if cand == goal:
                    return True
                if cand not in seen:
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return False
