"""Dense state-vector oracle used to verify the graph calculus at desk scale.

Every function is exact up to double precision; states are hard-capped at 16
qubits so each check stays sub-second.  Larger states bypass the oracle and
rely on the graph calculus alone.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np

from ghznet import clifford as cl
from ghznet.ids import QubitId
from ghznet.oracle import kernels

if TYPE_CHECKING:
    from ghznet.graphstate import GraphState

MAX_QUBITS = 16
_ATOL = 1e-9

_BASIS_TO_Z = {
    "Z": cl.I,
    "X": cl.H,
    "Y": cl.H @ cl.SDG,  # maps Y to Z by conjugation
}


class OracleError(ValueError):
    pass


class StateVector:
    """2**n complex amplitudes plus the qubit ordering of the tensor axes."""

    __slots__ = ("qubits", "amps")

    def __init__(self, qubits: Sequence[QubitId], amps: np.ndarray | None = None):
        qubits = tuple(qubits)
        if len(set(qubits)) != len(qubits):
            raise OracleError("duplicate qubit in state vector order")
        if len(qubits) > MAX_QUBITS:
            raise OracleError(f"{len(qubits)} qubits exceeds oracle cap of {MAX_QUBITS}")
        self.qubits = qubits
        if amps is None:
            amps = np.full(2 ** len(qubits), 2 ** (-len(qubits) / 2), dtype=complex)
        self.amps = np.ascontiguousarray(amps, dtype=complex)
        if self.amps.shape != (2 ** len(qubits),):
            raise OracleError("amplitude array has wrong length")

    @property
    def n(self) -> int:
        return len(self.qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.qubits, self.amps.copy())

    def pos(self, q: QubitId) -> int:
        try:
            return self.qubits.index(q)
        except ValueError:
            raise OracleError(f"unknown qubit {q}") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    # -- gates ---------------------------------------------------------------

    def apply_clifford(self, q: QubitId, c: cl.LocalClifford) -> "StateVector":
        kernels.apply_1q(self.amps, self.n, self.pos(q), c.matrix)
        return self

    def apply_matrix(self, q: QubitId, u: np.ndarray) -> "StateVector":
        kernels.apply_1q(self.amps, self.n, self.pos(q), np.asarray(u, dtype=complex))
        return self

    def apply_cz(self, a: QubitId, b: QubitId) -> "StateVector":
        if a == b:
            raise OracleError("CZ needs two distinct qubits")
        kernels.apply_cz(self.amps, self.n, self.pos(a), self.pos(b))
        return self

    def apply_cnot(self, source: QubitId, target: QubitId) -> "StateVector":
        if source == target:
            raise OracleError("CNOT needs two distinct qubits")
        kernels.apply_cnot(self.amps, self.n, self.pos(source), self.pos(target))
        return self

    # -- measurement ---------------------------------------------------------

    def probability(self, q: QubitId, basis: str, outcome: int) -> float:
        work = self.copy()
        work.apply_clifford(q, _BASIS_TO_Z[basis])
        p0 = kernels.prob_zero(work.amps, work.n, work.pos(q))
        return p0 if outcome == 0 else 1.0 - p0

    def project(self, q: QubitId, basis: str, outcome: int) -> tuple["StateVector", float]:
        """Post-measurement state (qubit kept in its eigenstate) and Born probability."""
        if basis not in _BASIS_TO_Z:
            raise OracleError(f"unknown basis {basis!r}")
        if outcome not in (0, 1):
            raise OracleError(f"outcome must be 0 or 1, got {outcome!r}")
        rot = _BASIS_TO_Z[basis]
        out = self.copy()
        out.apply_clifford(q, rot)
        pos = out.pos(q)
        p0 = kernels.prob_zero(out.amps, out.n, pos)
        p = p0 if outcome == 0 else 1.0 - p0
        if p < 1e-12:
            raise OracleError(f"forced outcome {outcome} on {q} has probability {p:.3e}")
        kernels.collapse_z(out.amps, out.n, pos, outcome, np.sqrt(p))
        out.apply_clifford(q, ~rot)
        return out, float(p)

    def drop_qubit(self, q: QubitId, basis: str, outcome: int) -> "StateVector":
        """Factor out qubit q, known to be in the given basis eigenstate."""
        work = self.copy()
        work.apply_clifford(q, _BASIS_TO_Z[basis])
        pos = work.pos(q)
        v = work.amps.reshape((2,) * work.n)
        sl = [slice(None)] * work.n
        sl[pos] = outcome
        rest = np.ascontiguousarray(v[tuple(sl)]).reshape(-1)
        nrm = np.linalg.norm(rest)
        if nrm < 1e-9:
            raise OracleError(f"qubit {q} is not in the claimed eigenstate")
        rest = rest / nrm
        remaining = tuple(x for x in work.qubits if x != q)
        return StateVector(remaining, rest)

    # -- comparison ----------------------------------------------------------

    def reorder(self, qubits: Sequence[QubitId]) -> "StateVector":
        qubits = tuple(qubits)
        if set(qubits) != set(self.qubits):
            raise OracleError("reorder must permute the existing qubits")
        perm = [self.qubits.index(q) for q in qubits]
        v = self.amps.reshape((2,) * self.n).transpose(perm)
        return StateVector(qubits, np.ascontiguousarray(v).reshape(-1))

    def fidelity(self, other: "StateVector") -> float:
        if set(self.qubits) != set(other.qubits):
            raise OracleError("states are over different qubits")
        o = other if other.qubits == self.qubits else other.reorder(self.qubits)
        return float(abs(np.vdot(self.amps, o.amps)))

    def __repr__(self) -> str:
        return f"StateVector(n={self.n}, qubits={[str(q) for q in self.qubits]})"


def realize(state: "GraphState", vertices: Sequence[QubitId] | None = None) -> StateVector:
    """Build the physical state (frames applied) of a graph state component.

    ``vertices`` restricts to an induced subcomponent; it must not share any
    edge with the rest of the graph.
    """
    if vertices is None:
        verts = sorted(state.vertices)
    else:
        verts = sorted(vertices)
        vset = set(verts)
        for v in verts:
            stray = state.neighbors(v) - vset
            if stray:
                raise OracleError(f"vertex {v} has edges leaving the requested set: {sorted(map(str, stray))}")
    sv = StateVector(verts)
    for v in verts:
        for w in state.neighbors(v):
            if v < w:
                sv.apply_cz(v, w)
    for v in verts:
        f = state.frame(v)
        if not f.is_identity:
            sv.apply_clifford(v, f)
    return sv


def graph_vector(vertices: Sequence[QubitId], edges: Sequence[tuple[QubitId, QubitId]]) -> StateVector:
    """Plain graph state |G> = prod CZ |+>^n, no frames."""
    sv = StateVector(sorted(vertices))
    for a, b in edges:
        sv.apply_cz(a, b)
    return sv


def ghz_vector(qubits: Sequence[QubitId]) -> StateVector:
    """(|0...0> + |1...1>)/sqrt(2) over the given qubits in sorted order."""
    qs = tuple(sorted(qubits))
    amps = np.zeros(2 ** len(qs), dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return StateVector(qs, amps)


def equal_up_to_phase(v1: StateVector, v2: StateVector, atol: float = _ATOL) -> bool:
    if set(v1.qubits) != set(v2.qubits):
        raise OracleError("states are over different qubits")
    return v1.fidelity(v2) > 1.0 - atol


def apply_gate(v: StateVector, gate, targets: Sequence[QubitId]) -> StateVector:
    """Spec-surface gate application: CZ, CNOT, or a 1-qubit Clifford/matrix."""
    out = v.copy()
    if isinstance(gate, str):
        name = gate.upper()
        if name == "CZ":
            return out.apply_cz(*targets)
        if name == "CNOT":
            return out.apply_cnot(*targets)
        raise OracleError(f"unknown gate {gate!r}")
    if isinstance(gate, cl.LocalClifford):
        (q,) = targets
        return out.apply_clifford(q, gate)
    (q,) = targets
    return out.apply_matrix(q, gate)
