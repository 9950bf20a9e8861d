"""Dense state-vector verification oracle."""

from ghznet.oracle.kernels import BACKEND
from ghznet.oracle.statevector import (
    MAX_QUBITS,
    OracleError,
    StateVector,
    apply_gate,
    equal_up_to_phase,
    ghz_vector,
    graph_vector,
    realize,
)

__all__ = [
    "BACKEND",
    "MAX_QUBITS",
    "OracleError",
    "StateVector",
    "apply_gate",
    "equal_up_to_phase",
    "ghz_vector",
    "graph_vector",
    "realize",
]
