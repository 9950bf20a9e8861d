"""ghznet: simulator for graph-state distribution architectures in quantum networks."""

from ghznet.ids import QubitId, qid

__all__ = ["QubitId", "qid"]
__version__ = "0.1.0"
