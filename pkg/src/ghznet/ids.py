"""Qubit identifiers: (owning location, index unique within that location)."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class QubitId:
    """Identifies one qubit by its owning node and a local index.

    Ordering is lexicographic on (location, index); every deterministic
    tie-break in the simulator uses this order.
    """

    location: str
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"negative qubit index: {self.index}")

    def __str__(self) -> str:
        return f"{self.location}.{self.index}"


def qid(location: str, index: int) -> QubitId:
    return QubitId(location, index)
