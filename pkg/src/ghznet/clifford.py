"""The 24-element single-qubit Clifford group with precomputed tables.

Elements are interned ``LocalClifford`` objects indexed 0..23.  The canonical
form of an element is the pair of images of X and Z under conjugation (signs
included), which fixes the operator up to global phase.  Composition,
inversion and Pauli conjugation are table lookups; the tables are built once
at import from explicit 2x2 matrices.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

# Pauli indices used throughout: 0=X, 1=Y, 2=Z.
PAULI_X, PAULI_Y, PAULI_Z = 0, 1, 2
PAULI_NAMES = ("X", "Y", "Z")

_SQ2 = 1.0 / np.sqrt(2.0)

_PAULI_MATS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_ID2 = np.eye(2, dtype=complex)
_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
_S_MAT = np.array([[1, 0], [0, 1j]], dtype=complex)


def _phase_canonical(m: np.ndarray) -> np.ndarray:
    """Normalize global phase: first element of largest magnitude becomes real positive."""
    flat = m.ravel()
    idx = int(np.argmax(np.abs(flat) > 1e-9))
    return m / (flat[idx] / abs(flat[idx]))


def _conj_images(m: np.ndarray) -> tuple[tuple[int, int], tuple[int, int]]:
    """Images of X and Z under conjugation by m, as (pauli, sign) pairs."""
    out = []
    for p in (PAULI_X, PAULI_Z):
        c = m @ _PAULI_MATS[p] @ m.conj().T
        for q in (PAULI_X, PAULI_Y, PAULI_Z):
            tr = np.trace(c @ _PAULI_MATS[q]) / 2.0
            if abs(tr - 1) < 1e-9:
                out.append((q, 1))
                break
            if abs(tr + 1) < 1e-9:
                out.append((q, -1))
                break
        else:
            raise ValueError("matrix is not Clifford")
    return out[0], out[1]


def _build_group() -> list[np.ndarray]:
    """Enumerate the 24 Cliffords by BFS over {H, S} products, deterministic order."""
    seen: dict[tuple[tuple[int, int], tuple[int, int]], np.ndarray] = {}
    frontier = [_ID2]
    order: list[np.ndarray] = []
    while frontier:
        nxt = []
        for m in frontier:
            key = _conj_images(m)
            if key in seen:
                continue
            mc = _phase_canonical(m)
            seen[key] = mc
            order.append(mc)
            nxt.append(mc @ _H_MAT)
            nxt.append(mc @ _S_MAT)
        frontier = nxt
    assert len(order) == 24
    return order


_MATRICES = _build_group()
_KEY_TO_INDEX = {_conj_images(m): i for i, m in enumerate(_MATRICES)}


def _index_of(m: np.ndarray) -> int:
    return _KEY_TO_INDEX[_conj_images(m)]


_MUL = [[_index_of(_MATRICES[a] @ _MATRICES[b]) for b in range(24)] for a in range(24)]
_INV = [next(b for b in range(24) if _MUL[a][b] == 0) for a in range(24)]
# _CONJ[c][p] = (p', sign) with  M_c P M_c^dag = sign * P'
_CONJ = [
    tuple(
        next(
            (q, s)
            for q in (PAULI_X, PAULI_Y, PAULI_Z)
            for s in (1, -1)
            if np.allclose(
                _MATRICES[c] @ _PAULI_MATS[p] @ _MATRICES[c].conj().T,
                s * _PAULI_MATS[q],
                atol=1e-9,
            )
        )
        for p in (PAULI_X, PAULI_Y, PAULI_Z)
    )
    for c in range(24)
]


class LocalClifford:
    """One of the 24 single-qubit Cliffords, canonical up to global phase.

    Instances are interned; ``a @ b`` composes (a after b), ``~a`` inverts.
    """

    _instances: list["LocalClifford"] = []
    __slots__ = ("index",)

    def __new__(cls, index: int) -> "LocalClifford":
        if not 0 <= index < 24:
            raise ValueError(f"Clifford index out of range: {index}")
        if index < len(cls._instances):
            return cls._instances[index]
        obj = super().__new__(cls)
        return obj

    def __init__(self, index: int) -> None:
        self.index = index

    def __matmul__(self, other: "LocalClifford") -> "LocalClifford":
        return ALL[_MUL[self.index][other.index]]

    def __invert__(self) -> "LocalClifford":
        return ALL[_INV[self.index]]

    def conjugate_pauli(self, pauli: int) -> tuple[int, int]:
        """Return (pauli', sign) with  C P C^dag = sign * P'."""
        return _CONJ[self.index][pauli]

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self.index]

    @property
    def is_identity(self) -> bool:
        return self.index == 0

    @property
    def is_diagonal(self) -> bool:
        """True for {I, S, Z, Sdg}: the frames apply_cz accepts."""
        return _CONJ[self.index][PAULI_Z] == (PAULI_Z, 1)

    @property
    def is_pauli(self) -> bool:
        return all(_CONJ[self.index][p][0] == p for p in range(3))

    @property
    def name(self) -> str:
        return _NAMES.get(self.index, f"C{self.index}")

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalClifford) and other.index == self.index

    def __hash__(self) -> int:
        return hash(("LocalClifford", self.index))


LocalClifford._instances = []
ALL: list[LocalClifford] = []
for _i in range(24):
    _obj = LocalClifford(_i)
    LocalClifford._instances.append(_obj)
    ALL.append(_obj)


def _find(mat: np.ndarray) -> LocalClifford:
    return ALL[_index_of(mat)]


I = _find(_ID2)
X = _find(_PAULI_MATS[0])
Y = _find(_PAULI_MATS[1])
Z = _find(_PAULI_MATS[2])
H = _find(_H_MAT)
S = _find(_S_MAT)
SDG = ~S

# Square roots of (+-i P), fixed by their conjugation action; these appear as
# local-complementation and measurement byproducts.
SQRT_IX = _find((_ID2 + 1j * _PAULI_MATS[0]) * _SQ2)    # exp(+i pi/4 X)
SQRT_MIX = _find((_ID2 - 1j * _PAULI_MATS[0]) * _SQ2)   # exp(-i pi/4 X)
SQRT_IY = _find((_ID2 + 1j * _PAULI_MATS[1]) * _SQ2)    # exp(+i pi/4 Y)
SQRT_MIY = _find((_ID2 - 1j * _PAULI_MATS[1]) * _SQ2)   # exp(-i pi/4 Y)
SQRT_IZ = _find((_ID2 + 1j * _PAULI_MATS[2]) * _SQ2)    # exp(+i pi/4 Z), = Sdg up to phase
SQRT_MIZ = _find((_ID2 - 1j * _PAULI_MATS[2]) * _SQ2)   # exp(-i pi/4 Z), = S up to phase

_NAMES = {
    I.index: "I",
    X.index: "X",
    Y.index: "Y",
    Z.index: "Z",
    H.index: "H",
    S.index: "S",
    SDG.index: "Sdg",
    SQRT_IX.index: "sqrt(iX)",
    SQRT_MIX.index: "sqrt(-iX)",
    SQRT_IY.index: "sqrt(iY)",
    SQRT_MIY.index: "sqrt(-iY)",
}

DIAGONAL = tuple(c for c in ALL if c.is_diagonal)
PAULIS = (I, X, Y, Z)

_BY_NAME = {c.name: c for c in ALL}


def by_name(name: str) -> LocalClifford:
    """Look up a Clifford by its repr name (used by transcript replay)."""
    return _BY_NAME[name]


def iter_all() -> Iterator[LocalClifford]:
    return iter(ALL)
