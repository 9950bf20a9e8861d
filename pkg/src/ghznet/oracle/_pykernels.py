"""Pure-numpy state-vector kernels (import-time fallback for the C extension).

All kernels mutate ``amps`` in place.  ``amps`` is a contiguous complex128
array of length 2**n; qubit q occupies tensor axis q, i.e. bit (n-1-q) of the
flat index, so qubit 0 is the most significant bit.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _axis_views(amps: np.ndarray, n: int, q: int):
    v = amps.reshape((2,) * n)
    sl0 = [slice(None)] * n
    sl1 = [slice(None)] * n
    sl0[q] = slice(0, 1)
    sl1[q] = slice(1, 2)
    return v[tuple(sl0)], v[tuple(sl1)]


def apply_1q(amps: np.ndarray, n: int, q: int, u: np.ndarray) -> None:
    a0, a1 = _axis_views(amps, n, q)
    t0 = a0.copy()
    a0[...] = u[0, 0] * t0 + u[0, 1] * a1
    a1[...] = u[1, 0] * t0 + u[1, 1] * a1


def apply_cz(amps: np.ndarray, n: int, a: int, b: int) -> None:
    v = amps.reshape((2,) * n)
    sl = [slice(None)] * n
    sl[a] = slice(1, 2)
    sl[b] = slice(1, 2)
    v[tuple(sl)] *= -1


def apply_cnot(amps: np.ndarray, n: int, c: int, t: int) -> None:
    v = amps.reshape((2,) * n)
    sl0 = [slice(None)] * n
    sl1 = [slice(None)] * n
    sl0[c] = slice(1, 2)
    sl1[c] = slice(1, 2)
    sl0[t] = slice(0, 1)
    sl1[t] = slice(1, 2)
    tmp = v[tuple(sl0)].copy()
    v[tuple(sl0)] = v[tuple(sl1)]
    v[tuple(sl1)] = tmp


def prob_zero(amps: np.ndarray, n: int, q: int) -> float:
    a0, _ = _axis_views(amps, n, q)
    return float(np.sum(np.abs(a0) ** 2))


def collapse_z(amps: np.ndarray, n: int, q: int, outcome: int, norm: float) -> None:
    a0, a1 = _axis_views(amps, n, q)
    if outcome == 0:
        a1[...] = 0.0
        a0 /= norm
    else:
        a0[...] = 0.0
        a1 /= norm
