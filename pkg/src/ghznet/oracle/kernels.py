"""Kernel backend selection: compiled extension if built, numpy otherwise."""

from __future__ import annotations

try:
    from ghznet.oracle import _ckernels as _impl  # type: ignore[attr-defined]
except ImportError:
    from ghznet.oracle import _pykernels as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
apply_1q = _impl.apply_1q
apply_cz = _impl.apply_cz
apply_cnot = _impl.apply_cnot
prob_zero = _impl.prob_zero
collapse_z = _impl.collapse_z
