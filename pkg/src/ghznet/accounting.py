"""Closed-form resource formulas, measured-run counters, and comparison tables.

Device-level numbers are for the naive fully connected worst-case target;
network-level numbers count the network state only (for the GHZ architecture
the expanded state), never expander or adapter qubits, which measured runs
itemize separately.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

from ghznet.graphstate import Transcript


class AccountingError(ValueError):
    pass


@dataclass
class ResourceReport:
    architecture: str
    level: str
    qubits: int
    cnots: int | None = None
    measurements: int | None = None
    parameters: dict = field(default_factory=dict)
    secure: bool = False
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("qubits", "cnots", "measurements"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 0):
                raise AccountingError(f"{name} must be a non-negative integer, got {v!r}")


# ------------------------------------------------------------------ formulas


def device_formula(arch: str, n: int) -> ResourceReport:
    """Device-level storage and operation counts for the fully connected target."""
    if n < 2:
        raise AccountingError(f"device formulas need n >= 2, got {n}")
    arch = arch.upper()
    if arch == "D":
        qubits, cnots, meas = n * (n - 1), n * (n - 2), n * (n - 2)
    elif arch == "A":
        qubits = n * (n + 1) // 2 - 1
        cnots = meas = n * (n - 1) // 2 - 1
    elif arch == "B":
        qubits, cnots, meas = n * (n + 1) // 2, None, n * (n - 1) // 2
    else:
        raise AccountingError(f"no device formula for architecture {arch!r}")
    return ResourceReport(arch, "device", qubits, cnots, meas, {"n": n})


def network_formula(arch: str, m: int, c: Sequence[int], secure: bool = False) -> ResourceReport:
    """Network-state qubit counts connecting all clients across devices."""
    c = list(c)
    if m < 2:
        raise AccountingError(f"network formulas need m >= 2, got {m}")
    if len(c) != m:
        raise AccountingError(f"need {m} client counts, got {len(c)}")
    if any(x < 1 for x in c):
        raise AccountingError("client counts must be >= 1")
    arch = arch.upper()
    if arch == "D":
        qubits = 2 * sum(c[i] * c[j] for i in range(m) for j in range(i + 1, m))
    elif arch == "A":
        qubits = sum(c[i] * (1 + sum(c[:i])) for i in range(1, m))
    elif arch == "B":
        if secure:
            qubits = sum(
                c[i] * (1 + sum(c) - c[i] + sum(c[i + 1 :])) for i in range(m)
            )
        else:
            qubits = sum(c[i] * (1 + sum(c[i + 1 :])) for i in range(m))
    else:
        raise AccountingError(f"no network formula for architecture {arch!r}")
    return ResourceReport(arch, "network", qubits, parameters={"m": m, "c": c}, secure=secure)


# ------------------------------------------------------------- measured runs


def measured_counts(
    transcript: Transcript,
    event_range: tuple[int, int] | None = None,
    architecture: str = "?",
    level: str = "run",
) -> ResourceReport:
    """Count qubits, entangling gates, and measurements actually performed.

    Teleportation measurements are itemized in ``extras`` and excluded from
    the headline measurement count, matching the formula tables' scope.
    Expander and adapter allocations are likewise itemized separately.
    """
    events = transcript.events
    lo, hi = event_range if event_range is not None else (0, len(events))
    qubits = cnots = czs = rotations = 0
    by_role: dict[str, int] = {}
    by_purpose: dict[str, int] = {}
    for e in events[lo:hi]:
        kind = e[0]
        if kind == "create":
            qubits += 1
            by_role[e[2]] = by_role.get(e[2], 0) + 1
        elif kind == "cnot":
            cnots += 1
        elif kind == "cz":
            czs += 1
        elif kind == "rotate":
            rotations += 1
        elif kind == "measure":
            by_purpose[e[4]] = by_purpose.get(e[4], 0) + 1
    teleport = by_purpose.get("teleport", 0)
    measurements = sum(v for k, v in by_purpose.items() if k != "teleport")
    return ResourceReport(
        architecture,
        level,
        qubits,
        cnots,
        measurements,
        extras={
            "cz_gates": czs,
            "rotations": rotations,
            "teleport_measurements": teleport,
            "qubits_by_role": dict(sorted(by_role.items())),
            "measurements_by_purpose": dict(sorted(by_purpose.items())),
            "expander_qubits": _role_total(by_role, "expander"),
            "adapter_qubits": _role_total(by_role, "adapter"),
        },
    )


def _role_total(by_role: dict[str, int], root_role: str) -> int:
    # expander/adapter components are created root-first; their leaves carry
    # the generic leaf role, so roots alone identify the component count
    return by_role.get(root_role, 0)


# ------------------------------------------------------------------- tables

_TABLE2_NS = (5, 10, 15)
_TABLE4_CS = (3, 5, 7)
_TABLE4_MS = (5, 10, 15)
_METRICS = ("Qubits", "CNOT", "Meas.")


def table2_rows() -> list[tuple]:
    """(n, metric, D, A, B) rows of the device-level value table."""
    rows = []
    for n in _TABLE2_NS:
        reports = {a: device_formula(a, n) for a in ("D", "A", "B")}
        rows.append((n, "Qubits", *[reports[a].qubits for a in ("D", "A", "B")]))
        rows.append((n, "CNOT", *[reports[a].cnots for a in ("D", "A", "B")]))
        rows.append((n, "Meas.", *[reports[a].measurements for a in ("D", "A", "B")]))
    return rows


def table4_rows() -> list[tuple]:
    """(c, m, D, A, B) rows of the network-level value table."""
    rows = []
    for cval in _TABLE4_CS:
        for m in _TABLE4_MS:
            c = [cval] * m
            rows.append(
                (
                    cval,
                    m,
                    network_formula("D", m, c).qubits,
                    network_formula("A", m, c).qubits,
                    network_formula("B", m, c).qubits,
                )
            )
    return rows


def _fmt(x) -> str:
    return "-" if x is None else str(x)


def render_tables() -> dict[str, str]:
    """Render both value tables as aligned text and CSV, byte-stable."""
    out = {}
    buf = io.StringIO()
    buf.write("Device-level resources, fully connected target\n")
    buf.write("  n | metric |    D |    A |    B\n")
    buf.write("----+--------+------+------+-----\n")
    for n, metric, d, a, b in table2_rows():
        buf.write(f"{n:>3} | {metric:<6} | {_fmt(d):>4} | {_fmt(a):>4} | {_fmt(b):>4}\n")
    out["table2.txt"] = buf.getvalue()

    buf = io.StringIO()
    buf.write("n,metric,D,A,B\n")
    for n, metric, d, a, b in table2_rows():
        buf.write(f"{n},{metric},{_fmt(d).replace('-', '')},{_fmt(a)},{_fmt(b)}\n")
    out["table2.csv"] = buf.getvalue()

    buf = io.StringIO()
    buf.write("Network-state qubits, uniform clients per device\n")
    buf.write("  c |  m |     D |     A |     B\n")
    buf.write("----+----+-------+-------+------\n")
    for cval, m, d, a, b in table4_rows():
        buf.write(f"{cval:>3} | {m:>2} | {d:>5} | {a:>5} | {b:>5}\n")
    out["table4.txt"] = buf.getvalue()

    buf = io.StringIO()
    buf.write("c,m,D,A,B\n")
    for cval, m, d, a, b in table4_rows():
        buf.write(f"{cval},{m},{d},{a},{b}\n")
    out["table4.csv"] = buf.getvalue()
    return out
