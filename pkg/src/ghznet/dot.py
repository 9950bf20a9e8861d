"""Graphviz DOT export with role-based vertex styling and stable ordering."""

from __future__ import annotations

from typing import Iterable

from ghznet.graphstate import GraphState
from ghznet.ids import QubitId

_ROLE_STYLE = {
    "root": 'shape=diamond',
    "decorator": 'shape=circle, width=0.15, fixedsize=true, label=""',
    "proxy": 'style=filled, fillcolor=lightgrey',
    "network-proxy": 'style=filled, fillcolor=lightsteelblue',
    "client-qubit": 'shape=doublecircle',
    "adapter": 'shape=trapezium',
    "expander": 'shape=house',
}


def _node_id(q: QubitId) -> str:
    return f'"{q.location}.{q.index}"'


def to_dot(state: GraphState, vertices: Iterable[QubitId] | None = None, name: str = "G") -> str:
    verts = sorted(vertices) if vertices is not None else sorted(state.vertices)
    vset = set(verts)
    lines = [f"graph {name} {{", "  node [shape=ellipse];"]
    for v in verts:
        attrs = []
        style = _ROLE_STYLE.get(state.role(v))
        if style:
            attrs.append(style)
        frame = state.frame(v)
        if not frame.is_identity:
            attrs.append(f'xlabel="{frame.name}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_node_id(v)}{suffix};")
    for a, b in state.edges():
        if a in vset and b in vset:
            lines.append(f"  {_node_id(a)} -- {_node_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
