"""Graph specs in, DOT/JSON/CSV out.

A graph spec is JSON with either ``{"n": 7, "m": 2}`` for a ring, ``{"n": 4,
"edges": [[1, 2], ...]}`` with 1-based ``(from, to)`` inhibition pairs, or
``{"adjacency": [[0, 1, ...], ...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import ValidationError
from .graph import CouplingGraph, from_adjacency, from_edges, make_ring
from .network import HetNetwork


def graph_from_spec(spec: dict) -> CouplingGraph:
    if not isinstance(spec, dict):
        raise ValidationError("graph spec must be a JSON object")
    if "adjacency" in spec:
        return from_adjacency(spec["adjacency"], label=spec.get("label"))
    if "n" not in spec:
        raise ValidationError("graph spec needs 'n' (with 'm' or 'edges') or 'adjacency'")
    n = int(spec["n"])
    if "edges" in spec:
        return from_edges(n, spec["edges"], label=spec.get("label"))
    return make_ring(n, int(spec.get("m", 1)))


def load_graph(path) -> CouplingGraph:
    try:
        spec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return graph_from_spec(spec)


def graph_spec(g: CouplingGraph) -> dict:
    if g.is_ring:
        return {"n": g.n, "m": g.ring_m}
    return {"n": g.n, "edges": [list(e) for e in g.edges()]}


def network_to_dict(net: HetNetwork) -> dict:
    sinks = {fp.active for fp in net.sinks}
    return {
        "graph": graph_spec(net.graph),
        "r": net.r,
        "gamma": net.gamma,
        "census": {str(k): v for k, v in net.census().items()},
        "fixed_points": [
            {"id": fp.key, "label": fp.label, "active": list(fp.active.members), "sink": fp.active in sinks}
            for fp in net.fixed_points
        ],
        "connections": [
            {"source": c.source.key, "target": c.target.key, "entering": c.entering,
             "displaced": list(c.displaced.members), "kind": c.kind_label}
            for c in net.connections
        ],
        "sinks": [fp.key for fp in net.sinks],
    }


def network_to_dot(net: HetNetwork) -> str:
    lines = ["digraph network {", "  rankdir=LR;", "  node [shape=circle];"]
    sinks = {fp.active for fp in net.sinks}
    for fp in net.fixed_points:
        shape = ", shape=doublecircle" if fp.active in sinks else ""
        lines.append(f'  {fp.key} [label="{fp.active.label}"{shape}];')
    for c in net.connections:
        lines.append(f'  {c.source.key} -> {c.target.key} [label="{c.entering}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
