"""Network document format (JSON) and Graphviz DOT export.

The document is a single JSON text with top-level keys `variables`, `edges`
and `cpts`, plus an optional `edge_strengths` annotation written by the
learning pipeline and used to scale arrow thickness in figures. Probabilities
round-trip bit-exactly: row sums may drift from 1 by at most 1e-9 (the same
tolerance the in-memory tables enforce), larger deviations are rejected.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .core import ROW_SUM_TOL, Cpt, Dag, Network, Variable, build_network, topological_order
from .errors import ParseError, RowNotNormalized

Strengths = dict[tuple[str, str], float]


def serialize_network(network: Network, *, edge_strengths: Strengths | None = None) -> str:
    """Render a Network to its canonical JSON document text.

    Output is deterministic: declaration order for variables and cpts,
    sorted order for edges.
    """
    doc: dict[str, Any] = {
        "variables": [
            {"name": v.name, "states": list(v.states), "kind": v.kind}
            for v in network.dag.variables
        ],
        "edges": [list(e) for e in sorted(network.dag.edges)],
        "cpts": [
            {
                "child": name,
                "parents": list(network.cpts[name].parents),
                "rows": [list(row) for row in network.cpts[name].table],
            }
            for name in (v.name for v in network.dag.variables)
        ],
    }
    if edge_strengths is not None:
        doc["edge_strengths"] = {
            f"{p}->{c}": s for (p, c), s in sorted(edge_strengths.items())
        }
    return json.dumps(doc, indent=2) + "\n"


def deserialize_network(text: str) -> Network:
    """Parse a network document; inverse of `serialize_network`."""
    network, _ = deserialize_network_with_strengths(text)
    return network


def deserialize_network_with_strengths(text: str) -> tuple[Network, Strengths | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", location=f"line {exc.lineno}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object", location="top level")

    for key in ("variables", "edges", "cpts"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}", location="top level")

    raw_vars = doc["variables"]
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ParseError("variables must be a non-empty list", location="variables")
    variables = []
    for i, rv in enumerate(raw_vars):
        loc = f"variables[{i}]"
        if not isinstance(rv, dict):
            raise ParseError("variable entry must be an object", location=loc)
        try:
            variables.append(
                Variable(
                    name=rv["name"],
                    states=tuple(rv["states"]),
                    kind=rv.get("kind", "nominal"),
                )
            )
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", location=loc) from None
        except ValueError as exc:
            raise ParseError(str(exc), location=loc) from None

    raw_edges = doc["edges"]
    if not isinstance(raw_edges, list):
        raise ParseError("edges must be a list", location="edges")
    edges = set()
    for i, re_ in enumerate(raw_edges):
        if not (isinstance(re_, list) and len(re_) == 2):
            raise ParseError("edge must be a [parent, child] pair", location=f"edges[{i}]")
        edges.add((re_[0], re_[1]))

    dag = Dag(variables=tuple(variables), edges=frozenset(edges))
    by_name = {v.name: v for v in variables}

    raw_cpts = doc["cpts"]
    if not isinstance(raw_cpts, list):
        raise ParseError("cpts must be a list", location="cpts")
    cpts = []
    for i, rc in enumerate(raw_cpts):
        loc = f"cpts[{i}]"
        if not isinstance(rc, dict):
            raise ParseError("cpt entry must be an object", location=loc)
        try:
            child = rc["child"]
            parents = tuple(rc["parents"])
            rows = rc["rows"]
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", location=loc) from None
        if child not in by_name:
            raise ParseError(f"cpt child {child!r} is not declared", location=loc)
        for p in parents:
            if p not in by_name:
                raise ParseError(f"cpt parent {p!r} is not declared", location=loc)
        table = np.asarray(rows, dtype=float)
        if table.ndim != 2:
            raise ParseError("rows must be a rectangular list of lists", location=loc)
        _check_rows(table, child)
        cpts.append(
            Cpt(
                child=child,
                parents=parents,
                parent_cards=tuple(by_name[p].cardinality for p in parents),
                table=table,
            )
        )

    network = build_network(dag, cpts)

    strengths: Strengths | None = None
    if "edge_strengths" in doc:
        strengths = {}
        for key, value in doc["edge_strengths"].items():
            parent, sep, child = key.partition("->")
            if not sep:
                raise ParseError(f"bad edge key {key!r}", location="edge_strengths")
            strengths[(parent, child)] = float(value)
    return network, strengths


def _check_rows(table: np.ndarray, child: str) -> None:
    sums = table.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        raise RowNotNormalized(
            f"cpt for {child!r}: row {bad[0]} sums to {sums[bad[0]]!r} "
            f"(deviation exceeds {ROW_SUM_TOL})"
        )


def to_dot(dag: Dag, *, edge_strengths: Strengths | None = None,
           response_variables: tuple[str, ...] = ()) -> str:
    """Graphviz DOT text for the DAG, arrow penwidth scaled by edge strength."""
    lines = ["digraph bbn {", "  rankdir=LR;", "  node [shape=box, style=rounded];"]
    for v in dag.variables:
        attrs = ""
        if v.name in response_variables:
            attrs = ' [style="rounded,filled", fillcolor=lightgreen]'
        lines.append(f'  "{v.name}"{attrs};')
    widths = _edge_widths(dag, edge_strengths)
    for parent, child in sorted(dag.edges):
        attrs = []
        if edge_strengths is not None and (parent, child) in edge_strengths:
            attrs.append(f"penwidth={widths[(parent, child)]:.3f}")
            attrs.append(f'label="{edge_strengths[(parent, child)]:.2f}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{parent}" -> "{child}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _edge_widths(dag: Dag, strengths: Strengths | None,
                 lo: float = 0.6, hi: float = 3.4) -> dict[tuple[str, str], float]:
    """Map strengths linearly into a readable penwidth range."""
    if not strengths:
        return {}
    values = [strengths[e] for e in dag.edges if e in strengths]
    vmin, vmax = min(values), max(values)
    span = vmax - vmin
    if span <= 0:
        return {e: (lo + hi) / 2 for e in strengths}
    return {e: lo + (hi - lo) * (s - vmin) / span for e, s in strengths.items()}


def layout_depths(dag: Dag) -> dict[str, int]:
    """Topological depth per variable: roots at 0, children right of parents."""
    depth = {name: 0 for name in (v.name for v in dag.variables)}
    for name in topological_order(dag):
        for parent, child in dag.edges:
            if parent == name:
                depth[child] = max(depth[child], depth[name] + 1)
    return depth
