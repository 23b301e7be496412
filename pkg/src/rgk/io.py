"""JSON documents ("rgk-graph/1", "rgk-rep/1", "rgk-glued/1") and DOT export.

Rationals are written as "p/q" strings and integers as bare numbers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .cyclic import Unwinding, cyclic_from_list, label_key
from .graph import FREE, GraphError, validate_graph
from .linalg import frac
from .quiver import ConicLagrangian, Quiver, Rep, make_quiver, make_rep, quiver_from_lagrangian
from .ribbon import ChordalStructure, RibbonError, RibbonGraph, validate_chordal

GRAPH_FORMAT = "rgk-graph/1"
REP_FORMAT = "rgk-rep/1"
GLUED_FORMAT = "rgk-glued/1"


class DocumentError(ValueError):
    """A document that parses as JSON but does not describe a valid object."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def num_out(x):
    x = frac(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def num_in(x) -> Fraction:
    if isinstance(x, bool):
        raise DocumentError(f"not a number: {x!r}")
    try:
        return frac(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise DocumentError(f"not a rational number: {x!r}")


def matrix_out(m):
    return [[num_out(x) for x in row] for row in m]


def matrix_in(m):
    return [[num_in(x) for x in row] for row in m]


def parse_json(text: str):
    """json.loads with line/column in the error message."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"JSON parse error at line {e.lineno}, column {e.colno}: {e.msg}")


# ---------------------------------------------------------------------------
# graphs

@dataclass(frozen=True)
class GraphDocument:
    ribbon: RibbonGraph
    zero_section: Optional[frozenset] = None
    grading: Optional[dict] = None  # the raw grading block, interpreted by `grading_from_block`

    @property
    def graph(self):
        return self.ribbon.graph

    @property
    def chordal(self) -> Optional[ChordalStructure]:
        if self.zero_section is None:
            return None
        return validate_chordal(self.ribbon, self.zero_section)


def document_from_json(data) -> GraphDocument:
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")
    if data.get("format") != GRAPH_FORMAT:
        raise DocumentError(f"format tag must be {GRAPH_FORMAT!r}, got {data.get('format')!r}")
    for key in ("vertices", "edges", "orders"):
        if key not in data:
            raise DocumentError(f"missing field {key!r}")
    edges = []
    for e in data["edges"]:
        if not isinstance(e, dict) or "id" not in e or "ends" not in e:
            raise DocumentError(f"edge entries need 'id' and 'ends': {e!r}")
        lo, hi = e.get("interval", [0, 1])
        edges.append({"id": e["id"], "ends": e["ends"], "interval": [num_in(lo), num_in(hi)]})
    G = validate_graph({"vertices": data["vertices"], "edges": edges})
    orders = data["orders"]
    missing = [v for v in G.vertices if v not in orders]
    if missing:
        raise DocumentError(f"no cyclic order given at {missing}")
    R = RibbonGraph.build(G, {v: list(orders[v]) for v in G.vertices})
    Z = data.get("zero_section")
    doc = GraphDocument(R, None if Z is None else frozenset(Z), data.get("grading"))
    if Z is not None:
        doc.chordal  # validates
    return doc


def document_to_json(doc: GraphDocument) -> dict:
    G = doc.graph
    out = {"format": GRAPH_FORMAT,
           "vertices": sorted(G.vertices, key=label_key),
           "edges": [{"id": e.id, "ends": [e.u, e.v], "interval": [num_out(e.lo), num_out(e.hi)]}
                     for e in sorted(G.edges, key=lambda e: label_key(e.id))],
           "orders": {v: doc.ribbon.order_lists()[v] for v in sorted(G.vertices, key=label_key)}}
    if doc.zero_section is not None:
        out["zero_section"] = sorted(doc.zero_section, key=label_key)
    if doc.grading is not None:
        out["grading"] = doc.grading
    return out


def dumps(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def load_document(text: str) -> GraphDocument:
    return document_from_json(parse_json(text))


def dump_document(doc: GraphDocument) -> str:
    return dumps(document_to_json(doc))


def chordal_document(C: ChordalStructure, grading: Optional[dict] = None) -> GraphDocument:
    return GraphDocument(C.ribbon, C.zero_section, grading)


def grading_from_block(doc: GraphDocument):
    """The Z-grading described by the document's grading block.

    {"kind": "compass", "east": {v: edge id}?}  or
    {"kind": "explicit", "unwindings": {v: {"delta": {e: n}, "parity": {e: n}}},
     "theta": {v: {e: n}}?, "edge_parity": {e: n}?}
    """
    from .grading import chordal_grading, make_grading, validate_grading
    block = doc.grading
    if block is None:
        return None
    kind = block.get("kind")
    if kind == "compass":
        C = doc.chordal
        if C is None:
            raise DocumentError("a compass grading needs a zero_section")
        east = block.get("east")
        return chordal_grading(C, None if east is None else {v: (e, v) for v, e in east.items()})
    if kind == "explicit":
        R = doc.ribbon
        unw = {}
        for v, u in block["unwindings"].items():
            unw[v] = Unwinding(R.orders[v], tuple(((e, v), int(n)) for e, n in u["delta"].items()),
                               tuple(((e, v), int(n)) for e, n in u.get("parity", {}).items()))
        theta = None
        if "theta" in block:
            theta = {(e, v): int(n) for v, d in block["theta"].items() for e, n in d.items()}
        return validate_grading(make_grading(R, unw, theta, block.get("edge_parity")))
    raise DocumentError(f"unknown grading kind {kind!r}")


# ---------------------------------------------------------------------------
# DOT

def to_dot(doc: GraphDocument) -> str:
    """Vertices are records whose ports list the half-edges in cyclic order;
    free ends become point nodes; zero-section edges are bold."""
    G = doc.graph
    orders = doc.ribbon.order_lists()
    Z = doc.zero_section or frozenset()
    lines = ["graph rgk {", "  node [shape=record];"]
    for v in sorted(G.vertices, key=label_key):
        ports = "|".join(f"<{k}> {e}" for k, e in enumerate(orders[v]))
        lines.append(f'  "{v}" [label="{v}|{{{ports}}}"];')
    for e in sorted(G.edges, key=lambda e: label_key(e.id)):
        ends = []
        for x in (e.u, e.v):
            if x is FREE:
                continue
            ends.append(f'"{x}":{orders[x].index(e.id)}')
        while len(ends) < 2:
            free = f'"{e.id}.free{len(ends)}"'
            lines.append(f"  {free} [shape=point];")
            ends.append(free)
        style = ' [label="{}", style=bold]'.format(e.id) if e.id in Z else f' [label="{e.id}"]'
        lines.append(f"  {ends[0]} -- {ends[1]}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# representations and glued objects

def quiver_from_json(data) -> Quiver:
    if "lagrangian" in data:
        return quiver_from_lagrangian(ConicLagrangian.from_json(data["lagrangian"]))
    if "shape" in data:
        from .quiver import type_a_quiver
        return type_a_quiver(data["shape"])
    return make_quiver(int(data["vertices"]), [tuple(a) for a in data["arrows"]])


def rep_from_json(data) -> Rep:
    if data.get("format") != REP_FORMAT:
        raise DocumentError(f"format tag must be {REP_FORMAT!r}")
    Q = quiver_from_json(data["quiver"])
    maps = {k: matrix_in(v) for k, v in data.get("maps", {}).items()}
    return make_rep(Q, [int(d) for d in data["dims"]], maps)


def rep_to_json(M: Rep, quiver_block: Optional[dict] = None) -> dict:
    Q = M.quiver
    qb = quiver_block or {"vertices": len(Q.vertices),
                          "arrows": [[a.name, a.source, a.target] for a in Q.arrows]}
    return {"format": REP_FORMAT, "quiver": qb, "dims": list(M.dims),
            "maps": {a.name: matrix_out(M.maps[a.name]) for a in Q.arrows
                     if M.dim(a.source) and M.dim(a.target)}}


def glued_to_json(X) -> dict:
    return {"format": GLUED_FORMAT,
            "wheels": [{"component": w.component, "dims": list(M.dims),
                        "maps": {a.name: matrix_out(M.maps[a.name]) for a in w.quiver.arrows
                                 if M.dim(a.source) and M.dim(a.target)}}
                       for w, M in zip(X.cover.wheels, X.reps)],
            "glue": {c: [matrix_out(g1), matrix_out(g0)] for c, (g1, g0) in X.glue.items()}}


def glued_from_json(data, cover):
    from .cpm import make_glued
    if data.get("format") != GLUED_FORMAT:
        raise DocumentError(f"format tag must be {GLUED_FORMAT!r}")
    by_comp = {w["component"]: w for w in data["wheels"]}
    reps = []
    for w in cover.wheels:
        if w.component not in by_comp:
            raise DocumentError(f"no representation for wheel {w.component}")
        item = by_comp[w.component]
        reps.append(make_rep(w.quiver, [int(d) for d in item["dims"]],
                             {k: matrix_in(v) for k, v in item.get("maps", {}).items()}))
    glue = {c: (matrix_in(g[0]), matrix_in(g[1])) for c, g in data.get("glue", {}).items()}
    return make_glued(cover, reps, glue)


__all__ = ["GraphDocument", "DocumentError", "load_document", "dump_document", "to_dot",
           "document_from_json", "document_to_json", "grading_from_block", "rep_from_json",
           "rep_to_json", "glued_to_json", "glued_from_json", "parse_json", "dumps",
           "GraphError", "RibbonError", "chordal_document", "num_in", "num_out"]
