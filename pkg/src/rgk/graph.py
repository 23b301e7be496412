"""Graphs with affine edge coordinates, and their morphisms.

An edge has two ends; an end is either a vertex label or ``FREE`` (None),
which makes the edge noncompact on that side.  The end ``u`` sits at the
low coordinate ``lo`` and ``v`` at ``hi``.  Half-edges are pairs
``(edge_id, vertex)``; since loops are forbidden this is unambiguous.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .cyclic import label_key
from .linalg import frac

FREE = None


class GraphError(ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Edge:
    id: str
    u: Optional[str]
    v: Optional[str]
    lo: Fraction = Fraction(0)
    hi: Fraction = Fraction(1)

    @property
    def ends(self):
        return (self.u, self.v)

    @property
    def compact(self) -> bool:
        return self.u is not FREE and self.v is not FREE

    def other(self, x):
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise KeyError(x)

    def vertices(self):
        return [x for x in self.ends if x is not FREE]


@dataclass(frozen=True)
class Graph:
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices), key=label_key)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: label_key(e.id))))

    @cached_property
    def _edge_map(self) -> Dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> Dict[str, List[str]]:
        inc = {v: [] for v in self.vertices}
        for e in self.edges:
            for x in e.vertices():
                inc[x].append(e.id)
        return inc

    def edge(self, eid) -> Edge:
        return self._edge_map[eid]

    @property
    def edge_ids(self):
        return [e.id for e in self.edges]

    def incident(self, v) -> List[str]:
        return list(self._incidence[v])

    def half_edges(self, v=None):
        if v is None:
            return [(e.id, x) for e in self.edges for x in e.vertices()]
        return [(eid, v) for eid in self._incidence[v]]

    def degree(self, v) -> int:
        return len(self._incidence[v])

    def compact_edges(self):
        return [e for e in self.edges if e.compact]

    def noncompact_edges(self):
        return [e for e in self.edges if not e.compact]

    def other_end(self, half):
        eid, v = half
        return self.edge(eid).other(v)

    # -- connectivity -------------------------------------------------
    def components(self) -> List[Tuple[frozenset, frozenset]]:
        """Connected components as (vertex set, edge set)."""
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.compact_edges():
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[a] = b
        groups: Dict[str, Tuple[set, set]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), (set(), set()))[0].add(v)
        out = []
        for e in self.edges:
            vs = e.vertices()
            if vs:
                groups[find(vs[0])][1].add(e.id)
            else:
                out.append((frozenset(), frozenset([e.id])))
        out = [(frozenset(a), frozenset(b)) for a, b in groups.values()] + out
        return sorted(out, key=lambda c: label_key(tuple(sorted(c[0] | c[1], key=label_key))))

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.compact_edges()) == len(self.vertices) - 1

    # -- subgraphs ----------------------------------------------------
    def open_subgraph(self, vertices: Iterable, edges: Iterable) -> "Graph":
        """The open subgraph with the given vertices and edges.

        Every edge at a chosen vertex must be chosen; ends at unchosen
        vertices become free.
        """
        vs, es = set(vertices), set(edges)
        for v in vs:
            missing = set(self.incident(v)) - es
            if missing:
                raise GraphError(f"not open: vertex {v} is missing incident edges {sorted(missing, key=label_key)}")
        new = []
        for eid in es:
            e = self.edge(eid)
            new.append(Edge(e.id, e.u if e.u in vs else FREE, e.v if e.v in vs else FREE, e.lo, e.hi))
        return Graph(tuple(vs), tuple(new))

    def closed_subgraph(self, edges: Iterable, vertices: Iterable = ()) -> "Graph":
        es = set(edges)
        vs = set(vertices)
        for eid in es:
            vs.update(self.edge(eid).vertices())
        return Graph(tuple(vs), tuple(self.edge(eid) for eid in es))

    def star(self, v) -> "Graph":
        if v not in self._incidence:
            raise GraphError(f"unknown vertex {v!r}")
        return self.open_subgraph([v], self.incident(v))

    def subdivide(self, eid, new_vertex=None, at: Fraction | None = None) -> "Graph":
        """Insert a bivalent vertex on an edge; the halves keep the coordinate."""
        e = self.edge(eid)
        m = new_vertex if new_vertex is not None else f"{eid}~m"
        if m in self._incidence:
            raise GraphError(f"vertex {m!r} already exists")
        mid = (e.lo + e.hi) / 2 if at is None else frac(at)
        a = Edge(f"{eid}~a", e.u, m, e.lo, mid)
        b = Edge(f"{eid}~b", m, e.v, mid, e.hi)
        edges = [x for x in self.edges if x.id != eid] + [a, b]
        return Graph(self.vertices + (m,), tuple(edges))


def validate_graph(raw, subdivide: bool = False) -> Graph:
    """Build a Graph from a plain description, collecting every problem.

    ``raw`` is a dict with "vertices" and "edges"; each edge is a dict
    with "id", "ends" ([u, v], null for free) and optional "interval".
    With ``subdivide`` a loop is split by a fresh bivalent vertex.
    """
    problems = []
    vertices = list(raw.get("vertices", []))
    seen_v = set()
    for v in vertices:
        if v in seen_v:
            problems.append(f"duplicate vertex {v!r}")
        seen_v.add(v)
    edges = []
    seen_e = set()
    for item in raw.get("edges", []):
        if isinstance(item, Edge):
            eid, (u, v), lo, hi = item.id, item.ends, item.lo, item.hi
        else:
            eid = item["id"]
            u, v = item["ends"]
            lo, hi = item.get("interval", (0, 1))
        if eid in seen_e:
            problems.append(f"duplicate edge id {eid!r}")
            continue
        seen_e.add(eid)
        try:
            lo, hi = frac(lo), frac(hi)
        except (ValueError, ZeroDivisionError):
            problems.append(f"edge {eid!r}: unreadable interval {lo!r}, {hi!r}")
            continue
        if lo >= hi:
            problems.append(f"edge {eid!r}: degenerate interval ({lo}, {hi}); need lo < hi")
        for x in (u, v):
            if x is not FREE and x not in seen_v:
                problems.append(f"edge {eid!r}: dangling endpoint {x!r}")
        if u is not FREE and u == v:
            if subdivide:
                m = f"{eid}~m"
                while m in seen_v:
                    m += "'"
                vertices.append(m)
                seen_v.add(m)
                mid = (lo + hi) / 2
                edges.append(Edge(f"{eid}~a", u, m, lo, mid))
                edges.append(Edge(f"{eid}~b", m, v, mid, hi))
                continue
            problems.append(
                f"edge {eid!r} is a loop at {u!r}; graphs have no loops "
                "(subdivide it with a bivalent vertex)")
        edges.append(Edge(eid, u, v, lo, hi))
    if problems:
        raise GraphError(problems)
    return Graph(tuple(vertices), tuple(edges))


def make_graph(vertices, edges) -> Graph:
    """Shorthand: edges as (id, u, v) or (id, u, v, lo, hi) tuples."""
    items = []
    for t in edges:
        eid, u, v = t[:3]
        lo, hi = (t[3], t[4]) if len(t) > 3 else (0, 1)
        items.append({"id": eid, "ends": [u, v], "interval": [lo, hi]})
    return validate_graph({"vertices": list(vertices), "edges": items})


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class Collapse:
    vertex: str


@dataclass(frozen=True)
class EdgeMap:
    edge: str
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)


EdgeAction = Union[Collapse, EdgeMap]


@dataclass(frozen=True)
class GraphMorphism:
    source: Graph
    target: Graph
    vertex_items: Tuple[Tuple[str, str], ...]
    edge_items: Tuple[Tuple[str, EdgeAction], ...]

    @staticmethod
    def build(source, target, vertex_map: Dict, edge_action: Dict) -> "GraphMorphism":
        m = GraphMorphism(source, target,
                          tuple(sorted(vertex_map.items(), key=lambda kv: label_key(kv[0]))),
                          tuple(sorted(edge_action.items(), key=lambda kv: label_key(kv[0]))))
        problems = m.problems()
        if problems:
            raise GraphError(problems)
        return m

    @property
    def vertex_map(self) -> Dict[str, str]:
        return dict(self.vertex_items)

    @property
    def edge_action(self) -> Dict[str, EdgeAction]:
        return dict(self.edge_items)

    def problems(self) -> List[str]:
        out = []
        vm, ea = self.vertex_map, self.edge_action
        S, T = self.source, self.target
        if set(vm) != set(S.vertices):
            out.append("vertex map is not defined on exactly the source vertices")
        for x, y in vm.items():
            if y not in T._incidence:
                out.append(f"vertex {x!r} maps to unknown target vertex {y!r}")
        if set(ea) != set(S.edge_ids):
            out.append("edge action is not defined on exactly the source edges")
        if out:
            return out
        for eid, act in ea.items():
            e = S.edge(eid)
            if isinstance(act, Collapse):
                if not e.compact:
                    out.append(f"noncompact edge {eid!r} cannot collapse")
                elif vm[e.u] != act.vertex or vm[e.v] != act.vertex:
                    out.append(f"collapsed edge {eid!r} has ends not mapping to {act.vertex!r}")
                continue
            if act.edge not in T._edge_map:
                out.append(f"edge {eid!r} maps to unknown edge {act.edge!r}")
                continue
            f = T.edge(act.edge)
            a, b = frac(act.a), frac(act.b)
            if a == 0:
                out.append(f"edge {eid!r}: affine slope is zero")
                continue
            lo2, hi2 = sorted((a * e.lo + b, a * e.hi + b))
            if (lo2, hi2) != (f.lo, f.hi):
                out.append(f"edge {eid!r}: x -> {a}x + {b} does not carry ({e.lo}, {e.hi}) onto ({f.lo}, {f.hi})")
            ends_t = (f.u, f.v) if a > 0 else (f.v, f.u)
            for x, y in zip(e.ends, ends_t):
                if x is not FREE and vm[x] != y:
                    out.append(f"edge {eid!r}: end {x!r} should map to {y!r}")
        return out

    def image_vertices(self):
        return set(self.vertex_map.values())

    def is_open_immersion(self) -> bool:
        vm, ea = self.vertex_map, self.edge_action
        if len(set(vm.values())) != len(vm):
            return False
        if any(isinstance(a, Collapse) for a in ea.values()):
            return False
        targets = [a.edge for a in ea.values()]
        if len(set(targets)) != len(targets):
            return False
        for x, y in vm.items():
            img = {ea[e].edge for e in self.source.incident(x)}
            if img != set(self.target.incident(y)):
                return False
        return True

    def half_edge_map(self, half):
        """Image of a source half-edge (for non-collapsed edges)."""
        eid, v = half
        act = self.edge_action[eid]
        if isinstance(act, Collapse):
            return None
        return (act.edge, self.vertex_map[v])


def identity_morphism(G: Graph) -> GraphMorphism:
    return GraphMorphism.build(G, G, {v: v for v in G.vertices}, {e: EdgeMap(e) for e in G.edge_ids})


def compose_morphisms(f: GraphMorphism, g: GraphMorphism) -> GraphMorphism:
    """g after f (f: X -> Y, g: Y -> Z)."""
    if f.target != g.source:
        raise GraphError("cannot compose: target of the first is not the source of the second")
    gv, ge = g.vertex_map, g.edge_action
    vm = {x: gv[y] for x, y in f.vertex_map.items()}
    ea = {}
    for eid, act in f.edge_action.items():
        if isinstance(act, Collapse):
            ea[eid] = Collapse(gv[act.vertex])
            continue
        nxt = ge[act.edge]
        if isinstance(nxt, Collapse):
            ea[eid] = nxt
        else:
            a1, b1, a2, b2 = frac(act.a), frac(act.b), frac(nxt.a), frac(nxt.b)
            ea[eid] = EdgeMap(nxt.edge, a2 * a1, a2 * b1 + b2)
    return GraphMorphism.build(f.source, g.target, vm, ea)


def inclusion(sub: Graph, G: Graph) -> GraphMorphism:
    """The identity-coordinate inclusion of a subgraph."""
    return GraphMorphism.build(sub, G, {v: v for v in sub.vertices}, {e: EdgeMap(e) for e in sub.edge_ids})


def open_preimage(m: GraphMorphism, V: Graph) -> Tuple[set, set]:
    """Vertices and edges of the source lying over an open subgraph V of the target."""
    vs = {x for x, y in m.vertex_map.items() if y in V._incidence}
    es = set()
    for eid, act in m.edge_action.items():
        if isinstance(act, Collapse):
            if act.vertex in V._incidence:
                es.add(eid)
        elif act.edge in V._edge_map:
            es.add(eid)
    return vs, es


def restrict_morphism(m: GraphMorphism, vertices, edges, V: Graph) -> GraphMorphism:
    """Restrict m to the open subgraph (vertices, edges) of its source, landing in V."""
    src = m.source.open_subgraph(vertices, edges)
    vm = {x: m.vertex_map[x] for x in src.vertices}
    ea = {e: m.edge_action[e] for e in src.edge_ids}
    return GraphMorphism.build(src, V, vm, ea)
