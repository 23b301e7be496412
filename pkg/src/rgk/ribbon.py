"""Ribbon graphs: boundary walks, genus, ribbon trees, chordal structures,
simple and partial contractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from .cyclic import CyclicOrder, cyclic_from_list, induced_order, join, label_key
from .graph import (FREE, Collapse, Edge, EdgeMap, Graph, GraphError, GraphMorphism,
                    compose_morphisms, identity_morphism, open_preimage, restrict_morphism)


class RibbonError(GraphError):
    pass


@dataclass(frozen=True)
class RibbonGraph:
    graph: Graph
    order_items: Tuple[Tuple[str, CyclicOrder], ...]

    def __post_init__(self):
        object.__setattr__(self, "order_items", tuple(sorted(self.order_items, key=lambda kv: label_key(kv[0]))))

    @staticmethod
    def build(graph: Graph, orders: Dict) -> "RibbonGraph":
        """orders: vertex -> CyclicOrder of half-edges, or a list of edge ids."""
        items = {}
        for v, o in orders.items():
            if not isinstance(o, CyclicOrder):
                o = cyclic_from_list([(e, v) for e in o])
            items[v] = o
        R = RibbonGraph(graph, tuple(items.items()))
        problems = R.problems()
        if problems:
            raise RibbonError(problems)
        return R

    @cached_property
    def orders(self) -> Dict[str, CyclicOrder]:
        return dict(self.order_items)

    def problems(self) -> List[str]:
        out = []
        G = self.graph
        if set(self.orders) != set(G.vertices):
            out.append("cyclic orders must be given at exactly the vertices")
            return out
        for v in G.vertices:
            if G.degree(v) < 2:
                out.append(f"vertex {v!r} has degree {G.degree(v)} < 2")
            if self.orders[v].elements != frozenset(G.half_edges(v)):
                out.append(f"cyclic order at {v!r} is not on exactly its half-edges")
        return out

    def succ(self, half):
        return self.orders[half[1]].R(half)

    def order_lists(self) -> Dict[str, List[str]]:
        """Per vertex, the edge ids in cyclic order starting from the least."""
        out = {}
        for v, o in self.orders.items():
            out[v] = [h[0] for h in o.as_list()]
        return out

    def restrict_open(self, vertices, edges) -> "RibbonGraph":
        G = self.graph.open_subgraph(vertices, edges)
        return RibbonGraph(G, tuple((v, self.orders[v]) for v in G.vertices))

    def star(self, v) -> "RibbonGraph":
        return self.restrict_open([v], self.graph.incident(v))

    def restrict_closed(self, edges) -> "RibbonGraph":
        G = self.graph.closed_subgraph(edges)
        items = []
        for v in G.vertices:
            halves = set(G.half_edges(v))
            items.append((v, induced_order(self.orders[v], halves)))
        R = RibbonGraph(G, tuple(items))
        problems = R.problems()
        if problems:
            raise RibbonError(problems)
        return R


# ---------------------------------------------------------------------------
# boundary walks

# a dart is (edge id, direction); direction 0 runs u -> v (lo -> hi), 1 runs v -> u

def dart_tail(G: Graph, d):
    e = G.edge(d[0])
    return e.u if d[1] == 0 else e.v


def dart_head(G: Graph, d):
    e = G.edge(d[0])
    return e.v if d[1] == 0 else e.u


def all_darts(G: Graph):
    return [(e.id, k) for e in G.edges for k in (0, 1)]


def leaving_dart(G: Graph, half):
    eid, v = half
    e = G.edge(eid)
    return (eid, 0) if e.u == v else (eid, 1)


@dataclass(frozen=True)
class Walk:
    darts: Tuple[Tuple[str, int], ...]
    compact: bool
    isolated: bool = False

    @property
    def edges(self) -> Tuple[str, ...]:
        return tuple(d[0] for d in self.darts)

    def __len__(self):
        return len(self.darts)


def next_dart(R: RibbonGraph, d):
    G = R.graph
    w = dart_head(G, d)
    if w is FREE:
        return None
    h = R.succ((d[0], w))
    return leaving_dart(G, h)


def _canonical_cycle(darts):
    k = min(range(len(darts)), key=lambda i: label_key(darts[i]))
    return tuple(darts[k:] + darts[:k])


def boundary_components(R: RibbonGraph) -> List[Walk]:
    G = R.graph
    used = set()
    walks = []
    # isolated edges: both orientations, flagged
    for e in G.edges:
        if e.u is FREE and e.v is FREE:
            for k in (0, 1):
                walks.append(Walk(((e.id, k),), False, True))
                used.add((e.id, k))
    # noncompact walks start at a free tail
    for d in all_darts(G):
        if d in used or dart_tail(G, d) is not FREE:
            continue
        seq = [d]
        used.add(d)
        while dart_head(G, seq[-1]) is not FREE:
            nd = next_dart(R, seq[-1])
            seq.append(nd)
            used.add(nd)
        walks.append(Walk(tuple(seq), False))
    for d in all_darts(G):
        if d in used:
            continue
        seq = [d]
        used.add(d)
        nd = next_dart(R, d)
        while nd != d:
            seq.append(nd)
            used.add(nd)
            nd = next_dart(R, nd)
        walks.append(Walk(_canonical_cycle(seq), True))
    return sorted(walks, key=lambda w: (w.compact, label_key(w.darts)))


def euler_data(R: RibbonGraph):
    G = R.graph
    return len(G.vertices), len(G.edges), len(boundary_components(R))


def genus(R: RibbonGraph) -> int:
    G = R.graph
    if G.noncompact_edges():
        raise RibbonError("genus needs a compact ribbon graph")
    if not G.is_connected():
        raise RibbonError("genus needs a connected ribbon graph")
    v, e, b = euler_data(R)
    twice = 2 - v + e - b
    assert twice % 2 == 0 and twice >= 0, (v, e, b)
    return twice // 2


def is_ribbon_tree(R: RibbonGraph) -> bool:
    return R.graph.is_tree() and bool(R.graph.vertices)


def leaf_successor(T: RibbonGraph) -> Dict[str, str]:
    """R e = f when the noncompact boundary walk entering along leaf e leaves along f."""
    G = T.graph
    out = {}
    for w in boundary_components(T):
        if w.compact or w.isolated:
            continue
        out[w.darts[0][0]] = w.darts[-1][0]
    return out


def leaf_cyclic_order(T: RibbonGraph) -> CyclicOrder:
    if not is_ribbon_tree(T):
        raise RibbonError("leaf order needs a ribbon tree")
    return CyclicOrder(tuple(leaf_successor(T).items()))


def contract_edge(R: RibbonGraph, eid, new_vertex=None):
    """Contract a compact edge; the merged vertex gets the join order.

    Returns (contracted ribbon graph, contraction morphism).
    """
    G = R.graph
    e = G.edge(eid)
    if not e.compact:
        raise RibbonError(f"edge {eid!r} is not compact")
    u, v = e.u, e.v
    m = new_vertex if new_vertex is not None else f"{u}+{v}"
    if m in G.vertices and m not in (u, v):
        raise RibbonError(f"vertex {m!r} already exists")
    ren = lambda x: m if x in (u, v) else x
    edges = [Edge(x.id, ren(x.u), ren(x.v), x.lo, x.hi) for x in G.edges if x.id != eid]
    for x in edges:
        if x.u is not FREE and x.u == x.v:
            raise RibbonError(f"contracting {eid!r} would create a loop from {x.id!r}")
    H = Graph(tuple(ren(x) for x in G.vertices), tuple(edges))
    J = join(R.orders[u], (eid, u), R.orders[v], (eid, v))
    orders = {x: o for x, o in R.orders.items() if x not in (u, v)}
    orders[m] = J.relabel({h: (h[0], m) for h in J.elements})
    S = RibbonGraph.build(H, orders)
    vm = {x: ren(x) for x in G.vertices}
    ea = {x.id: EdgeMap(x.id) for x in G.edges if x.id != eid}
    ea[eid] = Collapse(m)
    return S, GraphMorphism.build(G, H, vm, ea)


# ---------------------------------------------------------------------------
# simple contractions

class ContractionError(RibbonError):
    pass


@dataclass(frozen=True)
class SimpleContraction:
    source: RibbonGraph
    target: RibbonGraph
    map: GraphMorphism


def simple_contraction_problems(R: RibbonGraph, S: RibbonGraph, m: GraphMorphism) -> List[str]:
    if m.source != R.graph or m.target != S.graph:
        return ["morphism does not go between the given ribbon graphs"]
    for v in S.graph.vertices:
        star = S.graph.star(v)
        vs, es = open_preimage(m, star)
        P = R.restrict_open(vs, es)
        if not P.graph.is_tree() or not P.graph.vertices:
            return [f"preimage of star({v!r}) is not a ribbon tree"]
        ea = m.edge_action
        leaves = [e.id for e in P.graph.noncompact_edges()]
        image = {}
        for l in leaves:
            act = ea[l]
            if isinstance(act, Collapse):
                return [f"leaf {l!r} over star({v!r}) is collapsed"]
            image[l] = act.edge
        if sorted(image.values(), key=label_key) != sorted(star.edge_ids, key=label_key):
            return [f"leaves over star({v!r}) do not biject with its edges"]
        L = leaf_cyclic_order(P)
        target = S.orders[v]
        for a, b in L.minimal_pairs() if len(L) > 1 else ():
            if target.R((image[a], v)) != (image[b], v):
                return [f"leaf order over star({v!r}) breaks at minimal pair ({a!r}, {b!r})"]
    return []


def simple_contraction(R: RibbonGraph, S: RibbonGraph, m: GraphMorphism) -> SimpleContraction:
    problems = simple_contraction_problems(R, S, m)
    if problems:
        raise ContractionError(problems)
    return SimpleContraction(R, S, m)


def compose_simple(f: SimpleContraction, g: SimpleContraction) -> SimpleContraction:
    return simple_contraction(f.source, g.target, compose_morphisms(f.map, g.map))


# ---------------------------------------------------------------------------
# partial contractions  X  >-  U  ->  Y

@dataclass(frozen=True)
class PartialContraction:
    source: RibbonGraph
    open_vertices: frozenset
    open_edges: frozenset
    target: RibbonGraph
    map: GraphMorphism  # from the open part to target.graph

    @property
    def open_part(self) -> RibbonGraph:
        return self.source.restrict_open(self.open_vertices, self.open_edges)


def partial_contraction(X: RibbonGraph, vertices, edges, Y: RibbonGraph, m: GraphMorphism) -> PartialContraction:
    U = X.restrict_open(vertices, edges)
    problems = simple_contraction_problems(U, Y, m)
    if problems:
        raise ContractionError(problems)
    return PartialContraction(X, frozenset(vertices), frozenset(edges), Y, m)


def identity_partial(X: RibbonGraph) -> PartialContraction:
    G = X.graph
    return PartialContraction(X, frozenset(G.vertices), frozenset(G.edge_ids), X, identity_morphism(G))


def open_restriction(X: RibbonGraph, vertices, edges) -> PartialContraction:
    """X >- U -> U: the partial contraction that only restricts."""
    U = X.restrict_open(vertices, edges)
    return PartialContraction(X, frozenset(vertices), frozenset(edges), U, identity_morphism(U.graph))


def star_partial(X: RibbonGraph, v) -> PartialContraction:
    return open_restriction(X, [v], X.graph.incident(v))


def compose_partial_contractions(f: PartialContraction, g: PartialContraction) -> PartialContraction:
    """X >- U -> Y then Y >- V -> Z gives X >- W -> Z with W the preimage of V."""
    if f.target != g.source:
        raise ContractionError("interface mismatch: target of the first is not the source of the second")
    V = g.source.graph.open_subgraph(g.open_vertices, g.open_edges)
    ws, we = open_preimage(f.map, V)
    to_v = restrict_morphism(f.map, ws, we, V)
    h = compose_morphisms(to_v, g.map)
    W = f.source.restrict_open(ws, we)
    # the restricted morphism's source is W's graph (same data)
    h = GraphMorphism.build(W.graph, g.target.graph, h.vertex_map, h.edge_action)
    return PartialContraction(f.source, frozenset(ws), frozenset(we), g.target, h)


# ---------------------------------------------------------------------------
# chordal structures

@dataclass(frozen=True)
class ChordalStructure:
    ribbon: RibbonGraph
    zero_section: frozenset

    @property
    def graph(self) -> Graph:
        return self.ribbon.graph

    def z_halves(self, v) -> List[Tuple[str, str]]:
        return [h for h in self.graph.half_edges(v) if h[0] in self.zero_section]

    def z_components(self) -> List[Tuple[frozenset, frozenset]]:
        Zg = Graph(self.graph.vertices, tuple(self.graph.edge(e) for e in self.zero_section))
        return [c for c in Zg.components() if c[0]]

    def chords(self) -> List[str]:
        return [e for e in self.graph.edge_ids if e not in self.zero_section]


def chordal_problems(R: RibbonGraph, Z) -> List[str]:
    Z = frozenset(Z)
    G = R.graph
    out = []
    unknown = Z - set(G.edge_ids)
    if unknown:
        return [f"zero section names unknown edges {sorted(unknown, key=label_key)}"]
    for v in G.vertices:
        zs = [h for h in G.half_edges(v) if h[0] in Z]
        if not zs:
            out.append(f"vertex {v!r} is missing from the zero section")
            continue
        if len(zs) != 2:
            out.append(f"zero section is not bivalent at {v!r} ({len(zs)} half-edges)")
            continue
        if G.degree(v) > 4:
            out.append(f"vertex {v!r} has degree {G.degree(v)}; a chordal vertex has degree at most 4")
        e, f = zs
        lst = R.orders[v].as_list(e)
        k = lst.index(f)
        if k - 1 > 1 or len(lst) - k - 1 > 1:
            out.append(f"at {v!r} two half-edges lie on the same side of the zero section")
    return out


def validate_chordal(R: RibbonGraph, Z) -> ChordalStructure:
    problems = chordal_problems(R, Z)
    if problems:
        raise RibbonError(problems)
    return ChordalStructure(R, frozenset(Z))


def default_orientation(C: ChordalStructure) -> Dict[str, Tuple[str, str]]:
    """For each vertex, its E half-edge.

    On each zero-section component the least vertex's least Z half-edge
    points east; this propagates along the component.
    """
    G = C.graph
    east = {}
    for vs, es in C.z_components():
        start = min(vs, key=label_key)
        east.update(_propagate(C, start, min(C.z_halves(start), key=label_key)))
    return east


def _propagate(C: ChordalStructure, v, e_half) -> Dict[str, Tuple[str, str]]:
    G = C.graph
    east = {v: e_half}
    # walk forward
    cur_v, cur = v, e_half
    while True:
        w = G.other_end(cur)
        if w is FREE or w in east:
            break
        back = (cur[0], w)
        fwd = next(h for h in C.z_halves(w) if h != back)
        east[w] = fwd
        cur_v, cur = w, fwd
    # walk backward from v
    west0 = next(h for h in C.z_halves(v) if h != e_half)
    cur = west0
    while True:
        w = G.other_end(cur)
        if w is FREE or w in east:
            break
        east[w] = (cur[0], w)
        cur = next(h for h in C.z_halves(w) if h != (cur[0], w))
    return east


def flip_orientation(C: ChordalStructure, east: Dict, component_vertices) -> Dict:
    out = dict(east)
    for v in component_vertices:
        out[v] = next(h for h in C.z_halves(v) if h != east[v])
    return out


def compass_labels(C: ChordalStructure, east: Optional[Dict] = None) -> Dict[Tuple[str, str], str]:
    """Label every half-edge E/N/W/S from an orientation of the zero section."""
    east = default_orientation(C) if east is None else east
    labels = {}
    for v in C.graph.vertices:
        E = east[v]
        W = next(h for h in C.z_halves(v) if h != E)
        o = C.ribbon.orders[v]
        labels[E], labels[W] = "E", "W"
        for h in C.graph.half_edges(v):
            if h in (E, W):
                continue
            labels[h] = "N" if o.holds(E, h, W) else "S"
    return labels


# ---------------------------------------------------------------------------
# generators for experiments

def random_ribbon_graph(rng, n_vertices: int, extra_edges: int = 0, free_edges: int = 0,
                        compact: bool = False) -> RibbonGraph:
    """Connected: a random spanning tree plus ``extra_edges`` more compact
    edges (no loops) and ``free_edges`` half-open ones; vertices of degree
    below 2 get extra half-open edges (extra compact ones with ``compact``).
    Random cyclic orders."""
    vs = [f"x{i}" for i in range(n_vertices)]
    edges = []
    for i in range(1, n_vertices):
        edges.append((f"e{len(edges)}", vs[rng.randrange(i)], vs[i]))
    if n_vertices >= 2:
        for _ in range(extra_edges):
            u, v = rng.sample(vs, 2)
            edges.append((f"e{len(edges)}", u, v))
    for _ in range(free_edges):
        edges.append((f"e{len(edges)}", rng.choice(vs), None))
    # ribbon vertices need degree >= 2: pad with half-open edges
    deg = {v: 0 for v in vs}
    for _, u, v in edges:
        for x in (u, v):
            if x is not None:
                deg[x] += 1
    for v in vs:
        for _ in range(2 - deg[v]):
            w = rng.choice([x for x in vs if x != v]) if compact else None
            edges.append((f"e{len(edges)}", v, w))
    from .graph import make_graph
    G = make_graph(vs, edges)
    orders = {}
    for v in vs:
        inc = G.incident(v)
        rng.shuffle(inc)
        orders[v] = inc
    return RibbonGraph.build(G, orders)


def _z_layouts(n: int, min_part=("circle", 2)):
    """Zero-section layouts on vertices 0..n-1: lists of (kind, length) with
    circles of length >= 2 and lines, listed in a canonical order."""
    if n == 0:
        yield []
        return
    for kind in ("circle", "line"):
        for k in range(1, n + 1):
            if kind == "circle" and k < 2:
                continue
            part = (kind, k)
            if _part_key(part) < _part_key(min_part):
                continue
            for rest in _z_layouts(n - k, part):
                yield [part] + rest


def _part_key(part):
    return (part[0] == "line", part[1])


def _layout_symmetries(layout):
    """Slot maps (vertex, side) -> (vertex, side) induced by rotating and
    reflecting circles, reversing lines and permuting equal components.
    Reversing a component swaps north and south along it."""
    from itertools import permutations, product
    blocks, start = [], 0
    for kind, k in layout:
        blocks.append((kind, list(range(start, start + k))))
        start += k
    per_block = []
    for kind, vs in blocks:
        k = len(vs)
        maps = []
        if kind == "circle":
            for r in range(k):
                maps.append(({vs[i]: vs[(i + r) % k] for i in range(k)}, False))
                maps.append(({vs[i]: vs[(r - i) % k] for i in range(k)}, True))
        else:
            maps.append(({v: v for v in vs}, False))
            maps.append(({vs[i]: vs[k - 1 - i] for i in range(k)}, True))
        per_block.append(maps)
    out = []
    n_blocks = len(blocks)
    for perm in permutations(range(n_blocks)):
        if any(layout[i] != layout[perm[i]] for i in range(n_blocks)):
            continue
        for choice in product(*per_block):
            m = {}
            for i, (vmap, flip) in enumerate(choice):
                target = blocks[perm[i]][1]
                src = blocks[i][1]
                for v in src:
                    w = target[src.index(vmap[v])]
                    m[(v, "N")] = (w, "S" if flip else "N")
                    m[(v, "S")] = (w, "N" if flip else "S")
            out.append(m)
    return out


def _assignment_key(assign, m=None):
    m = m or {}
    code = lambda sl: 2 * sl[0] + (sl[1] == "S")
    items = []
    for a, b in assign:
        x = code(m.get(a, a))
        items.append((x, -1) if b is None else tuple(sorted((x, code(m.get(b, b))))))
    return tuple(sorted(items))


def _connected(n, layout, assign) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x
    start = 0
    for kind, k in layout:
        for i in range(start, start + k - 1):
            parent[find(i)] = find(i + 1)
        start += k
    for a, b in assign:
        if b is not None:
            parent[find(a[0])] = find(b[0])
    return len({find(i) for i in range(n)}) == 1


def all_chordal_graphs(n: int, connected: bool = True, up_to_iso: bool = True):
    """Chordal ribbon graphs on n vertices.

    Each vertex has a north and a south slot; a slot is empty, carries a
    half-open chord, or is paired with a slot of another vertex.  With
    ``up_to_iso`` only one assignment per orbit of the zero-section layout's
    symmetries is produced.
    """
    from .graph import make_graph
    for layout in _z_layouts(n):
        syms = _layout_symmetries(layout) if up_to_iso else []
        slots = [(i, s) for i in range(n) for s in ("N", "S")]
        for assign in _slot_assignments(slots):
            if connected and not _connected(n, layout, assign):
                continue
            if up_to_iso:
                key = _assignment_key(assign)
                if any(_assignment_key(assign, m) < key for m in syms):
                    continue
            yield _build_chordal(n, layout, assign)


def _build_chordal(n, layout, assign) -> ChordalStructure:
    from .graph import make_graph
    vs = [f"x{i}" for i in range(n)]
    zedges, east, west = [], {}, {}
    start = 0
    for kind, k in layout:
        block = list(range(start, start + k))
        start += k
        names = [vs[i] for i in block]
        if kind == "circle":
            for t, v in enumerate(names):
                e = f"z{block[t]}"
                w = names[(t + 1) % k]
                zedges.append((e, v, w))
                east[v], west[w] = e, e
        else:
            e0 = f"z{block[0]}w"
            zedges.append((e0, None, names[0]))
            west[names[0]] = e0
            for t, v in enumerate(names):
                e = f"z{block[t]}"
                w = names[t + 1] if t + 1 < k else None
                zedges.append((e, v, w))
                east[v] = e
                if w is not None:
                    west[w] = e
    chords, at = [], {}
    for c_i, (a, b) in enumerate(assign):
        c = f"c{c_i}"
        chords.append((c, vs[a[0]], None if b is None else vs[b[0]]))
        at[a] = c
        if b is not None:
            at[b] = c
    G = make_graph(vs, zedges + chords)
    orders = {}
    for i, v in enumerate(vs):
        o = [east[v]]
        if (i, "N") in at:
            o.append(at[(i, "N")])
        o.append(west[v])
        if (i, "S") in at:
            o.append(at[(i, "S")])
        orders[v] = o
    return validate_chordal(RibbonGraph.build(G, orders), {e[0] for e in zedges})


def _slot_assignments(slots):
    """Lists of (slot, slot | None) chords; each slot used at most once,
    never pairing two slots of one vertex."""
    if not slots:
        yield []
        return
    first, rest = slots[0], slots[1:]
    for sub in _slot_assignments(rest):  # first slot empty
        yield sub
    for sub in _slot_assignments(rest):  # half-open chord
        yield [(first, None)] + sub
    for i, other in enumerate(rest):
        if other[0] == first[0]:
            continue
        for sub in _slot_assignments(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + sub
