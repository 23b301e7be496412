"""Z/2- and Z-gradings on ribbon graphs.

Every Z-torsor here is a labelled copy of the integers, so torsor maps are
integer shifts.  At a vertex v the unwinding lives on pairs (half-edge,
level); theta at a half-edge h identifies its fibre with the edge torsor
by ``(h, l) -> l + theta[h]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Tuple

from .cyclic import (COMPASS, CyclicOrder, Unwinding, compass_unwinding, induced_unwinding,
                     label_key)
from .graph import FREE, Collapse
from .ribbon import (ChordalStructure, RibbonError, RibbonGraph, SimpleContraction, Walk,
                     boundary_components, compass_labels, dart_head, dart_tail,
                     default_orientation, leaf_cyclic_order, leaf_successor, next_dart)


class GradingError(RibbonError):
    pass


@dataclass(frozen=True)
class Z2Grading:
    """A trivialised Z/2-torsor per component; edge_parity[e] is the
    offset of the equivariant map tau~_e -> tau_e."""
    ribbon: RibbonGraph
    parity_items: Tuple[Tuple[str, int], ...]

    @cached_property
    def edge_parity(self) -> Dict[str, int]:
        return dict(self.parity_items)


@dataclass(frozen=True)
class ZGrading:
    z2: Z2Grading
    unwinding_items: Tuple[Tuple[str, Unwinding], ...]
    theta_items: Tuple[Tuple[Tuple[str, str], int], ...]

    @property
    def ribbon(self) -> RibbonGraph:
        return self.z2.ribbon

    @cached_property
    def unwindings(self) -> Dict[str, Unwinding]:
        return dict(self.unwinding_items)

    @cached_property
    def theta(self) -> Dict[Tuple[str, str], int]:
        return dict(self.theta_items)

    def problems(self) -> List[str]:
        out = []
        R = self.ribbon
        G = R.graph
        par = self.z2.edge_parity
        if set(par) != set(G.edge_ids):
            out.append("edge torsors must be given on exactly the edges")
        if set(self.unwindings) != set(G.vertices):
            out.append("unwindings must be given on exactly the vertices")
            return out
        if set(self.theta) != set(G.half_edges()):
            out.append("theta must be given on exactly the half-edges")
            return out
        for v in G.vertices:
            U = self.unwindings[v]
            if U.base != R.orders[v]:
                out.append(f"unwinding at {v!r} does not cover the cyclic order there")
                continue
            out.extend(f"at {v!r}: {p}" for p in U.validate())
            if not U.is_free_transitive():
                out.append(f"unwinding at {v!r} is not a free transitive torsor")
            for h in G.half_edges(v):
                if (U.parity[h] - self.theta[h] - par.get(h[0], 0)) % 2:
                    out.append(f"theta at {h!r} is not compatible with the Z/2-torsor")
        return out


def validate_grading(Gr: ZGrading) -> ZGrading:
    problems = Gr.problems()
    if problems:
        raise GradingError(problems)
    return Gr


def make_grading(R: RibbonGraph, unwindings: Dict, theta: Dict | None = None,
                 edge_parity: Dict | None = None) -> ZGrading:
    theta = theta or {h: 0 for h in R.graph.half_edges()}
    edge_parity = edge_parity or {e: 0 for e in R.graph.edge_ids}
    z2 = Z2Grading(R, tuple(sorted(edge_parity.items(), key=lambda kv: label_key(kv[0]))))
    return ZGrading(z2, tuple(sorted(unwindings.items(), key=lambda kv: label_key(kv[0]))),
                    tuple(sorted(theta.items(), key=lambda kv: label_key(kv[0]))))


# ---------------------------------------------------------------------------
# the compass grading

def chordal_grading(C: ChordalStructure, orientation: Optional[Dict] = None) -> ZGrading:
    """Compass grading of a chordal ribbon graph.

    ``orientation`` maps each vertex to its E half-edge; default as in
    ``default_orientation``.
    """
    east = default_orientation(C) if orientation is None else orientation
    for v in C.graph.vertices:
        if east.get(v) not in C.z_halves(v):
            raise GradingError(f"orientation at {v!r} is not a zero-section half-edge")
    for (eid) in C.zero_section:
        e = C.graph.edge(eid)
        if e.compact and ((eid, e.u) == east[e.u]) == ((eid, e.v) == east[e.v]):
            raise GradingError(f"orientation is inconsistent along zero-section edge {eid!r}")
    labels = compass_labels(C, east)
    U0 = compass_unwinding()
    unw = {}
    for v in C.graph.vertices:
        halves = C.graph.half_edges(v)
        lab = {h: labels[h] for h in halves}
        sub = induced_unwinding(U0, set(lab.values()))
        back = {l: h for h, l in lab.items()}
        unw[v] = Unwinding(C.ribbon.orders[v],
                           tuple((back[c], d) for c, d in sub.delta.items()),
                           tuple((back[c], p) for c, p in sub.parity.items()))
    return validate_grading(make_grading(C.ribbon, unw))


# ---------------------------------------------------------------------------
# monodromy

@dataclass(frozen=True)
class TorsorMap:
    """n -> n + shift from tau~_source to tau~_target, after r_steps R-moves."""
    source: str
    target: str
    shift: int
    r_steps: int

    def __call__(self, n: int) -> int:
        return n + self.shift

    def then(self, other: "TorsorMap") -> "TorsorMap":
        if other.source != self.target:
            raise GradingError("torsor maps do not compose")
        return TorsorMap(self.source, other.target, self.shift + other.shift, self.r_steps + other.r_steps)


def step_shift(Gr: ZGrading, arrive, leave) -> int:
    """Shift tau~_{arrive edge} -> tau~_{leave edge} of one R-move at a vertex."""
    v = arrive[1]
    U = Gr.unwindings[v]
    if U.base.R(arrive) != leave:
        raise GradingError(f"{leave!r} is not the successor of {arrive!r}")
    th = Gr.theta
    return -th[arrive] + U.delta[arrive] + th[leave]


EDGE_CROSSING = -2  # S^-2 each time a walk runs a compact edge from its u end to its v end


def crossing_shift(dart) -> int:
    """Shift for running the whole of a compact edge along ``dart``.

    Each edge of a ribbon tree is run once in each direction by the leaf
    walks, so charging S^-2 one way and nothing the other makes the leaf
    monodromies compose to S^2; an even charge keeps sigma equivariant.
    """
    return EDGE_CROSSING if dart[1] == 0 else 0


def walk_monodromy(Gr: ZGrading, darts) -> TorsorMap:
    """R once at each vertex, plus the crossing charge of every compact edge
    the walk leaves along (all darts but the last).

    Without the edge term the monodromies around a ribbon tree compose to
    S^(2|V|) rather than S^2.  Charging on departure makes the monodromy of
    a concatenation the composite of the monodromies.
    """
    G = Gr.ribbon.graph
    shift = 0
    for d, nd in zip(darts, darts[1:]):
        w = dart_head(G, d)
        leave = (nd[0], w)
        shift += step_shift(Gr, (d[0], w), leave)
    shift += sum(crossing_shift(d) for d in darts[:-1] if G.edge(d[0]).compact)
    return TorsorMap(darts[0][0], darts[-1][0], shift, len(darts) - 1)


def boundary_monodromy(Gr: ZGrading, walk: Walk) -> TorsorMap:
    if walk.compact:
        raise GradingError("boundary monodromy is defined along noncompact walks")
    if walk not in boundary_components(Gr.ribbon):
        raise GradingError("walk is not a boundary component")
    return walk_monodromy(Gr, walk.darts)


def face_monodromy(Gr: ZGrading, walk: Walk) -> int:
    """Total shift once around a compact boundary walk."""
    if not walk.compact:
        raise GradingError("face monodromy needs a compact walk")
    return walk_monodromy(Gr, list(walk.darts) + [walk.darts[0]]).shift


# ---------------------------------------------------------------------------
# induced gradings

def induced_grading(Gr: ZGrading, vertices=None, edges=None, closed_edges=None) -> ZGrading:
    """Restrict to an open subgraph (vertices, edges) or a closed one (closed_edges)."""
    R = Gr.ribbon
    par = Gr.z2.edge_parity
    if closed_edges is not None:
        try:
            S = R.restrict_closed(closed_edges)
        except RibbonError as exc:
            raise GradingError(exc.problems) from None
        unw = {v: induced_unwinding(Gr.unwindings[v], S.graph.half_edges(v)) for v in S.graph.vertices}
    else:
        S = R.restrict_open(vertices, edges)
        unw = {v: Gr.unwindings[v] for v in S.graph.vertices}
    theta = {h: Gr.theta[h] for h in S.graph.half_edges()}
    return validate_grading(make_grading(S, unw, theta, {e: par[e] for e in S.graph.edge_ids}))


# ---------------------------------------------------------------------------
# graded simple contractions

def leaf_unwinding_shifts(Gr: ZGrading) -> Dict[str, Tuple[str, int]]:
    """For a graded ribbon tree: leaf -> (next leaf, monodromy shift)."""
    out = {}
    for w in boundary_components(Gr.ribbon):
        if w.compact or w.isolated:
            continue
        m = walk_monodromy(Gr, w.darts)
        out[m.source] = (m.target, m.shift)
    return out


@dataclass(frozen=True)
class GradedContraction:
    contraction: SimpleContraction
    source: ZGrading
    target: ZGrading
    shift_items: Tuple[Tuple[str, int], ...]

    @property
    def shifts(self) -> Dict[str, int]:
        return dict(self.shift_items)


def graded_contraction_problems(f: SimpleContraction, GX: ZGrading, GY: ZGrading, shifts: Dict) -> List[str]:
    if GX.ribbon != f.source or GY.ribbon != f.target:
        return ["gradings do not sit on the contraction's ribbon graphs"]
    m = f.map
    ea = m.edge_action
    surviving = {e for e, a in ea.items() if not isinstance(a, Collapse)}
    if set(shifts) != surviving:
        return ["torsor isomorphisms must be given on exactly the surviving edges"]
    Y = f.target.graph
    for v in Y.vertices:
        star = Y.star(v)
        vs = {x for x, y in m.vertex_map.items() if y == v}
        es = {e for e in f.source.graph.edge_ids
              if (isinstance(ea[e], Collapse) and ea[e].vertex == v) or
              (not isinstance(ea[e], Collapse) and ea[e].edge in star.edge_ids)}
        P = induced_grading(GX, vs, es)
        for leaf, (nxt, sh) in sorted(leaf_unwinding_shifts(P).items(), key=lambda kv: label_key(kv[0])):
            a, b = (ea[leaf].edge, v), (ea[nxt].edge, v)
            if GY.unwindings[v].base.R(a) != b:
                return [f"at {v!r}: leaf order disagrees at ({leaf!r}, {nxt!r})"]
            target_sh = step_shift(GY, a, b)
            if shifts[nxt] + sh != target_sh + shifts[leaf]:
                return [f"at {v!r}: unwindings disagree at leaf pair ({leaf!r}, {nxt!r})"]
    return []


def graded_simple_contraction(f: SimpleContraction, GX: ZGrading, GY: ZGrading, shifts: Dict) -> GradedContraction:
    problems = graded_contraction_problems(f, GX, GY, shifts)
    if problems:
        raise GradingError(problems)
    return GradedContraction(f, GX, GY, tuple(sorted(shifts.items(), key=lambda kv: label_key(kv[0]))))


def compose_graded(g1: GradedContraction, g2: GradedContraction) -> GradedContraction:
    from .ribbon import compose_simple
    f = compose_simple(g1.contraction, g2.contraction)
    s1, s2 = g1.shifts, g2.shifts
    ea = g1.contraction.map.edge_action
    shifts = {e: s + s2[ea[e].edge] for e, s in s1.items() if ea[e].edge in s2}
    return graded_simple_contraction(f, g1.source, g2.target, shifts)


def contracted_grading(GX: ZGrading, f: SimpleContraction) -> ZGrading:
    """Grading on the target whose vertex unwindings are the leaf unwindings.

    Leaf monodromies may be odd, so the Z/2 offsets of the target edges are
    recomputed: along the leaves of each star they follow the monodromy,
    and each star may be flipped as a whole to agree across compact edges.
    """
    m = f.map
    ea = m.edge_action
    Y = f.target
    par = GX.z2.edge_parity
    deltas, local = {}, {}
    for v in Y.graph.vertices:
        vs = {x for x, y in m.vertex_map.items() if y == v}
        es = {e for e in f.source.graph.edge_ids
              if (isinstance(ea[e], Collapse) and ea[e].vertex == v) or
              (not isinstance(ea[e], Collapse) and ea[e].edge in Y.graph.incident(v))}
        P = induced_grading(GX, vs, es)
        shifts = leaf_unwinding_shifts(P)
        deltas[v] = {(ea[l].edge, v): sh for l, (_, sh) in shifts.items()}
        l0 = min(shifts, key=label_key)
        p, l = {ea[l0].edge: par[l0] % 2}, l0
        while True:
            nxt, sh = shifts[l]
            if nxt == l0:
                break
            p[ea[nxt].edge] = (p[ea[l].edge] - sh) % 2
            l = nxt
        local[v] = p
    flip = {}
    for v0 in Y.graph.vertices:
        if v0 in flip:
            continue
        flip[v0] = 0
        stack = [v0]
        while stack:
            v = stack.pop()
            for eid in Y.graph.incident(v):
                w = Y.graph.edge(eid).other(v)
                if w is FREE:
                    continue
                want = (local[v][eid] + flip[v] - local[w][eid]) % 2
                if w in flip:
                    if flip[w] != want:
                        raise GradingError(f"no consistent Z/2-torsor across edge {eid!r}")
                else:
                    flip[w] = want
                    stack.append(w)
    unw, ypar = {}, {}
    for v in Y.graph.vertices:
        pv = {(e, v): (x + flip[v]) % 2 for e, x in local[v].items()}
        unw[v] = Unwinding(Y.orders[v], tuple(deltas[v].items()), tuple(pv.items()))
        for (e, _), x in pv.items():
            ypar[e] = x
    return validate_grading(make_grading(Y, unw, None, ypar))


# ---------------------------------------------------------------------------
# isomorphisms

def ribbon_automorphisms(R: RibbonGraph) -> List[Dict]:
    """All half-edge bijections preserving edges, free ends and cyclic orders.

    Isolated edges are kept fixed.
    """
    G = R.graph
    comps = [c for c in G.components() if c[0]]
    per_comp = []
    for vs, es in comps:
        halves = [h for h in G.half_edges() if h[1] in vs]
        h0 = min(halves, key=label_key)
        options = []
        for img in halves:
            phi = _propagate_auto(R, h0, img)
            if phi is not None and set(phi) == set(halves):
                options.append(phi)
        per_comp.append(options)
    out = []
    for choice in product(*per_comp):
        phi = {}
        for c in choice:
            phi.update(c)
        out.append(phi)
    return out


def _propagate_auto(R: RibbonGraph, h0, img) -> Optional[Dict]:
    G = R.graph
    phi = {h0: img}
    todo = [h0]
    while todo:
        h = todo.pop()
        k = phi[h]
        pairs = [(R.succ(h), R.succ(k))]
        oh, ok = G.other_end(h), G.other_end(k)
        if (oh is FREE) != (ok is FREE):
            return None
        if oh is not FREE:
            pairs.append(((h[0], oh), (k[0], ok)))
        for a, b in pairs:
            if a in phi:
                if phi[a] != b:
                    return None
            else:
                phi[a] = b
                todo.append(a)
    if len(set(phi.values())) != len(phi):
        return None
    return phi


@dataclass(frozen=True)
class GradingIsomorphism:
    half_map: Tuple[Tuple, ...]
    edge_shifts: Tuple[Tuple[str, int], ...]
    vertex_offsets: Tuple[Tuple, ...]


def _iso_over(G1: ZGrading, G2: ZGrading, phi: Dict) -> Optional[GradingIsomorphism]:
    G = G1.ribbon.graph
    emap = {h[0]: k[0] for h, k in phi.items()}
    for e in G.edges:
        if e.u is FREE and e.v is FREE:
            emap[e.id] = e.id
    # constraint s[e(succ h)] - s[e(h)] = c(h)
    th1, th2 = G1.theta, G2.theta
    cons = {}
    for h in G.half_edges():
        U1, U2 = G1.unwindings[h[1]], G2.unwindings[phi[h][1]]
        h2 = U1.base.R(h)
        c = (U1.delta[h] - U2.delta[phi[h]] - th1[h2] + th1[h]
             + th2[phi[h2]] - th2[phi[h]])
        cons.setdefault(h[0], []).append((h2[0], c))
        cons.setdefault(h2[0], []).append((h[0], -c))
    s = {}
    for root in G.edge_ids:
        if root in s:
            continue
        s[root] = 0
        stack = [root]
        while stack:
            e = stack.pop()
            for f, c in cons.get(e, []):
                if f in s:
                    if s[f] != s[e] + c:
                        return None
                else:
                    s[f] = s[e] + c
                    stack.append(f)
    # Z/2 parts: the torsor identifications must differ by a constant per component
    p1, p2 = G1.z2.edge_parity, G2.z2.edge_parity
    for vs, es in G.components():
        vals = {(p1[e] - p2[emap[e]] - s[e]) % 2 for e in es}
        if len(vals) > 1:
            return None
    offsets = {h: th1[h] + s[h[0]] - th2[phi[h]] for h in G.half_edges()}
    return GradingIsomorphism(tuple(sorted(phi.items(), key=lambda kv: label_key(kv[0]))),
                              tuple(sorted(s.items(), key=lambda kv: label_key(kv[0]))),
                              tuple(sorted(offsets.items(), key=lambda kv: label_key(kv[0]))))


def find_isomorphism(G1: ZGrading, G2: ZGrading, relabel: bool = True) -> Optional[GradingIsomorphism]:
    """Search for a grading isomorphism, over ribbon automorphisms if ``relabel``."""
    if G1.ribbon != G2.ribbon:
        raise GradingError("isomorphism search needs gradings on the same ribbon graph")
    if relabel:
        autos = ribbon_automorphisms(G1.ribbon)
    else:
        autos = [{h: h for h in G1.ribbon.graph.half_edges()}]
    for phi in autos:
        iso = _iso_over(G1, G2, phi)
        if iso is not None:
            return iso
    return None


def check_isomorphism(G1: ZGrading, G2: ZGrading, iso: GradingIsomorphism) -> bool:
    """Check an isomorphism directly on a window of the unwindings."""
    phi = dict(iso.half_map)
    t = dict(iso.vertex_offsets)
    s = dict(iso.edge_shifts)
    psi = lambda x: (phi[x[0]], x[1] + t[x[0]])
    for v in G1.ribbon.graph.vertices:
        U1 = G1.unwindings[v]
        U2 = G2.unwindings[phi[U1.base.as_list()[0]][1]]
        for x in U1.window(-2, 2):
            if psi(U1.actR(x)) != U2.actR(psi(x)) or psi(U1.actS(x)) != U2.actS(psi(x)):
                return False
            y = psi(x)
            if y[1] + G2.theta[y[0]] != x[1] + G1.theta[x[0]] + s[x[0][0]]:
                return False
    return True
