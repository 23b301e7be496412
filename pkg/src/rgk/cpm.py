"""Dualizable chordal ribbon graphs: the base graph, indices, the wheel cover,
glued objects and their Homs, and sieves of partial contractions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .cyclic import label_key
from .graph import FREE, Edge, Graph, make_graph
from .linalg import (Matrix, cokernel_projection, complement_basis, column_space, identity,
                     inverse, is_invertible, kernel, matmul, rank, solve, transpose, zeros)
from .quiver import (CIRCLE, DOWN, UP, ConicLagrangian, Quiver, Rep, hom_complex, make_rep,
                     quiver_from_lagrangian)
from .graph import Collapse, EdgeMap, open_preimage, restrict_morphism
from .ribbon import (ChordalStructure, PartialContraction, RibbonGraph, compass_labels,
                     compose_partial_contractions, default_orientation, identity_partial,
                     star_partial, validate_chordal)

PATH, CYCLE, OTHER = "path", "cycle", "other"


class CPMError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the base graph

@dataclass(frozen=True)
class BaseEdge:
    id: str
    ends: Tuple  # ((component, side), (component, side) | None)
    chords: Tuple[str, ...]

    @property
    def compact(self) -> bool:
        return self.ends[1] is not None


@dataclass(frozen=True)
class BaseGraph:
    vertices: Tuple[str, ...]
    edges: Tuple[BaseEdge, ...]
    component_of: Tuple[Tuple[str, str], ...]  # X-vertex -> component
    shape: str

    @cached_property
    def collapse(self) -> Dict[str, str]:
        """X-vertex -> B-vertex and chord -> B-edge."""
        out = dict(self.component_of)
        for b in self.edges:
            for c in b.chords:
                out[c] = b.id
        return out

    def degree(self, v) -> int:
        return sum((b.ends[0][0] == v) + (b.ends[1] is not None and b.ends[1][0] == v) for b in self.edges)

    def edge(self, bid) -> BaseEdge:
        return next(b for b in self.edges if b.id == bid)


def _components(C: ChordalStructure) -> Dict[str, str]:
    comps = sorted(C.z_components(), key=lambda c: min(map(label_key, c[0])))
    out = {}
    for k, (vs, _) in enumerate(comps):
        for v in vs:
            out[v] = f"Z{k}"
    return out


def base_graph(C: ChordalStructure) -> BaseGraph:
    comp = _components(C)
    labels = compass_labels(C)
    G = C.graph
    groups: Dict[Tuple, List[str]] = {}
    for e in C.chords():
        edge = G.edge(e)
        ends = []
        for x in edge.ends:
            if x is FREE:
                continue
            ends.append((comp[x], labels[(e, x)]))
        if not ends:
            continue  # isolated edge: no vertex of Z to attach to
        key = tuple(sorted(ends)) if len(ends) == 2 else (ends[0], None)
        groups.setdefault(key, []).append(e)
    edges = []
    for key, chords in sorted(groups.items(), key=lambda kv: min(map(label_key, kv[1]))):
        edges.append(BaseEdge(f"b{len(edges)}", key, tuple(sorted(chords, key=label_key))))
    verts = tuple(sorted(set(comp.values()), key=lambda z: int(z[1:])))
    B = BaseGraph(verts, tuple(edges), tuple(sorted(comp.items(), key=lambda kv: label_key(kv[0]))), OTHER)
    shape = OTHER
    if verts and all(B.degree(v) == 2 for v in verts) and not any(
            b.compact and b.ends[0][0] == b.ends[1][0] for b in edges):
        nonc = [b for b in edges if not b.compact]
        if len(nonc) == 2:
            shape = PATH
        elif not nonc:
            shape = CYCLE
    return BaseGraph(B.vertices, B.edges, B.component_of, shape)


@dataclass(frozen=True)
class Indices:
    values: Tuple[int, ...]
    shape: str
    edge_order: Tuple[str, ...] = ()
    vertex_order: Tuple[str, ...] = ()


@dataclass
class Dualizability:
    ok: bool
    reason: str = ""
    indices: Optional[Indices] = None
    base: Optional[BaseGraph] = None

    def __bool__(self):
        return self.ok


def dualizable(C: ChordalStructure) -> Dualizability:
    B = base_graph(C)
    if not C.graph.is_connected():
        return Dualizability(False, "the ribbon graph is not connected", None, B)
    for b in B.edges:
        if b.compact and b.ends[0][0] == b.ends[1][0]:
            return Dualizability(False, f"chords {list(b.chords)} join component {b.ends[0][0]} to itself "
                                        "(a loop in the base graph)", None, B)
    for v in B.vertices:
        d = B.degree(v)
        if d != 2:
            return Dualizability(False, f"base vertex {v} has degree {d}", None, B)
        sides = [end[1] for b in B.edges for end in b.ends if end is not None and end[0] == v]
        if sorted(sides) != ["N", "S"]:
            return Dualizability(False, f"both base edges at {v} lie on the same side of the zero section", None, B)
    return Dualizability(True, "", _order(B), B)


def _order(B: BaseGraph) -> Indices:
    edges = {b.id: b for b in B.edges}
    at = {v: [b.id for b in B.edges for end in b.ends if end is not None and end[0] == v] for v in B.vertices}
    lead = lambda bid: min(map(label_key, edges[bid].chords))
    nonc = [b.id for b in B.edges if not b.compact]
    if nonc:
        start = min(nonc, key=lead)
        shape = PATH
    else:
        start = min(edges, key=lead)
        shape = CYCLE
    seq, verts = [start], []
    # choose the direction: the end whose onward edge has the smaller lead
    b0 = edges[start]
    cands = [end[0] for end in b0.ends if end is not None]
    if len(cands) == 2:
        nxt = lambda v: next(x for x in at[v] if x != start)
        v = min(cands, key=lambda v: lead(nxt(v)))
    else:
        v = cands[0]
    cur = start
    while True:
        verts.append(v)
        onward = [x for x in at[v] if x != cur]
        if not onward:
            break
        cur = onward[0]
        if cur == start:
            break
        seq.append(cur)
        b = edges[cur]
        if not b.compact:
            break
        v = b.ends[0][0] if b.ends[1][0] == v else b.ends[1][0]
    values = tuple(len(edges[x].chords) for x in seq)
    return Indices(values, shape, tuple(seq), tuple(verts))


# ---------------------------------------------------------------------------
# constructors

def _wheel_component(k: int, n_north: int, n_south: int):
    """A Z-circle with enough vertices to carry the chords; returns vertices, Z-edges."""
    n = max(2, n_north, n_south)
    vs = [f"v{k}.{i}" for i in range(n)]
    zs = [(f"z{k}.{i}", vs[i], vs[(i + 1) % n]) for i in range(n)]
    return vs, zs


def dualizable_from_indices(shape: str, indices: Sequence[int]) -> ChordalStructure:
    """A chordal ribbon graph realising the given indices.

    PATH (a_0, ..., a_m): m wheels, a_0 and a_m noncompact chords at the ends.
    CYCLE (a_1, ..., a_m), m >= 2: m wheels in a ring.
    Chords of the i-th base edge leave wheel i on its north side and enter
    wheel i+1 on its south side.
    """
    a = list(indices)
    if any(x < 1 for x in a):
        raise CPMError("indices must be positive")
    if shape == PATH:
        if len(a) < 2:
            raise CPMError("a path needs at least two indices")
        m = len(a) - 1
        south = {0: a[0]}
        north = {m - 1: a[m]}
        links = [(i, i + 1, a[i + 1]) for i in range(m - 1)]
    elif shape == CYCLE:
        if len(a) < 2:
            raise CPMError("a cycle needs at least two indices")
        m = len(a)
        south, north = {}, {}
        links = [(i, (i + 1) % m, a[i]) for i in range(m)]
    else:
        raise CPMError(f"unknown shape {shape!r}")
    nN = {i: north.get(i, 0) for i in range(m)}
    nS = {i: south.get(i, 0) for i in range(m)}
    for i, j, k in links:
        nN[i] += k
        nS[j] += k
    vertices, edges = [], []
    orders: Dict[str, List] = {}
    comp_vs = {}
    for i in range(m):
        vs, zs = _wheel_component(i, nN[i], nS[i])
        comp_vs[i] = vs
        vertices += vs
        edges += zs
    used_n = {i: 0 for i in range(m)}
    used_s = {i: 0 for i in range(m)}
    north_half: Dict[str, str] = {}
    south_half: Dict[str, str] = {}
    count = 0

    def take(side, i):
        if side == "N":
            v = comp_vs[i][used_n[i]]
            used_n[i] += 1
        else:
            v = comp_vs[i][used_s[i]]
            used_s[i] += 1
        return v

    for i in range(m):
        for _ in range(south.get(i, 0)):
            e = f"c{count:02d}"
            count += 1
            v = take("S", i)
            edges.append((e, v, None))
            south_half[v] = e
    for i, j, k in links:
        for _ in range(k):
            e = f"c{count:02d}"
            count += 1
            u, w = take("N", i), take("S", j)
            edges.append((e, u, w))
            north_half[u] = e
            south_half[w] = e
    for i in range(m):
        for _ in range(north.get(i, 0)):
            e = f"c{count:02d}"
            count += 1
            v = take("N", i)
            edges.append((e, v, None))
            north_half[v] = e
    G = make_graph(vertices, edges)
    for i in range(m):
        vs = comp_vs[i]
        n = len(vs)
        for t, v in enumerate(vs):
            east, west = f"z{i}.{t}", f"z{i}.{(t - 1) % n}"
            order = [east]
            if v in north_half:
                order.append(north_half[v])
            order.append(west)
            if v in south_half:
                order.append(south_half[v])
            orders[v] = order
    R = RibbonGraph.build(G, orders)
    Z = {e[0] for e in edges if e[0].startswith("z")}
    return validate_chordal(R, Z)


def single_wheel(a1: int, a2: int) -> ChordalStructure:
    """One Z-circle with a1 noncompact chords north and a2 south."""
    return dualizable_from_indices(PATH, (a2, a1))


def curtain_rod() -> ChordalStructure:
    """Two rings joined by one chord, each with one further noncompact chord."""
    return dualizable_from_indices(PATH, (1, 1, 1))


def torus_graph() -> ChordalStructure:
    """The curtain rod with its two ends glued: a circle with two circles attached."""
    return dualizable_from_indices(CYCLE, (1, 1))


def bare_circle(n: int = 2) -> ChordalStructure:
    vs = [f"v{i}" for i in range(n)]
    G = make_graph(vs, [(f"z{i}", vs[i], vs[(i + 1) % n]) for i in range(n)])
    R = RibbonGraph.build(G, {vs[i]: [f"z{i}", f"z{(i - 1) % n}"] for i in range(n)})
    return validate_chordal(R, set(G.edge_ids))


# ---------------------------------------------------------------------------
# the wheel cover

@dataclass(frozen=True)
class Wheel:
    component: str
    cycle: Tuple[str, ...]             # Z-vertices in the positive direction
    lagrangian: ConicLagrangian
    quiver: Quiver
    spoke_arrow: Tuple[Tuple[Tuple[str, str], str], ...]  # chord half-edge -> arrow name
    cell_keys: Tuple[Tuple, ...]
    east: Tuple[Tuple[str, Tuple[str, str]], ...] = ()

    @cached_property
    def arrow_of(self) -> Dict[Tuple[str, str], str]:
        return dict(self.spoke_arrow)

    @cached_property
    def half_of(self) -> Dict[str, Tuple[str, str]]:
        return {a: h for h, a in self.spoke_arrow}


@dataclass(frozen=True)
class Overlap:
    chord: str
    left: Tuple[int, str]   # (wheel index, arrow)
    right: Tuple[int, str]


@dataclass(frozen=True)
class WheelCover:
    chordal: ChordalStructure
    wheels: Tuple[Wheel, ...]
    overlaps: Tuple[Overlap, ...]

    def wheel_of(self, component) -> int:
        return next(i for i, w in enumerate(self.wheels) if w.component == component)


def wheel_cover(C: ChordalStructure) -> WheelCover:
    G = C.graph
    comp = _components(C)
    east = default_orientation(C)
    labels = compass_labels(C, east)
    wheels = []
    order = sorted(set(comp.values()), key=lambda z: int(z[1:]))
    for z in order:
        vs = sorted((v for v in comp if comp[v] == z), key=label_key)
        start = vs[0]
        cyc = [start]
        h = east[start]
        while True:
            w = G.other_end(h)
            if w is FREE:
                raise CPMError(f"zero-section component {z} is a line; wheels need circles")
            if w == start:
                break
            cyc.append(w)
            h = east[w]
        L = len(cyc)
        pos = {v: Fraction(k, L) for k, v in enumerate(cyc)}
        spokes, halves = [], []
        for v in cyc:
            for hh in G.half_edges(v):
                if hh[0] in C.zero_section:
                    continue
                d = UP if labels[hh] == "N" else DOWN
                spokes.append((pos[v], d))
                halves.append((hh, (pos[v], d)))
        Lam = ConicLagrangian(CIRCLE, tuple(spokes))
        Q = quiver_from_lagrangian(Lam)
        by_spoke = {a.spoke: a.name for a in Q.arrows}
        spoke_arrow = tuple((hh, by_spoke[s]) for hh, s in halves)
        at = {p: v for v, p in pos.items()}
        keys = []
        for c in Q.cells:
            if c.is_point:
                keys.append(("pt", at[c.lo]))
            elif not Lam.points:
                keys.append(("all",))
            else:
                keys.append(("iv", at[c.lo], at[c.hi]))
        wheels.append(Wheel(z, tuple(cyc), Lam, Q, spoke_arrow, tuple(keys),
                            tuple((v, east[v]) for v in cyc)))
    idx = {w.component: i for i, w in enumerate(wheels)}
    overlaps = []
    for e in C.chords():
        edge = G.edge(e)
        if not edge.compact:
            continue
        u, v = edge.u, edge.v
        left = (idx[comp[u]], wheels[idx[comp[u]]].arrow_of[(e, u)])
        right = (idx[comp[v]], wheels[idx[comp[v]]].arrow_of[(e, v)])
        overlaps.append(Overlap(e, left, right))
    return WheelCover(C, tuple(wheels), tuple(overlaps))


# ---------------------------------------------------------------------------
# stalks in fixed bases

@dataclass(frozen=True)
class StalkBasis:
    """ker / coker of M_a with chosen bases.

    ``ker`` are kernel vectors; ``proj_ker`` is a projection of the source
    onto the kernel coordinates; ``coker`` is the quotient map and ``lift``
    a section of it.
    """
    ker: Tuple[Tuple[Fraction, ...], ...]
    proj_ker: Tuple[Tuple[Fraction, ...], ...]
    coker: Tuple[Tuple[Fraction, ...], ...]
    lift: Tuple[Tuple[Fraction, ...], ...]

    @property
    def dims(self) -> Tuple[int, int]:
        return len(self.ker), len(self.coker)


def stalk_basis(M: Rep, arrow: str) -> StalkBasis:
    a = M.quiver.arrow(arrow)
    m = M.maps[arrow]
    ns, nt = M.dim(a.source), M.dim(a.target)
    K = kernel(m, ns) if nt else [[Fraction(int(i == j)) for i in range(ns)] for j in range(ns)]
    # projection onto ker coordinates along a complement
    comp = complement_basis(K, ns)
    if ns:
        P = inverse(transpose(K + comp, ns))
        proj = P[:len(K)]
    else:
        proj = []
    Qm = cokernel_projection(m if ns else [[] for _ in range(nt)], nt)
    img = column_space(m) if ns and nt else []
    lifts = complement_basis(img, nt)
    t = lambda mat: tuple(tuple(r) for r in mat)
    return StalkBasis(t(K), t(proj), t(Qm), t(lifts))


# ---------------------------------------------------------------------------
# glued objects

@dataclass(frozen=True)
class GluedObject:
    cover: WheelCover
    reps: Tuple[Rep, ...]
    glue_items: Tuple[Tuple[str, Tuple], ...]  # chord -> (g_-1, g_0) as row tuples

    @cached_property
    def glue(self) -> Dict[str, Tuple[Matrix, Matrix]]:
        return {c: ([list(r) for r in g1], [list(r) for r in g0]) for c, (g1, g0) in self.glue_items}

    def stalk(self, wheel: int, arrow: str) -> StalkBasis:
        return stalk_basis(self.reps[wheel], arrow)

    def problems(self) -> List[str]:
        out = []
        cov = self.cover
        if len(self.reps) != len(cov.wheels):
            return ["one representation per wheel is required"]
        for w, M in zip(cov.wheels, self.reps):
            if M.quiver != w.quiver:
                out.append(f"representation on wheel {w.component} is over the wrong quiver")
        if out:
            return out
        g = self.glue
        for o in cov.overlaps:
            sl = self.stalk(*o.left).dims
            sr = self.stalk(*o.right).dims
            if o.chord not in g:
                if sl != (0, 0) or sr != (0, 0):
                    out.append(f"overlap {o.chord}: missing gluing")
                continue
            for deg, k in ((-1, 0), (0, 1)):
                m = g[o.chord][k]
                if len(m) != sr[k] or any(len(r) != sl[k] for r in m):
                    out.append(f"overlap {o.chord}: degree {deg} gluing has shape "
                               f"{len(m)}x{len(m[0]) if m else 0}, stalks are {sl[k]} -> {sr[k]}")
                elif not is_invertible(m):
                    out.append(f"overlap {o.chord}: degree {deg} gluing is not invertible")
        return out


def make_glued(cover: WheelCover, reps: Sequence[Rep], glue: Dict) -> GluedObject:
    items = []
    for c, (g1, g0) in sorted(glue.items(), key=lambda kv: label_key(kv[0])):
        items.append((c, (tuple(tuple(Fraction(x) for x in r) for r in g1),
                          tuple(tuple(Fraction(x) for x in r) for r in g0))))
    X = GluedObject(cover, tuple(reps), tuple(items))
    p = X.problems()
    if p:
        raise CPMError(p)
    return X


def zero_glued(cover: WheelCover) -> GluedObject:
    reps = [make_rep(w.quiver, [0] * len(w.quiver.vertices), {}) for w in cover.wheels]
    return make_glued(cover, reps, {o.chord: ([], []) for o in cover.overlaps})


def designated_chords(C: ChordalStructure) -> Dict[str, Dict[str, str]]:
    """Per component, the least chord of its north and of its south base edge."""
    D = dualizable(C)
    if not D:
        raise CPMError(f"not dualizable: {D.reason}")
    out: Dict[str, Dict[str, str]] = {}
    for b in D.base.edges:
        for end in b.ends:
            if end is not None:
                out.setdefault(end[0], {})[end[1]] = b.chords[0]
    return out


def arc_rep(w: Wheel, start_half, end_half) -> Rep:
    """Interval module, 1-dim on the cells of the open arc running in the
    positive direction from the spoke of ``start_half`` to that of ``end_half``."""
    Q = w.quiver
    x0 = Q.arrow(w.arrow_of[start_half]).spoke[0]
    x1 = Q.arrow(w.arrow_of[end_half]).spoke[0]
    cells = list(Q.cells)
    n = len(cells)
    i = next(k for k, c in enumerate(cells) if c.lo == x0 and not c.is_point)
    j = next(k for k, c in enumerate(cells) if c.hi == x1 and not c.is_point)
    support, k = [i], i
    while k != j:
        k = (k + 1) % n
        support.append(k)
    inside = lambda c: not ((c.lo == x0 and c.lo_closed) or (c.hi == x1 and c.hi_closed))
    support = {k for k in support if inside(cells[k])}
    dims = [int(v in support) for v in Q.vertices]
    maps = {a.name: [[1]] for a in Q.arrows if dims[a.source] and dims[a.target]}
    return make_rep(Q, dims, maps)


def structure_object(C: ChordalStructure, cover: Optional[WheelCover] = None) -> GluedObject:
    """Per wheel the constant sheaf on the open arc from its designated south
    chord to its designated north chord; identity gluings on designated chords."""
    cover = cover or wheel_cover(C)
    des = designated_chords(C)
    reps = []
    for w in cover.wheels:
        d = des[w.component]
        hs = next(h for h in w.arrow_of if h[0] == d["S"])
        hn = next(h for h in w.arrow_of if h[0] == d["N"])
        reps.append(arc_rep(w, hs, hn))
    glue = {}
    for o in cover.overlaps:
        sl = stalk_basis(reps[o.left[0]], o.left[1]).dims
        glue[o.chord] = (identity(sl[0]), identity(sl[1]))
    return make_glued(cover, reps, glue)


# ---------------------------------------------------------------------------
# Hom between glued objects

def _restrict0(sbM: StalkBasis, sbN: StalkBasis, phi_s: Matrix, phi_t: Matrix):
    """Degree-0 map on stalks induced by (phi_s, phi_t): (ker part, coker part)."""
    ker = []
    for v in sbM.ker:
        w = [sum(phi_s[i][j] * v[j] for j in range(len(v))) for i in range(len(phi_s))]
        ker.append([sum(p[i] * w[i] for i in range(len(w))) for p in sbN.proj_ker])
    cok = []
    for v in sbM.lift:
        w = [sum(phi_t[i][j] * v[j] for j in range(len(v))) for i in range(len(phi_t))]
        cok.append([sum(p[i] * w[i] for i in range(len(w))) for p in sbN.coker])
    # columns -> matrices (rows = target coords)
    K = [[ker[c][r] for c in range(len(ker))] for r in range(len(sbN.ker))]
    C = [[cok[c][r] for c in range(len(cok))] for r in range(len(sbN.coker))]
    return K, C


def _restrict1(sbM: StalkBasis, sbN: StalkBasis, psi: Matrix):
    """Degree-1 map ker M_a -> coker N_a induced by psi: M_s -> N_t."""
    cols = []
    for v in sbM.ker:
        w = [sum(psi[i][j] * v[j] for j in range(len(v))) for i in range(len(psi))]
        cols.append([sum(p[i] * w[i] for i in range(len(w))) for p in sbN.coker])
    return [[cols[c][r] for c in range(len(cols))] for r in range(len(sbN.coker))]


def _mm(a, b, inner, ncols):
    return matmul(a, b, inner, ncols)


def cpm_hom_full(X: GluedObject, Y: GluedObject) -> Dict[int, int]:
    """Cohomology of the fibre of (wheel Homs) -> (overlap Homs), all degrees."""
    if X.cover != Y.cover:
        raise CPMError("objects live on different covers")
    cov = X.cover
    # A^0, A^1 coordinates per wheel
    comps = []
    a0_off, a1_off = [], []
    n0 = n1 = 0
    for M, N in zip(X.reps, Y.reps):
        rows, nvars, var_off = hom_complex(M, N)
        comps.append((rows, nvars, var_off))
        a0_off.append(n0)
        a1_off.append(n1)
        n0 += nvars
        n1 += len(rows)
    # overlap Hom coordinates, per degree
    ov = []
    b_off = {-1: 0, 0: 0, 1: 0}
    for o in cov.overlaps:
        sxL, syL = X.stalk(*o.left), Y.stalk(*o.left)
        dx, dy = sxL.dims, syL.dims
        blocks = {-1: [(1, 0)], 0: [(0, 0), (1, 1)], 1: [(0, 1)]}  # (src deg idx, tgt deg idx)
        entry = {}
        for deg, pairs in blocks.items():
            entry[deg] = []
            for (s, t) in pairs:
                entry[deg].append((s, t, b_off[deg]))
                b_off[deg] += dy[t] * dx[s]
        ov.append((o, entry))
    nB = b_off

    def rep_vars(i, vec0):
        """Unpack wheel i's A^0 vector into phi_v matrices."""
        M, N = X.reps[i], Y.reps[i]
        _, _, var_off = comps[i]
        out = {}
        for v in M.quiver.vertices:
            o, n, m = var_off[v], N.dim(v), M.dim(v)
            out[v] = [[vec0[o + r * m + c] for c in range(m)] for r in range(n)]
        return out

    def overlap_image0(i_side, o, phi):
        """r(phi) on the stalks at one side of o, as (ker map, coker map)."""
        wi, a = i_side
        M, N = X.reps[wi], Y.reps[wi]
        arr = M.quiver.arrow(a)
        return _restrict0(X.stalk(wi, a), Y.stalk(wi, a), phi[arr.source], phi[arr.target])

    def conj(o, mats, deg_pairs):
        """g_Y^-1 . m . g_X for the right side, per block."""
        gx, gy = X.glue[o.chord], Y.glue[o.chord]
        out = []
        for m, (s, t) in zip(mats, deg_pairs):
            gyi = inverse(gy[t]) if gy[t] else []
            tmp = _mm(m, gx[s], len(gx[s]), len(gx[s][0]) if gx[s] else 0) if m and gx[s] else \
                zeros(len(m), len(gx[s][0]) if gx[s] else 0)
            out.append(_mm(gyi, tmp, len(tmp), len(tmp[0]) if tmp else 0) if gyi and tmp else
                       zeros(len(gyi), len(tmp[0]) if tmp else 0))
        return out

    # d0: A^0 -> A^1 (+) B^0
    D0 = zeros(n1 + nB[0], n0)
    for i, (rows, nvars, _) in enumerate(comps):
        for r, row in enumerate(rows):
            for c, x in enumerate(row):
                D0[a1_off[i] + r][a0_off[i] + c] = x
    for col in range(n0):
        # which wheel owns this variable
        i = max(k for k in range(len(a0_off)) if a0_off[k] <= col)
        if col - a0_off[i] >= comps[i][1]:
            continue
        vec = [Fraction(0)] * comps[i][1]
        vec[col - a0_off[i]] = Fraction(1)
        phi = rep_vars(i, vec)
        for o, entry in ov:
            parts = [(o.left, 1), (o.right, -1)]
            for side, sign in parts:
                if side[0] != i:
                    continue
                K, Cc = overlap_image0(side, o, phi)
                if sign < 0:
                    K, Cc = conj(o, [K, Cc], [(0, 0), (1, 1)])
                for (s, t, off), m in zip(entry[0], [K, Cc]):
                    ncol = len(m[0]) if m else 0
                    for r in range(len(m)):
                        for c in range(ncol):
                            D0[n1 + off + r * ncol + c][col] += sign * m[r][c]
    # d1: A^1 -> B^1
    D1 = zeros(nB[1], n1)
    for i, (rows, nvars, _) in enumerate(comps):
        M, N = X.reps[i], Y.reps[i]
        # A^1 coordinates are ordered arrow by arrow, (row i of N_t) x (col j of M_s)
        off = 0
        for arr in M.quiver.arrows:
            r_n, c_m = N.dim(arr.target), M.dim(arr.source)
            for r in range(r_n):
                for c in range(c_m):
                    psi = zeros(r_n, c_m)
                    psi[r][c] = Fraction(1)
                    col = a1_off[i] + off + r * c_m + c
                    for o, entry in ov:
                        for side, sign in ((o.left, 1), (o.right, -1)):
                            if side != (i, arr.name):
                                continue
                            m = _restrict1(X.stalk(i, arr.name), Y.stalk(i, arr.name), psi)
                            if sign < 0:
                                m = conj(o, [m], [(0, 1)])[0]
                            (s, t, boff) = entry[1][0]
                            ncol = len(m[0]) if m else 0
                            for rr in range(len(m)):
                                for cc in range(ncol):
                                    D1[boff + rr * ncol + cc][col] += sign * m[rr][cc]
            off += r_n * c_m
    r0 = rank(D0) if D0 and n0 else 0
    r1 = rank(D1) if D1 and n1 else 0
    dimF = {0: n0 + nB[-1], 1: n1 + nB[0], 2: nB[1]}
    h = {-1: 0, 0: dimF[0] - r0, 1: dimF[1] - r0 - r1, 2: dimF[2] - r1}
    return h


def cpm_hom(X: GluedObject, Y: GluedObject) -> Tuple[int, int, int]:
    h = cpm_hom_full(X, Y)
    return h[-1], h[0], h[1]


def euler(h: Sequence[int]) -> int:
    """h^0 - h^-1 - h^1 for a triple (h^-1, h^0, h^1)."""
    return h[1] - h[0] - h[2]


# ---------------------------------------------------------------------------
# operations on glued objects

def _sum_rep(M: Rep, N: Rep) -> Rep:
    Q = M.quiver
    maps = {}
    for a in Q.arrows:
        r1, c1 = M.dim(a.target), M.dim(a.source)
        r2, c2 = N.dim(a.target), N.dim(a.source)
        m = zeros(r1 + r2, c1 + c2)
        for i in range(r1):
            m[i][:c1] = M.maps[a.name][i]
        for i in range(r2):
            m[r1 + i][c1:] = N.maps[a.name][i]
        maps[a.name] = m
    return make_rep(Q, [a + b for a, b in zip(M.dims, N.dims)], maps)


def _change_of_basis(sbS: StalkBasis, sbX: StalkBasis, sbY: StalkBasis, k: int, nx: int) -> Matrix:
    """Coordinates, in the sum's stalk basis, of the concatenated X- and Y-bases (columns)."""
    n = _width(sbS, k)
    xs, ys = (sbX.ker, sbY.ker) if k == 0 else (sbX.lift, sbY.lift)
    vecs = [list(v) + [Fraction(0)] * (n - nx) for v in xs] + [[Fraction(0)] * nx + list(v) for v in ys]
    P = sbS.proj_ker if k == 0 else sbS.coker
    cols = [[sum(p[i] * v[i] for i in range(n)) for p in P] for v in vecs]
    return [[cols[c][r] for c in range(len(cols))] for r in range(len(P))]


def _width(sb: StalkBasis, k: int) -> int:
    rows = sb.proj_ker if k == 0 else sb.coker
    return len(rows[0]) if rows else 0


def direct_sum_glued(X: GluedObject, Y: GluedObject) -> GluedObject:
    """X (+) Y, with the block gluing rewritten in the sum's stalk bases."""
    if X.cover != Y.cover:
        raise CPMError("objects live on different covers")
    reps = [_sum_rep(M, N) for M, N in zip(X.reps, Y.reps)]
    glue = {}
    for o in X.cover.overlaps:
        pair = []
        for k in (0, 1):
            T = {}
            for side in (o.left, o.right):
                i, a = side
                arr = X.reps[i].quiver.arrow(a)
                nx = X.reps[i].dim(arr.source if k == 0 else arr.target)
                T[side] = _change_of_basis(stalk_basis(reps[i], a), X.stalk(i, a), Y.stalk(i, a), k, nx)
            gx, gy = X.glue[o.chord][k], Y.glue[o.chord][k]
            nl = X.stalk(*o.left).dims[k] + Y.stalk(*o.left).dims[k]
            nr = X.stalk(*o.right).dims[k] + Y.stalk(*o.right).dims[k]
            G = zeros(nr, nl)
            xr, xl = X.stalk(*o.right).dims[k], X.stalk(*o.left).dims[k]
            for r in range(xr):
                for c in range(xl):
                    G[r][c] = gx[r][c]
            for r in range(nr - xr):
                for c in range(nl - xl):
                    G[xr + r][xl + c] = gy[r][c]
            if nl == 0:
                pair.append(zeros(nr, 0))
                continue
            M1 = matmul(T[o.right], G, nr, nl) if nr else []
            pair.append(matmul(M1, inverse(T[o.left]), nl, nl) if nr else [])
        glue[o.chord] = tuple(pair)
    return make_glued(X.cover, reps, glue)


def reflect_glued(X: GluedObject, wheel: int, vertex: int) -> GluedObject:
    """BGP reflection of one wheel's representation at a sink or source whose
    arrows all come from noncompact chords, so the gluing data is untouched.
    The result lives on a cover whose wheel quiver is the reflected one."""
    from dataclasses import replace
    from .quiver import bgp_reflect, reflect_quiver
    cov = X.cover
    w = cov.wheels[wheel]
    Q = w.quiver
    glued = {o.left[1] for o in cov.overlaps if o.left[0] == wheel} | \
            {o.right[1] for o in cov.overlaps if o.right[0] == wheel}
    touching = [a.name for a in Q.arrows if vertex in (a.source, a.target)]
    if glued & set(touching):
        raise CPMError(f"vertex {vertex} of wheel {w.component} meets an overlap arrow")
    M2 = bgp_reflect(Q, vertex, X.reps[wheel])
    w2 = replace(w, quiver=reflect_quiver(Q, vertex))
    cov2 = WheelCover(cov.chordal, cov.wheels[:wheel] + (w2,) + cov.wheels[wheel + 1:], cov.overlaps)
    reps = X.reps[:wheel] + (M2,) + X.reps[wheel + 1:]
    return GluedObject(cov2, reps, X.glue_items)


# ---------------------------------------------------------------------------
# refining the cover

def subdivide_zero_edge(C: ChordalStructure, eid: str, new_vertex=None) -> ChordalStructure:
    if eid not in C.zero_section:
        raise CPMError(f"{eid!r} is not a zero-section edge")
    G = C.graph
    e = G.edge(eid)
    m = new_vertex if new_vertex is not None else f"{eid}~m"
    G2 = G.subdivide(eid, m)
    a, b = f"{eid}~a", f"{eid}~b"
    orders = {}
    for v, lst in C.ribbon.order_lists().items():
        orders[v] = [(a if v == e.u else b) if x == eid else x for x in lst]
    orders[m] = [a, b]
    R2 = RibbonGraph.build(G2, orders)
    return validate_chordal(R2, (C.zero_section - {eid}) | {a, b})


def _old_edge(x: str) -> str:
    return x[:-2] if x.endswith("~a") or x.endswith("~b") else x


def transport_glued(X: GluedObject, cover: WheelCover) -> GluedObject:
    """Move X to the cover of a subdivision of its graph: same spokes, same
    cells, the new bivalent vertices carry nothing."""
    old = X.cover
    reps = []
    for w in cover.wheels:
        i = next(k for k, u in enumerate(old.wheels) if set(u.cycle) & set(w.cycle))
        u, M = old.wheels[i], X.reps[i]
        ue, we = dict(u.east), dict(w.east)
        v = next(x for x in u.cycle if x in we)
        flip = _old_edge(we[v][0]) != ue[v][0]
        key_at = {k: n for n, k in enumerate(w.cell_keys)}
        dims = [0] * len(w.quiver.vertices)
        cell_map = {}
        for n, k in enumerate(u.cell_keys):
            k2 = (k[0], k[2], k[1]) if flip and k[0] == "iv" else k
            cell_map[n] = key_at[k2]
            dims[key_at[k2]] = M.dims[n]
        maps = {}
        for h, arr in u.spoke_arrow:
            new_arr = w.arrow_of[h]
            A = w.quiver.arrow(new_arr)
            B = u.quiver.arrow(arr)
            if (cell_map[B.source], cell_map[B.target]) != (A.source, A.target):
                raise CPMError(f"arrow for {h} does not transport")
            maps[new_arr] = M.maps[arr]
        reps.append(make_rep(w.quiver, dims, maps))
    return GluedObject(cover, tuple(reps), X.glue_items)


# ---------------------------------------------------------------------------
# sieves of partial contractions
#
# In the opposite category an arrow U -> X is a partial contraction X ~> U,
# so a sieve on X is a set of partial contractions out of X closed under
# composing further partial contractions afterwards.

def factors_through(h: PartialContraction, g: PartialContraction) -> bool:
    """Whether h = k o g for some partial contraction k."""
    if h.source != g.source:
        return False
    if not (h.open_vertices <= g.open_vertices and h.open_edges <= g.open_edges):
        return False
    hv, gv = h.map.vertex_map, g.map.vertex_map
    ha, ga = h.map.edge_action, g.map.edge_action
    for e in h.open_edges:
        if isinstance(ga[e], Collapse) and not isinstance(ha[e], Collapse):
            return False
    seen: Dict[str, str] = {}
    for x in h.open_vertices:
        y = seen.setdefault(gv[x], hv[x])
        if y != hv[x]:
            return False
    return True


class Sieve:
    base: RibbonGraph

    def contains(self, h: PartialContraction) -> bool:
        raise NotImplementedError

    def candidates(self) -> List[PartialContraction]:
        """Members worth checking for the covering condition."""
        return [h for h in local_contractions(self.base) if self.contains(h)]


@dataclass(frozen=True)
class GeneratedSieve(Sieve):
    base: RibbonGraph
    generators: Tuple[PartialContraction, ...]

    def contains(self, h):
        return any(factors_through(h, g) for g in self.generators)

    def candidates(self):
        return list(self.generators)


@dataclass(frozen=True)
class PulledBackSieve(Sieve):
    base: RibbonGraph
    along: PartialContraction
    sieve: Sieve

    def contains(self, h):
        return self.sieve.contains(compose_partial_contractions(self.along, h))

def is_open_restriction(f: PartialContraction) -> bool:
    """X >- U -> U with the identity map."""
    G = f.target.graph
    if set(G.vertices) != set(f.open_vertices) or set(G.edge_ids) != set(f.open_edges):
        return False
    return all(x == y for x, y in f.map.vertex_map.items()) and all(
        isinstance(a, EdgeMap) and a.edge == e and a.a == 1 and a.b == 0 for e, a in f.map.edge_action.items())


def sieve(X: RibbonGraph, generators=()) -> GeneratedSieve:
    for g in generators:
        if g.source != X:
            raise CPMError("generator does not start at the base graph")
    return GeneratedSieve(X, tuple(generators))


def maximal_sieve(X: RibbonGraph) -> GeneratedSieve:
    return sieve(X, [identity_partial(X)])


def star_sieve(X: RibbonGraph, vertices=None) -> GeneratedSieve:
    vs = X.graph.vertices if vertices is None else vertices
    return sieve(X, [star_partial(X, v) for v in vs])


def pullback_sieve(f: PartialContraction, U: Sieve) -> Sieve:
    """f*U on the target of f: g belongs iff g o f belongs to U."""
    if f.source != U.base:
        raise CPMError("the sieve does not live on the source of f")
    return PulledBackSieve(f.target, f, U)


def uncovered(U: Sieve) -> List[str]:
    """Vertices not inside the open part of any open inclusion in U.

    Only members that are open inclusions count.  Membership is monotone
    under shrinking an open inclusion, so v is covered exactly when its
    star restriction belongs to U.
    """
    return [v for v in U.base.graph.vertices if not U.contains(star_partial(U.base, v))]


def is_covering(U: Sieve) -> bool:
    return not uncovered(U)


def _forests(G: Graph, edges):
    """Subsets of the given compact edges that contain no cycle."""
    edges = sorted(edges, key=label_key)
    out = []

    def acyclic(sub):
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x
        for e in sub:
            a, b = find(G.edge(e).u), find(G.edge(e).v)
            if a == b:
                return False
            parent[a] = b
        return True
    for mask in range(1 << len(edges)):
        sub = [e for k, e in enumerate(edges) if mask >> k & 1]
        if acyclic(sub):
            out.append(sub)
    return out


def contract_forest(R: RibbonGraph, forest) -> Tuple[RibbonGraph, "object"]:
    from .graph import compose_morphisms, identity_morphism
    from .ribbon import contract_edge, RibbonError
    S, m = R, identity_morphism(R.graph)
    for e in forest:
        S, step = contract_edge(S, e)
        m = compose_morphisms(m, step)
    return S, m


def local_contractions(X: RibbonGraph, max_vertices: int = 3) -> List[PartialContraction]:
    """Open restrictions to small connected vertex sets, followed by every
    contraction of a forest of their compact edges."""
    from itertools import combinations
    from .ribbon import RibbonError
    G = X.graph
    out = []
    vs = sorted(G.vertices, key=label_key)
    for k in range(1, min(max_vertices, len(vs)) + 1):
        for S in combinations(vs, k):
            es = {e for v in S for e in G.incident(v)}
            W = X.restrict_open(S, es)
            if not W.graph.is_connected():
                continue
            for F in _forests(W.graph, [e.id for e in W.graph.compact_edges()]):
                try:
                    T, m = contract_forest(W, F)
                except RibbonError:
                    continue
                out.append(PartialContraction(X, frozenset(S), frozenset(es), T, m))
    return out


def gt_axioms(X: RibbonGraph, U: Sieve, V: Sieve, along: Sequence[PartialContraction]) -> Dict[str, bool]:
    """The three topology axioms on one instance.

    ``along`` are the maps used for the pullback axiom; U should be covering.
    """
    ax1 = is_covering(maximal_sieve(X))
    ax2 = all(is_covering(pullback_sieve(f, U)) for f in along) if is_covering(U) else True
    premise = is_covering(U) and all(is_covering(pullback_sieve(f, V)) for f in U.candidates())
    ax3 = (not premise) or is_covering(V)
    return {"maximal": ax1, "pullback": ax2, "local": ax3}


def random_invertible(n: int, rng) -> Matrix:
    while True:
        m = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if is_invertible(m):
            return m


def random_glued(cover: WheelCover, rng, max_dim: int = 2, tries: int = 400) -> Optional[GluedObject]:
    """A random glued object: random wheel reps whose stalks match across
    overlaps, with random invertible gluings.  None if nothing is found."""
    from .quiver import random_rep
    for _ in range(tries):
        reps = [random_rep(w.quiver, [rng.randint(0, max_dim) for _ in w.quiver.vertices], rng, -1, 1)
                for w in cover.wheels]
        ok = all(stalk_basis(reps[o.left[0]], o.left[1]).dims == stalk_basis(reps[o.right[0]], o.right[1]).dims
                 for o in cover.overlaps)
        if not ok:
            continue
        glue = {}
        for o in cover.overlaps:
            d = stalk_basis(reps[o.left[0]], o.left[1]).dims
            glue[o.chord] = (random_invertible(d[0], rng), random_invertible(d[1], rng))
        return make_glued(cover, reps, glue)
    return None
