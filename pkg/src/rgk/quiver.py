"""Conic Lagrangians over a line or circle, their quivers, and representations."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import (Matrix, block_diag, charpoly, cokernel_projection, column_space, frac,
                     identity, is_invertible, kernel, matmul, matpow, matrix, rank,
                     rational_roots, transpose, zeros)

UP, DOWN = "up", "down"
LINE, CIRCLE = "line", "circle"


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class ConicLagrangian:
    base: str
    spokes: Tuple[Tuple[Fraction, str], ...]  # (point, UP | DOWN)
    contains_zero_section: bool = True

    def __post_init__(self):
        if self.base not in (LINE, CIRCLE):
            raise QuiverError(f"base must be {LINE!r} or {CIRCLE!r}")
        sp = []
        for x, d in self.spokes:
            x = frac(x)
            if d not in (UP, DOWN):
                raise QuiverError(f"spoke direction must be up or down, got {d!r}")
            if self.base == CIRCLE:
                x = x - (x.numerator // x.denominator)
            sp.append((x, d))
        if len(set(sp)) != len(sp):
            raise QuiverError("at most one upward and one downward spoke per point")
        object.__setattr__(self, "spokes", tuple(sorted(sp, key=lambda s: (s[0], s[1] != UP))))

    @property
    def points(self) -> List[Fraction]:
        return sorted({x for x, _ in self.spokes})

    def dirs_at(self, x) -> set:
        return {d for y, d in self.spokes if y == x}

    def counts(self) -> Tuple[int, int]:
        up = sum(1 for _, d in self.spokes if d == UP)
        return up, len(self.spokes) - up

    def to_json(self) -> dict:
        from .linalg import fmt
        return {"base": self.base, "points": [fmt(x) for x in self.points],
                "spokes": [{"at": fmt(x), "dir": d} for x, d in self.spokes]}

    @staticmethod
    def from_json(data: dict) -> "ConicLagrangian":
        spokes = tuple((frac(s["at"]), s["dir"]) for s in data.get("spokes", []))
        L = ConicLagrangian(data.get("base", LINE), spokes)
        pts = data.get("points")
        if pts is not None:
            listed = {frac(p) for p in pts}
            if L.base == CIRCLE:
                listed = {x - (x.numerator // x.denominator) for x in listed}
            if listed != set(L.points):
                raise QuiverError("every listed point must carry a spoke and every spoke a listed point")
        return L


def lagrangian(base, spokes) -> ConicLagrangian:
    return ConicLagrangian(base, tuple(spokes))


def bot_plus_top(xm=-1, xp=1) -> ConicLagrangian:
    """Zero section, the fibre at 0, an upward spoke at xm < 0, a downward one at xp > 0."""
    return lagrangian(LINE, [(xm, UP), (0, UP), (0, DOWN), (xp, DOWN)])


# ---------------------------------------------------------------------------
# partition

@dataclass(frozen=True)
class Cell:
    lo: Optional[Fraction]  # None = -infinity
    hi: Optional[Fraction]  # None = +infinity
    lo_closed: bool
    hi_closed: bool
    wraps: bool = False  # circle interval passing through 0

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi and not self.wraps

    def __str__(self):
        from .linalg import fmt
        if self.is_point:
            return "{" + fmt(self.lo) + "}"
        lo = "-inf" if self.lo is None else fmt(self.lo)
        hi = "inf" if self.hi is None else fmt(self.hi)
        return ("[" if self.lo_closed else "(") + lo + "," + hi + ("]" if self.hi_closed else ")")


def _incl_left(dirs) -> bool:
    return UP in dirs and DOWN not in dirs


def _incl_right(dirs) -> bool:
    return DOWN in dirs and UP not in dirs


def partition(L: ConicLagrangian) -> List[Cell]:
    pts = L.points
    if not pts:
        if L.base == LINE:
            return [Cell(None, None, False, False)]
        return [Cell(Fraction(0), Fraction(0), False, False, True)]
    cells = []
    if L.base == LINE:
        cells.append(Cell(None, pts[0], False, _incl_right(L.dirs_at(pts[0]))))
    for i, x in enumerate(pts):
        dx = L.dirs_at(x)
        if UP in dx and DOWN in dx:
            cells.append(Cell(x, x, True, True))
        if i + 1 < len(pts):
            y = pts[i + 1]
            cells.append(Cell(x, y, _incl_left(dx), _incl_right(L.dirs_at(y))))
        elif L.base == LINE:
            cells.append(Cell(x, None, _incl_left(dx), False))
        else:
            y = pts[0]
            cells.append(Cell(x, y, _incl_left(dx), _incl_right(L.dirs_at(y)), True))
    return cells


# ---------------------------------------------------------------------------
# quivers

@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int
    spoke: Optional[Tuple[Fraction, str]] = None


@dataclass(frozen=True)
class Quiver:
    vertices: Tuple[int, ...]
    arrows: Tuple[Arrow, ...]
    cells: Tuple[Cell, ...] = ()

    @cached_property
    def arrow_map(self) -> Dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    def arrow(self, name) -> Arrow:
        return self.arrow_map[name]

    def is_sink(self, x) -> bool:
        return all(a.source != x for a in self.arrows)

    def is_source(self, x) -> bool:
        return all(a.target != x for a in self.arrows)

    def is_acyclic(self) -> bool:
        indeg = {v: 0 for v in self.vertices}
        for a in self.arrows:
            indeg[a.target] += 1
        todo = [v for v in self.vertices if indeg[v] == 0]
        seen = 0
        while todo:
            v = todo.pop()
            seen += 1
            for a in self.arrows:
                if a.source == v:
                    indeg[a.target] -= 1
                    if indeg[a.target] == 0:
                        todo.append(a.target)
        return seen == len(self.vertices)

    def underlying_edges(self):
        return sorted(tuple(sorted((a.source, a.target))) for a in self.arrows)

    def shape(self) -> str:
        """Arrow directions along a type-A quiver: e.g. '<<>>'."""
        out = []
        for i in range(len(self.vertices) - 1):
            a = [x for x in self.arrows if {x.source, x.target} == {i, i + 1}]
            if len(a) != 1:
                return "?"
            out.append(">" if a[0].source == i else "<")
        return "".join(out)


def quiver_from_lagrangian(L: ConicLagrangian) -> Quiver:
    cells = partition(L)
    if L.base == CIRCLE and not L.points:
        return Quiver((0,), (Arrow("mono", 0, 0, None),), tuple(cells))
    # the cell just left / right of each point, and the point cell itself
    left, right, at = {}, {}, {}
    for i, c in enumerate(cells):
        if c.is_point:
            at[c.lo] = i
        else:
            if c.hi is not None:
                left[c.hi] = i
            if c.lo is not None:
                right[c.lo] = i
    arrows = []
    for k, (x, d) in enumerate(L.spokes):
        if x in at:
            src, tgt = at[x], (left[x] if d == UP else right[x])
        elif d == UP:
            src, tgt = right[x], left[x]
        else:
            src, tgt = left[x], right[x]
        arrows.append(Arrow(f"a{k}", src, tgt, (x, d)))
    return Quiver(tuple(range(len(cells))), tuple(arrows), tuple(cells))


def make_quiver(n: int, arrows: Sequence[Tuple]) -> Quiver:
    """arrows as (name, source, target)."""
    return Quiver(tuple(range(n)), tuple(Arrow(a, s, t) for a, s, t in arrows))


def type_a_quiver(shape: str) -> Quiver:
    """'<>' etc: arrow i points right if shape[i] == '>'."""
    arrows = []
    for i, ch in enumerate(shape):
        arrows.append((f"a{i}", i, i + 1) if ch == ">" else (f"a{i}", i + 1, i))
    return make_quiver(len(shape) + 1, arrows)


def kronecker() -> Quiver:
    """Vertex 0 is the sink, 1 the source."""
    return make_quiver(2, [("a", 1, 0), ("b", 1, 0)])


# ---------------------------------------------------------------------------
# representations

@dataclass(frozen=True)
class Rep:
    quiver: Quiver
    dims: Tuple[int, ...]
    map_items: Tuple[Tuple[str, Tuple[Tuple[Fraction, ...], ...]], ...]

    @cached_property
    def maps(self) -> Dict[str, Matrix]:
        return {a: [list(r) for r in m] for a, m in self.map_items}

    def dim(self, v) -> int:
        return self.dims[self.quiver.vertices.index(v)]

    def problems(self) -> List[str]:
        out = []
        Q = self.quiver
        if len(self.dims) != len(Q.vertices):
            return ["dimension vector has the wrong length"]
        if set(self.maps) != set(Q.arrow_map):
            return ["maps must be given on exactly the arrows"]
        for a in Q.arrows:
            m = self.maps[a.name]
            r, c = self.dim(a.target), self.dim(a.source)
            if len(m) != r or any(len(row) != c for row in m):
                out.append(f"map {a.name!r} should be {r}x{c}")
        return out

    def total_dim(self) -> int:
        return sum(self.dims)


def make_rep(Q: Quiver, dims, maps: Dict) -> Rep:
    items = []
    for a in Q.arrows:
        m = maps.get(a.name)
        if m is None:
            m = zeros(dims[Q.vertices.index(a.target)], dims[Q.vertices.index(a.source)])
        items.append((a.name, tuple(tuple(frac(x) for x in row) for row in m)))
    M = Rep(Q, tuple(dims), tuple(items))
    p = M.problems()
    if p:
        raise QuiverError(p)
    return M


def simple(Q: Quiver, v) -> Rep:
    return make_rep(Q, [int(w == v) for w in Q.vertices], {})


def constant_rep(Q: Quiver) -> Rep:
    return make_rep(Q, [1] * len(Q.vertices), {a.name: [[1]] for a in Q.arrows})


def random_rep(Q: Quiver, dims, rng: random.Random, lo: int = -2, hi: int = 2) -> Rep:
    maps = {}
    for a in Q.arrows:
        r, c = dims[Q.vertices.index(a.target)], dims[Q.vertices.index(a.source)]
        maps[a.name] = [[rng.randint(lo, hi) for _ in range(c)] for _ in range(r)]
    return make_rep(Q, dims, maps)


def _check_same(M: Rep, N: Rep):
    if M.quiver != N.quiver:
        raise QuiverError("representations of different quivers")


def hom_complex(M: Rep, N: Rep):
    """The matrix of phi -> (phi_t M_a - N_a phi_s), with block layouts."""
    _check_same(M, N)
    Q = M.quiver
    # variables: phi_v is N_v x M_v, flattened row-major
    var_off, off = {}, 0
    for v in Q.vertices:
        var_off[v] = off
        off += N.dim(v) * M.dim(v)
    nvars = off
    rows = []
    for a in Q.arrows:
        s, t = a.source, a.target
        Ma, Na = M.maps[a.name], N.maps[a.name]
        for i in range(N.dim(t)):
            for j in range(M.dim(s)):
                row = [Fraction(0)] * nvars
                # (phi_t M_a)_{ij} = sum_k phi_t[i][k] Ma[k][j]
                for k in range(M.dim(t)):
                    if Ma[k][j]:
                        row[var_off[t] + i * M.dim(t) + k] += Ma[k][j]
                # (N_a phi_s)_{ij} = sum_k Na[i][k] phi_s[k][j]
                for k in range(N.dim(s)):
                    if Na[i][k]:
                        row[var_off[s] + k * M.dim(s) + j] -= Na[i][k]
                rows.append(row)
    return rows, nvars, var_off


def hom_ext(M: Rep, N: Rep) -> Tuple[int, int]:
    rows, nvars, _ = hom_complex(M, N)
    r = rank(rows) if rows and nvars else 0
    return nvars - r, len(rows) - r


def hom_basis(M: Rep, N: Rep) -> List[Dict[int, Matrix]]:
    rows, nvars, var_off = hom_complex(M, N)
    Q = M.quiver
    vecs = kernel(rows, nvars) if rows else [[Fraction(int(i == j)) for i in range(nvars)] for j in range(nvars)]
    out = []
    for vec in vecs:
        phi = {}
        for v in Q.vertices:
            o, n, m = var_off[v], N.dim(v), M.dim(v)
            phi[v] = [[vec[o + i * m + k] for k in range(m)] for i in range(n)]
        out.append(phi)
    return out


def euler_form(Q: Quiver, d, e) -> int:
    if len(d) != len(Q.vertices) or len(e) != len(Q.vertices):
        raise QuiverError("dimension vectors must be indexed by the vertices")
    idx = {v: i for i, v in enumerate(Q.vertices)}
    return sum(x * y for x, y in zip(d, e)) - sum(d[idx[a.source]] * e[idx[a.target]] for a in Q.arrows)


def microlocal_stalk(M: Rep, arrow: str) -> Tuple[int, int]:
    """Cohomology (h^-1, h^0) of the cone of M_a: (dim ker, dim coker)."""
    a = M.quiver.arrow(arrow)
    m = M.maps[arrow]
    r = rank(m) if m and m[0] else 0
    return M.dim(a.source) - r, M.dim(a.target) - r


def singular_support(M: Rep) -> List:
    """Spokes whose microlocal stalk is nonzero."""
    return [a.spoke for a in M.quiver.arrows if microlocal_stalk(M, a.name) != (0, 0)]


# ---------------------------------------------------------------------------
# projectives

def paths(Q: Quiver, i, j, max_len: int = 32) -> List[Tuple[str, ...]]:
    """Paths from i to j as arrow-name tuples (acyclic quivers)."""
    if not Q.is_acyclic():
        raise QuiverError("path enumeration needs an acyclic quiver")
    out = []

    def go(v, acc):
        if v == j:
            out.append(tuple(acc))
        if len(acc) >= max_len:
            return
        for a in Q.arrows:
            if a.source == v:
                go(a.target, acc + [a.name])
    go(i, [])
    return out


def projective(Q: Quiver, i) -> Rep:
    """P_i: (P_i)_j has basis the paths i -> j."""
    bases = {j: paths(Q, i, j) for j in Q.vertices}
    dims = [len(bases[j]) for j in Q.vertices]
    maps = {}
    for a in Q.arrows:
        src, tgt = bases[a.source], bases[a.target]
        m = zeros(len(tgt), len(src))
        for c, p in enumerate(src):
            m[tgt.index(p + (a.name,))][c] = Fraction(1)
        maps[a.name] = m
    return make_rep(Q, dims, maps)


def hom_matrix(objs: Sequence[Rep]) -> List[List[int]]:
    return [[hom_ext(a, b)[0] for b in objs] for a in objs]


# ---------------------------------------------------------------------------
# reflection functors

def reflect_quiver(Q: Quiver, x) -> Quiver:
    arrows = tuple(Arrow(a.name, a.target, a.source, a.spoke) if x in (a.source, a.target) else a
                   for a in Q.arrows)
    return Quiver(Q.vertices, arrows, Q.cells)


def reflect_dims(Q: Quiver, x, d) -> List[int]:
    idx = {v: i for i, v in enumerate(Q.vertices)}
    out = list(d)
    nb = 0
    for a in Q.arrows:
        if a.source == x and a.target != x:
            nb += d[idx[a.target]]
        elif a.target == x and a.source != x:
            nb += d[idx[a.source]]
    out[idx[x]] = nb - d[idx[x]]
    return out


def bgp_reflect(Q: Quiver, x, M: Rep) -> Rep:
    if M.quiver != Q:
        raise QuiverError("representation is not over the given quiver")
    sink, source = Q.is_sink(x), Q.is_source(x)
    if not (sink or source):
        raise QuiverError(f"vertex {x!r} is neither a sink nor a source")
    if any(a.source == x and a.target == x for a in Q.arrows):
        raise QuiverError("cannot reflect at a vertex with a loop")
    Q2 = reflect_quiver(Q, x)
    inc = [a for a in Q.arrows if x in (a.source, a.target)]
    other = lambda a: a.source if a.target == x else a.target
    sizes = [M.dim(other(a)) for a in inc]
    total = sum(sizes)
    dims = list(M.dims)
    maps = {a.name: M.maps[a.name] for a in Q.arrows if a not in inc}
    ix = Q.vertices.index(x)
    if sink and inc:
        # h: (+) M_s -> M_x ; new M_x = ker h, with projections to each M_s
        h = [sum((M.maps[a.name][i] for a in inc), []) for i in range(M.dim(x))]
        K = kernel(h, total) if M.dim(x) else [[Fraction(int(i == j)) for i in range(total)] for j in range(total)]
        dims[ix] = len(K)
        off = 0
        for a, s in zip(inc, sizes):
            maps[a.name] = [[K[c][off + i] for c in range(len(K))] for i in range(s)]
            off += s
    elif source and inc:
        # h: M_x -> (+) M_t ; new M_x = coker h
        h = []
        for a in inc:
            h.extend(row[:] for row in M.maps[a.name])
        P = cokernel_projection(h if M.dim(x) else [[] for _ in range(total)], total)
        dims[ix] = len(P)
        off = 0
        for a, s in zip(inc, sizes):
            maps[a.name] = [[P[r][off + i] for i in range(s)] for r in range(len(P))]
            off += s
    else:
        dims[ix] = 0
    return make_rep(Q2, dims, maps)


# ---------------------------------------------------------------------------
# indecomposability

def end_dim(M: Rep) -> int:
    return hom_ext(M, M)[0]


def is_indecomposable(M: Rep, trials: int = 12, seed: int = 0) -> bool:
    """End dimension 1, or no Fitting splitting found among End elements.

    A nonzero, non-invertible power of (phi - lambda) for a rational
    eigenvalue lambda of an endomorphism phi splits M.  Basis elements and
    a few random combinations are tried; this is decisive for the small
    type-A cases used here.
    """
    if M.total_dim() == 0:
        return False
    basis = hom_basis(M, M)
    if len(basis) == 1:
        return True
    Q = M.quiver
    sizes = [M.dim(v) for v in Q.vertices]
    n = sum(sizes)
    rng = random.Random(seed)
    cands = list(basis)
    for _ in range(trials):
        coeffs = [rng.randint(-3, 3) for _ in basis]
        cands.append({v: [[sum(c * b[v][i][j] for c, b in zip(coeffs, basis)) for j in range(M.dim(v))]
                           for i in range(M.dim(v))] for v in Q.vertices})
    for phi in cands:
        Phi = block_diag([phi[v] for v in Q.vertices], sizes)
        for lam in rational_roots(charpoly(Phi)):
            A = [[Phi[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
            Ak = matpow(A, n)
            r = rank(Ak)
            if 0 < r < n:
                return False
    return True


def zero_one_reps(Q: Quiver, dims) -> List[Rep]:
    """All reps with the given 0/1 dimension vector and 0/1 scalar maps."""
    live = [a for a in Q.arrows if dims[Q.vertices.index(a.source)] and dims[Q.vertices.index(a.target)]]
    out = []
    for vals in product((0, 1), repeat=len(live)):
        out.append(make_rep(Q, dims, {a.name: [[v]] for a, v in zip(live, vals)}))
    return out


def indecomposables_01(Q: Quiver) -> List[Rep]:
    """Indecomposables among reps with 0/1 dimensions and 0/1 maps."""
    out = []
    for dims in product((0, 1), repeat=len(Q.vertices)):
        if not any(dims):
            continue
        for M in zero_one_reps(Q, dims):
            if end_dim(M) == 1:
                out.append(M)
    return out


def isomorphic(M: Rep, N: Rep) -> bool:
    """Brute check: some Hom element is invertible at every vertex (random combos)."""
    if M.dims != N.dims:
        return False
    basis = hom_basis(M, N)
    rng = random.Random(1)
    for _ in range(20):
        coeffs = [rng.randint(-5, 5) for _ in basis]
        ok = True
        for v in M.quiver.vertices:
            d = M.dim(v)
            m = [[sum(c * b[v][i][j] for c, b in zip(coeffs, basis)) for j in range(d)] for i in range(d)]
            if not is_invertible(m):
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# normal form

def normalize_spokes(L: ConicLagrangian) -> ConicLagrangian:
    """Canonical layout with the same numbers of upward and downward spokes.

    One point with both spokes (when both kinds occur), then the remaining
    downward spokes, then the remaining upward ones, one per point, at
    0, 1, 2, ... on a line or j/k on a circle.
    """
    up, down = L.counts()
    layout = []
    if up and down:
        layout.append([UP, DOWN])
        layout += [[DOWN]] * (down - 1) + [[UP]] * (up - 1)
    else:
        layout += [[DOWN]] * down + [[UP]] * up
    k = len(layout)
    pos = (lambda j: Fraction(j)) if L.base == LINE else (lambda j: Fraction(j, k))
    spokes = [(pos(j), d) for j, ds in enumerate(layout) for d in ds]
    return ConicLagrangian(L.base, tuple(spokes))


def wheel(a1: int, a2: int) -> ConicLagrangian:
    """Circle with a1 upward and a2 downward spokes, in normal form."""
    return normalize_spokes(lagrangian(CIRCLE, [(Fraction(j, a1 + 1), UP) for j in range(a1)] +
                                       [(Fraction(j, a2 + 1) + Fraction(1, 2 * (a2 + 1)), DOWN) for j in range(a2)]))
