"""Balloon chains and rings: line-bundle Homs, nodal gluing, and the
Beilinson-Bondal comparison.

A balloon with indices (p, q) is the weighted projective line whose
line-bundle lattice is Z^2 / <(p, -q)>, with generators x1 (order p at the
point X1 = 0) and x2 (order q at the point X2 = 0), and c = p x1 = q x2.
Sections of O(m x1 + n x2) are the monomials X1^i X2^j with
(i, j) = (m + k p, n - k q), k in Z, i, j >= 0.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Matrix, identity, inverse, is_invertible, matmul, rank, zeros
from .quiver import (Quiver, hom_ext, microlocal_stalk, projective, quiver_from_lagrangian, wheel)

PATH, CYCLE = "path", "cycle"
DEFAULT_TRUNCATION = 25


class MirrorError(ValueError):
    pass


def truncation(value: Optional[int] = None) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("RGK_TRUNCATION")
    return int(env) if env else DEFAULT_TRUNCATION


# ---------------------------------------------------------------------------
# a single balloon

Twist = Tuple[int, int]  # (m, n) = m x1 + n x2


def parse_twist(p: int, q: int, label) -> Twist:
    """'O' -> 0, 'O(k)' -> k c, 'O(m,n)' -> m x1 + n x2; tuples pass through."""
    if isinstance(label, tuple):
        return (int(label[0]), int(label[1]))
    s = str(label).replace(" ", "")
    if s == "O":
        return (0, 0)
    m = re.fullmatch(r"O\((-?\d+)\)", s)
    if m:
        return (int(m.group(1)) * p, 0)
    m = re.fullmatch(r"O\((-?\d+),(-?\d+)\)", s)
    if m:
        return (int(m.group(1)), int(m.group(2)))
    raise MirrorError(f"line-bundle label {label!r} is not in the twist lattice")


def sections(p: int, q: int, z: Twist) -> List[Tuple[int, int]]:
    """Monomial exponents (i, j) spanning the sections of O(z)."""
    m, n = z
    # i = m + k p >= 0 and j = n - k q >= 0
    kmin = -(m // p)  # smallest k with m + k p >= 0
    kmax = n // q      # largest k with n - k q >= 0
    return [(m + k * p, n - k * q) for k in range(kmin, kmax + 1)]


def section_dim(p: int, q: int, z: Twist) -> int:
    return len(sections(p, q, z))


def omega(p: int, q: int) -> Twist:
    return (-1, -1)


def _check_indices(p, q):
    if p < 1 or q < 1:
        raise MirrorError("balloon indices must be positive")


def balloon_hom(p: int, q: int, L, M) -> int:
    """dim Hom(L, M) on the balloon with indices (p, q)."""
    _check_indices(p, q)
    x, y = parse_twist(p, q, L), parse_twist(p, q, M)
    return section_dim(p, q, (y[0] - x[0], y[1] - x[1]))


def balloon_ext1(p: int, q: int, L, M) -> int:
    """dim Ext^1(L, M) = dim Hom(M, L + omega) by Serre duality."""
    _check_indices(p, q)
    x, y = parse_twist(p, q, L), parse_twist(p, q, M)
    w = omega(p, q)
    return section_dim(p, q, (x[0] - y[0] + w[0], x[1] - y[1] + w[1]))


def character(p: int, q: int, z: Twist, point: int) -> int:
    """Isotropy character of O(z) at the order-p point (0) or order-q point (1)."""
    return z[0] % p if point == 0 else z[1] % q


def restriction_index(p: int, q: int, z: Twist, point: int) -> Optional[int]:
    """Position in ``sections`` of the monomial surviving at the given point."""
    for k, (i, j) in enumerate(sections(p, q, z)):
        if (point == 0 and i == 0) or (point == 1 and j == 0):
            return k
    return None


def tilting_twists(p: int, q: int) -> List[Twist]:
    return [(0, 0)] + [(i, 0) for i in range(1, p)] + [(0, j) for j in range(1, q)] + [(p, 0)]


# ---------------------------------------------------------------------------
# the node

def nodal_end_ring(d: int) -> int:
    """dim of the degree <= d part of {(f, g) in k[x] x k[y] : f(0) = g(0)}."""
    if d < 0:
        raise MirrorError("truncation degree must be non-negative")
    # coordinates: f_0..f_d, g_0..g_d; one condition f_0 - g_0 = 0
    n = 2 * (d + 1)
    row = [Fraction(0)] * n
    row[0], row[d + 1] = Fraction(1), Fraction(-1)
    return n - rank([row])


# ---------------------------------------------------------------------------
# chains and rings

@dataclass(frozen=True)
class BalloonShape:
    indices: Tuple[int, ...]
    shape: str

    def __post_init__(self):
        if self.shape not in (PATH, CYCLE):
            raise MirrorError(f"shape must be {PATH!r} or {CYCLE!r}")
        if any(a < 1 for a in self.indices):
            raise MirrorError("indices must be positive")
        if len(self.indices) < 2:
            raise MirrorError("a chain or ring needs at least two indices")

    @property
    def balloons(self) -> List[Tuple[int, int]]:
        a = self.indices
        if self.shape == PATH:
            return [(a[i - 1], a[i]) for i in range(1, len(a))]
        n = len(a)
        return [(a[i - 1], a[i]) for i in range(n)]

    @property
    def nodes(self) -> List[Tuple[int, int]]:
        """(i, j): the order-q point of balloon i meets the order-p point of balloon j."""
        nb = len(self.balloons)
        if self.shape == PATH:
            return [(i, i + 1) for i in range(nb - 1)]
        return [(i, (i + 1) % nb) for i in range(nb)]


def chain(*indices) -> BalloonShape:
    return BalloonShape(tuple(indices), PATH)


def ring(*indices) -> BalloonShape:
    return BalloonShape(tuple(indices), CYCLE)


@dataclass(frozen=True)
class DescentComplex:
    """Per balloon a list of terms (twist, degree) with zero differential;
    per node and degree a gluing matrix between the fibres.

    The fibre of balloon i at a node, in degree d, has a basis indexed by
    the terms of that degree.  ``glue[(node, d)]`` maps the fibre on the
    left balloon to the fibre on the right one.
    """
    shape: BalloonShape
    terms: Tuple[Tuple[Tuple[Twist, int], ...], ...]
    glue_items: Tuple[Tuple[Tuple[int, int], Tuple[Tuple[Fraction, ...], ...]], ...] = ()

    @property
    def glue(self) -> Dict[Tuple[int, int], Matrix]:
        return {k: [list(r) for r in m] for k, m in self.glue_items}

    def fibre_terms(self, b: int, d: int) -> List[int]:
        return [k for k, (_, deg) in enumerate(self.terms[b]) if deg == d]

    def degrees(self) -> List[int]:
        return sorted({deg for ts in self.terms for _, deg in ts})

    def problems(self) -> List[str]:
        out = []
        S = self.shape
        if len(self.terms) != len(S.balloons):
            return ["one term list per balloon is required"]
        g = self.glue
        for nu, (i, j) in enumerate(S.nodes):
            a = S.balloons[i][1]
            for d in self.degrees():
                left, right = self.fibre_terms(i, d), self.fibre_terms(j, d)
                m = g.get((nu, d))
                if m is None:
                    if left or right:
                        out.append(f"node {nu}: missing gluing in degree {d}")
                    continue
                if len(m) != len(right) or any(len(r) != len(left) for r in m) or not is_invertible(m):
                    out.append(f"node {nu}: gluing in degree {d} is not an invertible square matrix")
                    continue
                # equivariance: the two branches carry inverse actions
                for r, t in enumerate(right):
                    for c, s in enumerate(left):
                        if m[r][c] and (character(*S.balloons[i], self.terms[i][s][0], 1)
                                        + character(*S.balloons[j], self.terms[j][t][0], 0)) % a:
                            out.append(f"node {nu}: gluing in degree {d} is not equivariant")
        return out


def make_descent(S: BalloonShape, terms, glue: Optional[Dict] = None) -> DescentComplex:
    terms = tuple(tuple((tuple(z), int(d)) for z, d in ts) for ts in terms)
    glue = glue or {}
    items = tuple(sorted((k, tuple(tuple(Fraction(x) for x in r) for r in m)) for k, m in glue.items()))
    D = DescentComplex(S, terms, items)
    p = D.problems()
    if p:
        raise MirrorError(p)
    return D


def structure_sheaf(S: BalloonShape) -> DescentComplex:
    terms = [[((0, 0), 0)] for _ in S.balloons]
    glue = {(nu, 0): [[1]] for nu in range(len(S.nodes))}
    return make_descent(S, terms, glue)


def zero_object(S: BalloonShape) -> DescentComplex:
    return make_descent(S, [[] for _ in S.balloons], {})


def shift(D: DescentComplex, k: int = 1) -> DescentComplex:
    """D[k]: every term moves down k degrees."""
    terms = [[(z, d - k) for z, d in ts] for ts in D.terms]
    glue = {(nu, d - k): m for (nu, d), m in D.glue.items()}
    return make_descent(D.shape, terms, glue)


def direct_sum(D: DescentComplex, E: DescentComplex) -> DescentComplex:
    if D.shape != E.shape:
        raise MirrorError("shape mismatch")
    terms = [list(a) + list(b) for a, b in zip(D.terms, E.terms)]
    glue = {}
    S = D.shape
    gd, ge = D.glue, E.glue
    for nu, (i, j) in enumerate(S.nodes):
        for d in sorted(set(D.degrees()) | set(E.degrees())):
            a, b = gd.get((nu, d), []), ge.get((nu, d), [])
            ra, ca = len(D.fibre_terms(j, d)), len(D.fibre_terms(i, d))
            rb, cb = len(E.fibre_terms(j, d)), len(E.fibre_terms(i, d))
            if ra + rb == 0 and ca + cb == 0:
                continue
            # fibre order follows term order: D's terms come first
            m = zeros(ra + rb, ca + cb)
            for r in range(ra):
                for c in range(ca):
                    m[r][c] = a[r][c]
            for r in range(rb):
                for c in range(cb):
                    m[ra + r][ca + c] = b[r][c]
            glue[(nu, d)] = m
    return make_descent(S, terms, glue)


def perf_hom(S: BalloonShape, E: DescentComplex, F: DescentComplex) -> Dict[int, int]:
    """Graded dimensions of Hom(E, F) as the fibre of balloon Homs -> node Homs."""
    if E.shape != S or F.shape != S:
        raise MirrorError("shape mismatch")
    degs = set()
    # per degree k: A^k = balloon Homs of degree k; B^k = node fibre Homs of degree k
    A: Dict[int, List] = {}
    B: Dict[int, List] = {}
    for b, (p, q) in enumerate(S.balloons):
        for s, (x, ds) in enumerate(E.terms[b]):
            for t, (y, dt) in enumerate(F.terms[b]):
                k0 = dt - ds  # Hom^k0 = Hom(O(x), O(y)); Hom^{k0+1} = Ext^1
                z = (y[0] - x[0], y[1] - x[1])
                for kk, mono in enumerate(sections(p, q, z)):
                    A.setdefault(k0, []).append((b, s, t, kk, z))
                w = omega(p, q)
                e1 = section_dim(p, q, (x[0] - y[0] + w[0], x[1] - y[1] + w[1]))
                for kk in range(e1):
                    A.setdefault(k0 + 1, []).append((b, s, t, -1 - kk, None))
    for nu, (i, j) in enumerate(S.nodes):
        a = S.balloons[i][1]
        for s, (x, ds) in enumerate(E.terms[i]):
            for t, (y, dt) in enumerate(F.terms[j]):
                if (character(*S.balloons[i], x, 1) + character(*S.balloons[j], y, 0)) % a == 0:
                    B.setdefault(dt - ds, []).append((nu, s, t))
    ge, gf = E.glue, F.glue
    out = {}
    # differential A^k -> B^k (restriction difference); A^{k} has no other differential
    ranks = {}
    for k in set(A) | set(B):
        rows = B.get(k, [])
        cols = [c for c in A.get(k, []) if c[4] is not None]
        if not rows or not cols:
            ranks[k] = 0
            continue
        ridx = {r: n for n, r in enumerate(rows)}
        M = zeros(len(rows), len(cols))
        for cn, (b, s, t, kk, z) in enumerate(cols):
            p, q = S.balloons[b]
            for nu, (i, j) in enumerate(S.nodes):
                if b == i:
                    # left side: gF . r_i(phi); phi has one entry (t <- s)
                    if restriction_index(p, q, z, 1) != kk:
                        continue
                    dt = F.terms[i][t][1]
                    ds = E.terms[i][s][1]
                    g = gf.get((nu, dt))
                    rt = F.fibre_terms(j, dt)
                    lt = F.fibre_terms(i, dt)
                    for r_pos, tt in enumerate(rt):
                        coef = g[r_pos][lt.index(t)]
                        if coef and (nu, s, tt) in ridx:
                            M[ridx[(nu, s, tt)]][cn] += coef
                if b == j:
                    # right side: - r_j(phi) . gE
                    if restriction_index(p, q, z, 0) != kk:
                        continue
                    ds = E.terms[j][s][1]
                    g = ge.get((nu, ds))
                    rs = E.fibre_terms(j, ds)
                    ls = E.fibre_terms(i, ds)
                    for c_pos, ss in enumerate(ls):
                        coef = g[rs.index(s)][c_pos]
                        if coef and (nu, ss, t) in ridx:
                            M[ridx[(nu, ss, t)]][cn] -= coef
        ranks[k] = rank(M)
    for k in sorted(set(A) | {k + 1 for k in B}):
        nA = len(A.get(k, []))
        # h^k = dim A^k - rank(A^k -> B^k) + dim B^{k-1} - rank(A^{k-1} -> B^{k-1})
        h = nA - ranks.get(k, 0) + len(B.get(k - 1, [])) - ranks.get(k - 1, 0)
        if h:
            out[k] = h
    return out


def hom_pair(d: Dict[int, int]) -> Tuple[int, int]:
    return d.get(0, 0), d.get(1, 0)


def cech_oracle(S: BalloonShape) -> Tuple[int, int]:
    """H^0, H^1 of O on a chain/ring, by the nerve complex k^balloons -> k^nodes."""
    nb, nn = len(S.balloons), len(S.nodes)
    M = zeros(nn, nb)
    for nu, (i, j) in enumerate(S.nodes):
        M[nu][i] += 1
        M[nu][j] -= 1
    r = rank(M) if nn else 0
    # each balloon has H^0(O) = 1 and H^1(O) = 0
    return nb - r, nn - r


# ---------------------------------------------------------------------------
# Beilinson-Bondal

@dataclass
class BBReport:
    a1: int
    a2: int
    quiver_hom: List[List[int]]
    balloon_hom: List[List[int]]
    quiver_ext_free: bool
    balloon_ext_free: bool
    permutation: Optional[Tuple[int, ...]]
    stalks_match: bool
    passed: bool
    mismatch: str = ""

    def as_dict(self) -> dict:
        return {"indices": [self.a1, self.a2], "quiver_hom": self.quiver_hom,
                "balloon_hom": self.balloon_hom, "permutation": list(self.permutation or []),
                "stalks_match": self.stalks_match, "passed": self.passed, "mismatch": self.mismatch}


def quiver_side(a1: int, a2: int):
    """Projectives of the wheel quiver, their Hom/Ext matrices, and the stalk partition.

    The partition groups projectives by the upward (resp. downward) spoke
    carrying their microlocal stalk.
    """
    L = wheel(a1, a2)
    Q = quiver_from_lagrangian(L)
    P = [projective(Q, v) for v in Q.vertices]
    H = [[hom_ext(x, y)[0] for y in P] for x in P]
    E = [[hom_ext(x, y)[1] for y in P] for x in P]
    parts = {}
    for side in ("up", "down"):
        key = []
        for M in P:
            live = tuple(a.name for a in Q.arrows if a.spoke[1] == side and sum(microlocal_stalk(M, a.name)))
            key.append(live)
        parts[side] = key
    return P, H, E, parts


def balloon_side(p: int, q: int):
    T = tilting_twists(p, q)
    H = [[section_dim(p, q, (y[0] - x[0], y[1] - x[1])) for y in T] for x in T]
    E = [[balloon_ext1(p, q, x, y) for y in T] for x in T]
    parts = {"up": [character(p, q, x, 0) for x in T], "down": [character(p, q, x, 1) for x in T]}
    return T, H, E, parts


def _same_partition(a: Sequence, b: Sequence) -> bool:
    n = len(a)
    return all((a[i] == a[j]) == (b[i] == b[j]) for i in range(n) for j in range(n))


def compare(quiver_data, balloon_data, a1: int, a2: int) -> BBReport:
    _, HQ, EQ, PQ = quiver_data
    _, HB, EB, PB = balloon_data
    qfree = all(x == 0 for row in EQ for x in row)
    bfree = all(x == 0 for row in EB for x in row)
    rep = BBReport(a1, a2, HQ, HB, qfree, bfree, None, False, False)
    if len(HQ) != len(HB):
        rep.mismatch = f"collection sizes differ: {len(HQ)} projectives vs {len(HB)} line bundles"
        return rep
    n = len(HQ)
    found = None
    for perm in permutations(range(n)):
        if all(HQ[i][j] == HB[perm[i]][perm[j]] for i in range(n) for j in range(n)):
            ok = all(_same_partition(PQ[s], [PB[s][perm[i]] for i in range(n)]) for s in ("up", "down"))
            if found is None:
                found = (perm, ok)
            if ok:
                found = (perm, ok)
                break
    if found is None:
        rep.mismatch = "no simultaneous permutation matches the Hom matrices"
        return rep
    rep.permutation, rep.stalks_match = found
    rep.passed = qfree and bfree and rep.stalks_match
    if not qfree or not bfree:
        rep.mismatch = "a collection has nonzero Ext^1"
    elif not rep.stalks_match:
        rep.mismatch = "stalk partition disagrees with isotropy characters"
    return rep


def bb_compare(a1: int, a2: int, against: Optional[Tuple[int, int]] = None) -> BBReport:
    """Wheel with a1 up / a2 down spokes against the balloon (a1, a2) (or ``against``)."""
    p, q = against if against is not None else (a1, a2)
    return compare(quiver_side(a1, a2), balloon_side(p, q), a1, a2)
