"""Cyclic orders, joins, and G_n-unwindings.

A cyclic order is stored as a successor map R.  The ternary relation is
derived when needed: (x, y, z) holds iff, walking forward from x, we meet
y strictly before z.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple


def label_key(x):
    """Total order on the labels we use (ints, strings, tuples, None)."""
    if x is None:
        return (0,)
    if isinstance(x, bool):
        return (1, int(x))
    if isinstance(x, int):
        return (1, x)
    if isinstance(x, str):
        return (2, x)
    if isinstance(x, tuple):
        return (3, tuple(label_key(y) for y in x))
    return (4, repr(x))


class CyclicOrderError(ValueError):
    pass


@dataclass(frozen=True)
class CyclicOrder:
    succ_items: Tuple[Tuple[Hashable, Hashable], ...]

    def __post_init__(self):
        succ = dict(self.succ_items)
        if len(succ) != len(self.succ_items):
            raise CyclicOrderError("duplicate element in successor map")
        if set(succ.values()) != set(succ):
            raise CyclicOrderError("successor map is not a bijection")
        if succ:
            start = next(iter(succ))
            seen, x = {start}, succ[start]
            while x != start:
                seen.add(x)
                x = succ[x]
            if len(seen) != len(succ):
                raise CyclicOrderError("successor map is not a single cycle")
        # canonical form: sorted by element
        object.__setattr__(self, "succ_items", tuple(sorted(self.succ_items, key=lambda kv: label_key(kv[0]))))

    # -- basic access -------------------------------------------------
    @property
    def succ(self) -> Dict:
        return dict(self.succ_items)

    @property
    def elements(self) -> frozenset:
        return frozenset(k for k, _ in self.succ_items)

    def __len__(self):
        return len(self.succ_items)

    def __contains__(self, x):
        return x in self.succ

    def R(self, x):
        return self.succ[x]

    def pred(self, x):
        for k, v in self.succ_items:
            if v == x:
                return k
        raise KeyError(x)

    def as_list(self, start=None) -> List:
        """Elements in order, starting from ``start`` (default: least label)."""
        if not self.succ_items:
            return []
        s = self.succ
        if start is None:
            start = min(s, key=label_key)
        out, x = [start], s[start]
        while x != start:
            out.append(x)
            x = s[x]
        return out

    def __repr__(self):
        return f"CyclicOrder({self.as_list()!r})"

    # -- derived relation --------------------------------------------
    def position(self, start) -> Dict:
        return {x: i for i, x in enumerate(self.as_list(start))}

    def holds(self, x, y, z) -> bool:
        """(x, y, z) in the ternary relation."""
        if len({x, y, z}) < 3:
            return False
        pos = self.position(x)
        return pos[y] < pos[z]

    def relation(self) -> set:
        els = self.as_list()
        out = set()
        for x in els:
            pos = self.position(x)
            for y in els:
                for z in els:
                    if len({x, y, z}) == 3 and pos[y] < pos[z]:
                        out.add((x, y, z))
        return out

    def minimal_pairs(self) -> set:
        if len(self) < 2:
            return set()
        return {(x, y) for x, y in self.succ_items}

    def relabel(self, mapping) -> "CyclicOrder":
        return CyclicOrder(tuple((mapping.get(a, a), mapping.get(b, b)) for a, b in self.succ_items))


def cyclic_from_list(labels: Sequence) -> CyclicOrder:
    labels = list(labels)
    if not labels:
        raise CyclicOrderError("empty cyclic order")
    seen = set()
    for x in labels:
        if x in seen:
            raise CyclicOrderError(f"duplicate label {x!r}")
        seen.add(x)
    n = len(labels)
    return CyclicOrder(tuple((labels[i], labels[(i + 1) % n]) for i in range(n)))


def check_axioms(rel: set, elements: Iterable) -> List[str]:
    """Check the four cyclic-order axioms for an explicit ternary relation."""
    els = list(elements)
    bad = []
    for (x, y, z) in rel:
        if (y, z, x) not in rel:
            bad.append(f"cyclicity fails at {(x, y, z)}")
        if y == z or x == y or x == z:
            bad.append(f"degenerate triple {(x, y, z)}")
    for x in els:
        for y in els:
            for z in els:
                if len({x, y, z}) == 3 and ((x, y, z) in rel) == ((x, z, y) in rel):
                    bad.append(f"totality fails at {(x, y, z)}")
    # transitivity, read with a common first point: (x,y,z), (x,z,w) => (x,y,w), (y,z,w)
    for (x, y, z) in rel:
        for w in els:
            if (x, z, w) in rel and ((x, y, w) not in rel or (y, z, w) not in rel):
                bad.append(f"transitivity fails at {(x, y, z, w)}")
    return bad


def induced_order(C: CyclicOrder, S: Iterable) -> CyclicOrder:
    S = set(S)
    if not S:
        raise CyclicOrderError("induced order on an empty subset")
    missing = S - C.elements
    if missing:
        raise CyclicOrderError(f"not elements of the order: {sorted(missing, key=label_key)!r}")
    succ = C.succ
    items = []
    for s in S:
        x = succ[s]
        while x not in S:
            x = succ[x]
        items.append((s, x))
    return CyclicOrder(tuple(items))


def noninterlacing(C: CyclicOrder, A: Iterable, B: Iterable) -> bool:
    A, B = list(set(A)), list(set(B))
    for x1 in A:
        for y1 in A:
            for x2 in B:
                for y2 in B:
                    quad = {x1, y1, x2, y2}
                    if len(quad) < 4:
                        continue
                    mp = induced_order(C, quad).minimal_pairs()
                    if (x1, y1) not in mp and (y1, x1) not in mp:
                        return False
    return True


def join(C1: CyclicOrder, p, C2: CyclicOrder, q) -> CyclicOrder:
    """Join of C1 and C2 along p and q."""
    if p not in C1 or q not in C2:
        raise CyclicOrderError("join points must belong to their orders")
    a = [x for x in C1.as_list(p) if x != p]
    b = [x for x in C2.as_list(q) if x != q]
    clash = set(a) & set(b)
    if clash:
        raise CyclicOrderError(f"label collision in join: {sorted(clash, key=label_key)!r}")
    if not a and not b:
        raise CyclicOrderError("join of two singletons is empty")
    return cyclic_from_list(a + b)


def all_cyclic_orders(labels: Sequence) -> List[CyclicOrder]:
    labels = list(labels)
    if not labels:
        return []
    first, rest = labels[0], labels[1:]
    return [cyclic_from_list([first, *p]) for p in permutations(rest)]


# ---------------------------------------------------------------------------
# Unwindings.
#
# The G_n-torsor is infinite; we model it as pairs (c, level) with
#   S(c, l) = (c, l + 1)
#   R(c, l) = (succ c, l + delta[c])
# sigma(c, l) = (l + parity[c]) mod 2.  The relation R^n = S^2 forces
# sum(delta) = 2, and sigma-equivariance of R forces
# parity[succ c] + delta[c] = parity[c] (mod 2).


@dataclass(frozen=True)
class Unwinding:
    base: CyclicOrder
    delta_items: Tuple[Tuple[Hashable, int], ...]
    parity_items: Tuple[Tuple[Hashable, int], ...] = ()

    def __post_init__(self):
        d = dict(self.delta_items)
        par = dict(self.parity_items) if self.parity_items else {c: 0 for c in d}
        object.__setattr__(self, "delta_items", tuple(sorted(d.items(), key=lambda kv: label_key(kv[0]))))
        object.__setattr__(self, "parity_items", tuple(sorted(((c, p % 2) for c, p in par.items()), key=lambda kv: label_key(kv[0]))))

    @property
    def delta(self) -> Dict:
        return dict(self.delta_items)

    @property
    def parity(self) -> Dict:
        return dict(self.parity_items)

    @property
    def n(self) -> int:
        return len(self.base)

    # the group actions
    def actR(self, x, k: int = 1):
        c, l = x
        succ, d = self.base.succ, self.delta
        if k >= 0:
            for _ in range(k):
                c, l = succ[c], l + d[c]
        else:
            for _ in range(-k):
                c = self.base.pred(c)
                l -= d[c]
        return (c, l)

    def actS(self, x, k: int = 1):
        return (x[0], x[1] + k)

    def rho(self, x):
        return x[0]

    def sigma(self, x) -> int:
        return (x[1] + self.parity[x[0]]) % 2

    def act(self, word: str, x):
        """Apply a word in R, S, r (=R^-1), s (=S^-1); rightmost letter first."""
        for ch in reversed(word):
            if ch == "R":
                x = self.actR(x)
            elif ch == "r":
                x = self.actR(x, -1)
            elif ch == "S":
                x = self.actS(x)
            elif ch == "s":
                x = self.actS(x, -1)
            else:
                raise ValueError(f"bad letter {ch!r} in word")
        return x

    def window(self, lo: int = -2, hi: int = 2):
        return [(c, l) for c in self.base.as_list() for l in range(lo, hi + 1)]

    def validate(self, lo: int = -3, hi: int = 3) -> List[str]:
        problems = []
        d, par = self.delta, self.parity
        if set(d) != self.base.elements or set(par) != self.base.elements:
            problems.append("delta/parity not defined on exactly the base")
            return problems
        if sum(d.values()) != 2:
            problems.append(f"R^n != S^2: total delta is {sum(d.values())}")
        for x in self.window(lo, hi):
            if self.actR(self.actS(x)) != self.actS(self.actR(x)):
                problems.append(f"R and S do not commute at {x}")
            if self.actR(x, self.n) != self.actS(x, 2):
                problems.append(f"R^n != S^2 at {x}")
            if self.rho(self.actR(x)) != self.base.R(self.rho(x)) or self.rho(self.actS(x)) != self.rho(x):
                problems.append(f"rho not equivariant at {x}")
            if self.sigma(self.actR(x)) != self.sigma(x) or self.sigma(self.actS(x)) == self.sigma(x):
                problems.append(f"sigma not equivariant at {x}")
        return problems

    def is_free_transitive(self, lo: int = -3, hi: int = 3) -> bool:
        """Every window element is R^k S^m of a base point for a unique (k mod n, m)."""
        base_pt = (self.base.as_list()[0], 0)
        n = self.n
        seen = {}
        for k in range(n):
            y = self.actR(base_pt, k)
            for m in range(2 * lo - 2, 2 * hi + 3):
                z = self.actS(y, m)
                if z in seen:
                    return False
                seen[z] = (k, m)
        return all(x in seen for x in self.window(lo, hi))


def standard_unwinding(C: CyclicOrder, base=None) -> Unwinding:
    """The unwinding in which the whole jump of 2 sits on the arrow into ``base``."""
    els = C.as_list(base)
    d = {c: 0 for c in els}
    d[els[-1]] += 2
    return Unwinding(C, tuple(d.items()))


COMPASS = cyclic_from_list(["E", "N", "W", "S"])


def compass_unwinding() -> Unwinding:
    """G_4 -> Z/4 with E <-> 0: the fiber over N, W, S is R S^n, R^2 S^n, R^3 S^n."""
    return standard_unwinding(COMPASS, "E")


def unwinding_act(U: Unwinding, word: str, x):
    return U.act(word, x)


def induced_unwinding(U: Unwinding, S: Iterable) -> Unwinding:
    S = set(S)
    if not S:
        raise CyclicOrderError("induced unwinding on an empty subset")
    sub = induced_order(U.base, S)
    d, succ = U.delta, U.base.succ
    nd = {}
    for s in S:
        total, x = d[s], succ[s]
        while x not in S:
            total += d[x]
            x = succ[x]
        nd[s] = total
    par = U.parity
    return Unwinding(sub, tuple(nd.items()), tuple((s, par[s]) for s in S))
