"""Exact linear algebra over the rationals.

Matrices are lists of rows of ``Fraction``.  Everything here is small
(desk scale), so plain Gaussian elimination is fine.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def matrix(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    m = [[frac(x) for x in row] for row in rows]
    if ncols is not None and not m:
        return []
    return m


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def shape(m: Matrix, ncols: int = 0):
    return (len(m), len(m[0]) if m else ncols)


def matmul(a: Matrix, b: Matrix, inner: int | None = None, ncols: int | None = None) -> Matrix:
    """a (r x k) times b (k x c).

    Empty matrices lose their column count, so callers with zero-sized
    factors pass ``ncols`` explicitly.
    """
    r = len(a)
    k = len(b) if inner is None else inner
    c = (len(b[0]) if b else 0) if ncols is None else ncols
    out = zeros(r, c)
    for i in range(r):
        ai = a[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                row = out[i]
                for j in range(c):
                    if bt[j]:
                        row[j] += x * bt[j]
    return out


def transpose(m: Matrix, ncols: int = 0) -> Matrix:
    r, c = shape(m, ncols)
    return [[m[i][j] for i in range(r)] for j in range(c)]


def rref(m: Matrix):
    """Reduced row echelon form and pivot columns."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1]) if m and m[0] else 0


def kernel(m: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of the right kernel, as a list of column vectors (each a list)."""
    cols = (len(m[0]) if m else 0) if ncols is None else ncols
    if not m:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    a, piv = rref(m)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -a[i][f]
        basis.append(v)
    return basis


def column_space(m: Matrix, nrows: int | None = None) -> Matrix:
    """Basis (list of column vectors) of the image of m."""
    if not m or not m[0]:
        return []
    _, piv = rref(m)
    return [[m[i][c] for i in range(len(m))] for c in piv]


def complement_basis(vectors: Matrix, dim: int) -> Matrix:
    """Standard basis vectors completing span(vectors) to the whole space."""
    chosen = [v[:] for v in vectors]
    out = []
    for i in range(dim):
        e = [Fraction(int(i == j)) for j in range(dim)]
        trial = chosen + [e]
        if rank(trial) == len(trial):
            chosen.append(e)
            out.append(e)
    return out


def solve(a: Matrix, b: List[Fraction]):
    """One solution x of a x = b, or None."""
    cols = len(a[0]) if a else 0
    aug = [row[:] + [bi] for row, bi in zip(a, b)]
    r, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, p in enumerate(piv):
        x[p] = r[i][cols]
    return x


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [row[:] + e for row, e in zip(m, identity(n))]
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in r]


def is_invertible(m: Matrix) -> bool:
    n = len(m)
    if any(len(row) != n for row in m):
        return False
    return n == 0 or rank(m) == n


def fmt(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cokernel_projection(m: Matrix, nrows: int) -> Matrix:
    """A surjection Q from the target of m (nrows-dim) onto coker m, with Q m = 0."""
    img = column_space(m) if m and m[0] else []
    comp = complement_basis(img, nrows)
    if not comp:
        return []
    basis = img + comp  # as columns
    P = inverse(transpose(basis, nrows))
    return P[len(img):]


def charpoly(m: Matrix) -> List[Fraction]:
    """Coefficients c_0..c_n of det(t I - m), by Faddeev-LeVerrier."""
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = zeros(n, n)
    I = identity(n)
    for k in range(1, n + 1):
        Mk = matmul(m, Mk, n, n)
        for i in range(n):
            Mk[i][i] += coeffs[n - k + 1]
        AM = matmul(m, Mk, n, n)
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def rational_roots(coeffs: List[Fraction]) -> List[Fraction]:
    """Distinct rational roots of sum c_i t^i."""
    from math import gcd
    cs = list(coeffs)
    roots = set()
    while cs and cs[0] == 0:
        roots.add(Fraction(0))
        cs = cs[1:]
    if len(cs) <= 1:
        return sorted(roots)
    den = 1
    for c in cs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in cs]
    a0, an = abs(ints[0]), abs(ints[-1])
    divs = lambda x: [d for d in range(1, x + 1) if x % d == 0]
    for p in divs(a0):
        for q in divs(an):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if sum(c * r ** i for i, c in enumerate(cs)) == 0:
                    roots.add(r)
    return sorted(roots)


def matpow(m: Matrix, k: int) -> Matrix:
    n = len(m)
    out = identity(n)
    for _ in range(k):
        out = matmul(out, m, n, n)
    return out


def block_diag(blocks: List[Matrix], sizes: List[int]) -> Matrix:
    n = sum(sizes)
    out = zeros(n, n)
    off = 0
    for b, s in zip(blocks, sizes):
        for i in range(s):
            for j in range(s):
                out[off + i][off + j] = b[i][j]
        off += s
    return out
