"""Small exact integer linear algebra: ranks over Q and F_p, Hermite normal form."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


def int_rank(rows: Iterable[Sequence[int]], ncols: int | None = None) -> int:
    """Rank over Q of the integer vectors ``rows``.

    Incremental fraction-free elimination against an echelon basis; stops as
    soon as the rank reaches the column count.
    """
    basis: list[tuple[int, list[int]]] = []  # (pivot column, row)
    for r in rows:
        v = [int(x) for x in r]
        if ncols is None:
            ncols = len(v)
        for piv, b in basis:
            if v[piv]:
                f, g = b[piv], v[piv]
                v = [f * x - g * y for x, y in zip(v, b)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            continue
        from math import gcd

        g = 0
        for x in v:
            g = gcd(g, x)
        if g > 1:
            v = [x // g for x in v]
        basis.append((piv, v))
        if len(basis) == ncols:
            break
    return len(basis)


def rank_mod_p(rows: Iterable[Sequence[int]], p: int) -> int:
    """Rank over F_p."""
    basis: list[tuple[int, list[int]]] = []
    for r in rows:
        v = [int(x) % p for x in r]
        for piv, b in basis:
            c = v[piv]
            if c:
                v = [(x - c * y) % p for x, y in zip(v, b)]
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            continue
        inv = pow(v[piv], -1, p)
        v = [(x * inv) % p for x in v]
        basis.append((piv, v))
        if len(basis) == len(v):
            break
    return len(basis)


def hnf(rows: Iterable[Sequence[int]], ncols: int) -> tuple[tuple[int, ...], ...]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows, upper triangular with positive pivots and
    entries above each pivot reduced into ``[0, pivot)``.
    """
    m = [list(map(int, r)) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while m and col < ncols:
        nz = [r for r in m if r[col]]
        z = [r for r in m if not r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (rest if r[col] else z).append(r)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        m = [r for r in z if any(r)]
        col += 1
    for i in range(len(out)):
        pc = next(j for j, a in enumerate(out[i]) if a)
        for k in range(i):
            q = out[k][pc] // out[i][pc]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return tuple(tuple(r) for r in out)


def det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a small square integer matrix."""
    n = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            result = -result
        result *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    assert result.denominator == 1
    return int(result)


def as_int_array(vectors, width: int) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, width), dtype=np.int64)
    return arr.reshape(-1, width)


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Integer basis vectors of the right kernel ``{x : rows @ x = 0}``."""
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][f]
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in v])
    return out


def int_rank_array(points) -> int:
    """Exact rank over Q of the rows of an integer array.

    Alternates between picking a row outside the current span and a
    vectorised test of all remaining rows against an exact kernel basis,
    so the cost is a handful of matrix products rather than a Python loop
    over every row.
    """
    A = np.asarray(points)
    if A.ndim != 2 or A.shape[0] == 0:
        return 0
    n = A.shape[1]
    basis: list[list[int]] = []
    start = 0
    while len(basis) < n and start < A.shape[0]:
        N = integer_kernel(basis, n) if basis else [list(r) for r in np.eye(n, dtype=int)]
        Nm = np.array(N, dtype=object).T
        bound = int(np.abs(A[start:]).max()) * max(abs(x) for r in N for x in r) * n
        if bound < 2 ** 62:
            prod = A[start:].astype(np.int64) @ Nm.astype(np.int64)
        else:
            prod = A[start:].astype(object) @ Nm
        hit = np.nonzero((prod != 0).any(axis=1))[0]
        if hit.size == 0:
            break
        idx = start + int(hit[0])
        basis.append([int(x) for x in A[idx]])
        start = idx + 1
    return len(basis)
