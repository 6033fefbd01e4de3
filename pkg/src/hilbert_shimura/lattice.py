"""Integer lattices: Hermite normal form, exact LLL, and short-vector enumeration.

Short vectors are found by Fincke-Pohst over an exact rational LDL^T
decomposition; no floating point decides membership. A float estimate is used
only to seed each integer range, which is then corrected by exact tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, floor, isqrt, lcm
from typing import Iterator, Sequence

import numpy as np

from . import _linalg
from .errors import NotPositiveDefinite


@dataclass(frozen=True)
class IntegerLattice:
    """Row lattice spanned by ``basis`` / ``den``; ``basis`` is in HNF."""

    basis: tuple[tuple[int, ...], ...]
    den: int = 1

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    def rows(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in r] for r in self.basis]

    def contains(self, v: Sequence) -> bool:
        sol = _linalg.solve_left(self.rows(), v)
        return sol is not None and all(c.denominator == 1 for c in sol)

    def coordinates(self, v: Sequence) -> list[int]:
        sol = _linalg.solve_left(self.rows(), v)
        if sol is None or any(c.denominator != 1 for c in sol):
            raise ValueError("vector not in lattice")
        return [int(c) for c in sol]

    def covolume(self) -> Fraction:
        """|det| of the basis (full rank lattices only)."""
        return abs(_linalg.det(self.basis)) / Fraction(self.den) ** self.rank

    def to_json(self) -> dict:
        return {"basis": [[str(x) for x in r] for r in self.basis], "den": str(self.den)}


def hnf_basis(generators: Sequence[Sequence]) -> IntegerLattice:
    """Canonical HNF basis of the Z-span of (possibly rational) generators."""
    basis, den = _linalg.rational_hnf(generators)
    return IntegerLattice(tuple(tuple(r) for r in basis), den)


class GramForm:
    """Positive definite symmetric matrix with exact entries."""

    def __init__(self, G: Sequence[Sequence]):
        self.G = [[Fraction(x) for x in r] for r in G]
        n = len(self.G)
        for i in range(n):
            for j in range(n):
                if self.G[i][j] != self.G[j][i]:
                    raise ValueError("Gram matrix is not symmetric")
        for k in range(1, n + 1):
            if _linalg.det([r[:k] for r in self.G[:k]]) <= 0:
                raise NotPositiveDefinite("leading principal minor is not positive")

    @property
    def n(self) -> int:
        return len(self.G)

    def value(self, v: Sequence[int]) -> Fraction:
        G = self.G
        return sum(v[i] * G[i][j] * v[j] for i in range(len(v)) for j in range(len(v)) if v[i] and v[j])

    def transform(self, U: Sequence[Sequence[int]]) -> "GramForm":
        return GramForm(_linalg.matmul(_linalg.matmul(U, self.G), _linalg.transpose(U)))


def _as_gram(G) -> GramForm:
    return G if isinstance(G, GramForm) else GramForm(G)


# -- LLL ---------------------------------------------------------------------


def _integral_lll(gram: list[list[int]], n: int):
    """Integral LLL (delta = 3/4) on an integer Gram matrix; returns the transform H.

    All quantities are the integers d_i (Gram determinants) and
    lambda_ij = d_j mu_ij, so every division below is exact.
    """
    H = [[int(i == j) for j in range(n)] for i in range(n)]

    def ip(u, v):
        return sum(u[i] * sum(gram[i][j] * v[j] for j in range(n) if v[j]) for i in range(n) if u[i])

    d = [1] + [0] * n  # d[0] = 1, d[i] for i = 1..n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    k, kmax = 2, 1
    d[1] = ip(H[0], H[0])
    if d[1] <= 0:
        raise NotPositiveDefinite("form is not positive definite on the span")

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            H[k - 1] = [a - q * b for a, b in zip(H[k - 1], H[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        H[k - 1], H[k - 2] = H[k - 2], H[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lk * lk) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lk * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lk * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = ip(H[k - 1], H[j - 1])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise NotPositiveDefinite("form is not positive definite on the span")
                    d[k] = u
        red(k, k - 1)
        if 4 * d[k] * d[k - 2] < 3 * d[k - 1] ** 2 - 4 * lam[k][k - 1] ** 2:
            swap(k)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
    return H


def lll_reduce(G, basis=None, delta: Fraction = Fraction(3, 4)):
    """Exact LLL reduction of ``basis`` (rows) under the Gram form ``G``.

    Returns ``(reduced_basis, U)`` with ``reduced_basis = U * basis`` and U
    unimodular. Default basis is the identity. Only delta = 3/4 is supported.
    """
    if delta != Fraction(3, 4):
        raise ValueError("only delta = 3/4 is implemented")
    G = _as_gram(G).G
    n = len(G)
    if basis is None:
        basis = [[int(i == j) for j in range(n)] for i in range(n)]
    elif isinstance(basis, IntegerLattice):
        basis = [list(r) for r in basis.basis]
    B = [list(r) for r in basis]
    m = len(B)
    sub = _linalg.matmul(_linalg.matmul(B, G), _linalg.transpose(B))
    scale = 1
    for r in sub:
        for x in r:
            scale = lcm(scale, Fraction(x).denominator)
    gram = [[int(Fraction(x) * scale) for x in r] for r in sub]
    if m == 1:
        return B, [[1]]
    U = _integral_lll(gram, m)
    reduced = [[sum(U[i][k] * B[k][j] for k in range(m)) for j in range(len(B[0]))] for i in range(m)]
    return reduced, U


# -- Fincke-Pohst -------------------------------------------------------------


@dataclass(frozen=True)
class ShortVector:
    """One representative of a +-pair; ``multiplicity`` counts both signs."""

    vector: tuple[int, ...]
    value: Fraction
    multiplicity: int = 2


def _fp_decomposition(G: list[list[Fraction]]):
    n = len(G)
    Q = [[Fraction(x) for x in r] for r in G]
    for i in range(n):
        if Q[i][i] <= 0:
            raise NotPositiveDefinite("form is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return Q


def _int_range(c: Fraction, t: Fraction, q: Fraction, nonneg: bool) -> range:
    """Integers x with q*(x-c)^2 <= t, exactly."""
    if t < 0:
        return range(0)
    s = (float(t) / float(q)) ** 0.5
    cf = float(c)
    lo, hi = ceil(cf - s), floor(cf + s)
    ok = lambda x: q * (x - c) ** 2 <= t
    while ok(lo - 1):
        lo -= 1
    while lo <= hi and not ok(lo):
        lo += 1
    while ok(hi + 1):
        hi += 1
    while hi >= lo and not ok(hi):
        hi -= 1
    if nonneg:
        lo = max(lo, 0)
    return range(lo, hi + 1)


def _fp_iter(G: list[list[Fraction]], bound: Fraction) -> Iterator[tuple[list[int], Fraction]]:
    """Nonzero x with xGx^T <= bound, one per sign pair (last nonzero coordinate > 0)."""
    Q = _fp_decomposition(G)
    n = len(Q)
    x = [0] * n
    bound = Fraction(bound)

    def rec(i: int, remaining: Fraction, all_zero: bool):
        c = -sum((Q[i][j] * x[j] for j in range(i + 1, n) if x[j]), Fraction(0))
        for xi in _int_range(c, remaining, Q[i][i], all_zero):
            r = remaining - Q[i][i] * (xi - c) ** 2
            x[i] = xi
            if i == 0:
                if not (all_zero and xi == 0):
                    yield list(x), bound - r
            else:
                yield from rec(i - 1, r, all_zero and xi == 0)
        x[i] = 0

    yield from rec(n - 1, bound, True)


def _canonical_sign(v: Sequence[int]) -> tuple[int, ...]:
    for a in v:
        if a:
            return tuple(v) if a > 0 else tuple(-b for b in v)
    return tuple(v)


def iter_short(G, bound, reduce: bool = True) -> Iterator[ShortVector]:
    """Unordered stream of short vectors (early exit friendly)."""
    gram = _as_gram(G)
    if reduce and gram.n > 1:
        _, U = lll_reduce(gram)
        Gr = gram.transform(U).G
    else:
        U = None
        Gr = gram.G
    for w, val in _fp_iter(Gr, Fraction(bound)):
        if U is not None:
            v = [sum(w[k] * U[k][i] for k in range(len(w))) for i in range(gram.n)]
        else:
            v = w
        yield ShortVector(_canonical_sign(v), val)


def enumerate_short(G, bound, reduce: bool = True) -> list[ShortVector]:
    """All nonzero v with vGv^T <= bound, one per +-pair, in lexicographic order."""
    return sorted(iter_short(G, bound, reduce), key=lambda s: s.vector)


def naive_enumerate(G, bound) -> list[ShortVector]:
    """Box enumeration oracle: |x_i| <= sqrt(bound * (G^-1)_ii), vectorized."""
    gram = _as_gram(G)
    n = gram.n
    Ginv = _linalg.inverse(gram.G)
    radii = [isqrt(floor(Fraction(bound) * Ginv[i][i])) for i in range(n)]
    scale = 1
    for r in gram.G:
        for x in r:
            scale = lcm(scale, x.denominator)
    Gi = np.array([[int(x * scale) for x in r] for r in gram.G], dtype=np.int64)
    B = Fraction(bound) * scale
    out = []
    # iterate over the first n-2 coordinates in python, vectorize the last two
    inner = [np.arange(-r, r + 1) for r in radii[-2:]] if n >= 2 else [np.arange(-radii[0], radii[0] + 1)]
    mesh = np.array(np.meshgrid(*inner, indexing="ij")).reshape(len(inner), -1).T
    outer_ranges = [range(-r, r + 1) for r in radii[: n - len(inner)]]
    for head in product(*outer_ranges):
        X = np.empty((mesh.shape[0], n), dtype=np.int64)
        X[:, : len(head)] = head
        X[:, len(head):] = mesh
        vals = np.einsum("ij,jk,ik->i", X, Gi, X)
        for idx in np.nonzero(vals <= B)[0]:
            v = tuple(int(a) for a in X[idx])
            if not any(v):
                continue
            if _canonical_sign(v) != v:
                continue
            out.append(ShortVector(v, Fraction(int(vals[idx]), scale)))
    return sorted(out, key=lambda s: s.vector)
