"""Small exact linear algebra kernels over Z and Q.

Matrices are lists of rows. Integer routines use Python ints; rational ones
use :class:`fractions.Fraction`. Dimensions in this package never exceed a
few dozen, so clarity wins over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list]


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the Z-span of ``rows``.

    The result is upper triangular in echelon shape: pivots are positive and
    entries above a pivot lie in ``[0, pivot)``. Zero rows are dropped, so the
    output is a basis of the row lattice and is canonical for that lattice.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    if not work:
        return []
    ncols = len(work[0])
    out: list[list[int]] = []
    for col in range(ncols):
        live = [r for r in work if r[col] != 0]
        if not live:
            continue
        rest = [r for r in work if r[col] == 0]
        # gcd-combine the live rows into one pivot row, eliminating the others
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r2 = [a - q * b for a, b in zip(r, piv)]
                if r2[col] != 0:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        work = rest
    # reduce entries above pivots
    pivcols = []
    for r in out:
        pivcols.append(next(i for i, a in enumerate(r) if a != 0))
    # ascending pivots: reducing at column c_i only disturbs columns right of it
    for i in range(len(out)):
        c = pivcols[i]
        p = out[i][c]
        for k in range(i):
            q = out[k][c] // p
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return out


def common_denominator(rows: Sequence[Sequence[Fraction]]) -> int:
    d = 1
    for r in rows:
        for x in r:
            d = lcm(d, Fraction(x).denominator)
    return d


def rational_hnf(rows: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """HNF of a rational row span, returned as (integer basis, denominator)."""
    d = common_denominator(rows)
    ints = [[int(Fraction(x) * d) for x in r] for r in rows]
    basis = hnf_rows(ints)
    # strip a common factor so the denominator is minimal
    g = 0
    for r in basis:
        for x in r:
            g = gcd(g, x)
    g = gcd(g, d)
    if g > 1:
        basis = [[x // g for x in r] for r in basis]
        d //= g
    return basis, d


def det(m: Sequence[Sequence]) -> Fraction:
    a = [[Fraction(x) for x in r] for r in m]
    n = len(a)
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return result


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def solve_left(basis: Sequence[Sequence], v: Sequence) -> list[Fraction] | None:
    """Coefficients c with c * basis = v (basis rows independent), or None."""
    n = len(basis)
    m = len(v)
    # solve basis^T c^T = v^T by elimination on the augmented system
    a = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(m)]
    row = 0
    pivots = []
    for c in range(n):
        p = next((r for r in range(row, m) if a[r][c] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        inv = 1 / a[row][c]
        a[row] = [x * inv for x in a[row]]
        for r in range(m):
            if r != row and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(c)
        row += 1
    if any(a[r][n] != 0 for r in range(row, m)):
        return None
    sol = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        sol[c] = a[r][n]
    return sol


def nullspace(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of {x : m x = 0} over Q (column vectors returned as lists)."""
    if not m:
        return []
    rows = len(m)
    cols = len(m[0])
    a = [[Fraction(x) for x in r] for r in m]
    pivots: list[int] = []
    row = 0
    for c in range(cols):
        p = next((r for r in range(row, rows) if a[r][c] != 0), None)
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        inv = 1 / a[row][c]
        a[row] = [x * inv for x in a[row]]
        for r in range(rows):
            if r != row and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(c)
        row += 1
        if row == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fc]
        basis.append(v)
    return basis


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*a)]
