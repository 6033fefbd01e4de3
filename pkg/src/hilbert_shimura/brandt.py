"""The space M(R) spanned by left ideal classes, and its Hecke operators.

Neighbors are built globally. Left R-ideals J with I > J > pi I and
[I : J] = N(p)^2 correspond to the N(p) + 1 lines in a 2-dimensional space
over O/p. Concretely, J = R x + pi I, where x runs over a pencil x0 + t x1
of elements whose norm is divisible by N(I) p.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from . import _linalg
from .errors import DimensionMismatch, HilbertShimuraError, LevelPrime, NonIntegralEigenvalue
from .lattice import iter_short
from .numfield import FieldIdeal, PrimeIdeal, QuadraticField, factor_ideal, totally_positive_generator
from .quatalg import QuaternionLattice, lattice_product, reduced_discriminant, unit_index


def order_level(R: QuaternionLattice) -> FieldIdeal:
    if "level" not in R._cache:
        R._cache["level"] = reduced_discriminant(R)
    return R._cache["level"]


def _check_good_prime(R: QuaternionLattice, P: PrimeIdeal) -> None:
    if P.ideal.divides(order_level(R)):
        raise LevelPrime(f"{P} divides the level of the order")


def _find_rank_one(I: QuaternionLattice, P: PrimeIdeal, piI: QuaternionLattice, seed: int):
    """An element x of I outside pi I whose norm lies in N(I) P."""
    alg = I.algebra
    nu = I.norm_generator()
    rng = random.Random(seed)
    rows = I.hnf
    for attempt in range(200000):
        span = 1 + attempt // 2000
        coeffs = [rng.randint(-span, span) for _ in range(8)]
        v = [Fraction(sum(c * r[i] for c, r in zip(coeffs, rows)), I.den) for i in range(8)]
        if not any(v) or piI.contains_vector(v):
            continue
        if P.contains(alg.norm_vector(v) / nu):
            return v
    raise HilbertShimuraError(f"no element of norm divisible by {P} found")


def _left_ideal(R: QuaternionLattice, x, piI: QuaternionLattice) -> QuaternionLattice:
    alg = R.algebra
    gens = [alg.mul_vectors(r, x) for r in R.rows()] + piI.rows()
    return QuaternionLattice.from_vectors(alg, gens, omodule=False)


def p_neighbors(I: QuaternionLattice, P: PrimeIdeal, R: QuaternionLattice | None = None, seed: int = 0) -> list[QuaternionLattice]:
    """t_P(I): the N(P)+1 locally principal left ideals J < I with [I : J] = P^2.

    The output is ordered by the pencil parameter (residues of O/P, then the
    point at infinity). It is certified before returning: the index and norm
    are checked for each J, and all J must be distinct.
    """
    R = R if R is not None else I.left_order()
    _check_good_prime(R, P)
    alg = I.algebra
    pi = P.generator
    piI = I.scale(pi)
    x0 = _find_rank_one(I, P, piI, seed)
    J0 = _left_ideal(R, x0, piI)
    x1 = None
    right = I.right_order()
    for s in right.rows():
        cand = alg.mul_vectors(x0, s)
        if not J0.contains_vector(cand):
            x1 = cand
            break
    if x1 is None:
        raise HilbertShimuraError("right order acts trivially on the neighbor line")
    out = []
    for t in P.residue_elements():
        tv = alg.element(t).vector()
        xt = [a + b for a, b in zip(x0, alg.mul_vectors(tv, x1))]
        out.append(_left_ideal(R, xt, piI))
    out.append(_left_ideal(R, x1, piI))
    _certify_neighbors(I, P, out)
    return out


def _certify_neighbors(I: QuaternionLattice, P: PrimeIdeal, nbrs: Sequence[QuaternionLattice]) -> None:
    n = P.norm
    target_norm = I.norm_ideal() * P.ideal
    if len(set(nbrs)) != n + 1:
        raise HilbertShimuraError(f"expected {n + 1} distinct neighbors, got {len(set(nbrs))}")
    for J in nbrs:
        if J.index_in(I) != n * n:
            raise HilbertShimuraError("neighbor has the wrong index")
        if J.norm_ideal() != target_norm:
            raise HilbertShimuraError("neighbor has the wrong norm ideal")


def is_equivalent(I: QuaternionLattice, J: QuaternionLattice) -> bool:
    """Whether I = J x for some x in B^x (I, J left ideals of the same order).

    Equivalent to conj(J) I containing y with N(y) O = N(J) N(I). Unit
    scaling lets us ask for N(y) = nu with nu the trace-minimal totally
    positive generator, so Tr o N <= Tr(nu) bounds the search.
    """
    M = lattice_product(J.conjugate(), I)
    nu = totally_positive_generator(J.norm_ideal() * I.norm_ideal())
    target = nu.norm()
    alg = I.algebra
    for sv in iter_short(M.norm_gram(), nu.trace()):
        n = alg.norm_vector(M.element_of(sv.vector))
        if n.norm() == target and (n / nu).is_integral():
            return True
    return False


# -- class sets ------------------------------------------------------------------


@dataclass
class ClassSet:
    """Representatives of the left ideal classes of R, with unit weights."""

    order: QuaternionLattice
    reps: list[QuaternionLattice]
    weights: list[int]
    depths: list[int]
    level: FieldIdeal
    primes_used: list[PrimeIdeal] = field(default_factory=list)
    _neighbors: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.reps)

    def classify(self, J: QuaternionLattice) -> int:
        for i, rep in enumerate(self.reps):
            if is_equivalent(rep, J):
                return i
        raise HilbertShimuraError("ideal is not equivalent to any representative")

    def neighbors(self, i: int, P: PrimeIdeal) -> list[QuaternionLattice]:
        key = (i, P.ideal.hnf)
        if key not in self._neighbors:
            self._neighbors[key] = p_neighbors(self.reps[i], P, self.order)
        return self._neighbors[key]

    def norm_classes(self) -> list[FieldIdeal]:
        return [J.norm_ideal() for J in self.reps]

    def vector(self, coeffs) -> "ClassVector":
        return ClassVector(self, tuple(Fraction(c) for c in coeffs))

    def basis_vector(self, i: int) -> "ClassVector":
        return self.vector([int(j == i) for j in range(len(self))])

    def to_json(self) -> dict:
        return {
            "classes": len(self.reps),
            "reps": [J.to_json() for J in self.reps],
            "weights": self.weights,
            "depths": self.depths,
            "norm_classes": [N.to_json() for N in self.norm_classes()],
            "level": self.level.to_json(),
            "primes_used": [P.norm for P in self.primes_used],
        }


def good_primes(level: FieldIdeal, count: int | None = None, bound: int | None = None) -> list[PrimeIdeal]:
    K = QuadraticField(level.D)
    out = []
    limit = bound or 50
    while True:
        out = [P for P in K.primes_up_to(limit) if not P.ideal.divides(level)]
        if bound is not None or len(out) >= (count or 0):
            break
        limit *= 2
    return out if count is None else out[:count]


def class_set(R: QuaternionLattice, search_primes: int = 3, check_primes: int = 2) -> ClassSet:
    """Breadth-first neighbor closure of {R}, then a closure check with more primes."""
    level = order_level(R)
    primes = good_primes(level, search_primes + check_primes)
    S = ClassSet(R, [R], [], [0], level, primes)

    def absorb(J, depth) -> bool:
        if any(is_equivalent(rep, J) for rep in S.reps):
            return False
        S.reps.append(J)
        S.depths.append(depth)
        return True

    frontier = [0]
    depth = 0
    while frontier:
        depth += 1
        found = []
        for i in frontier:
            for P in primes[:search_primes]:
                for J in S.neighbors(i, P):
                    if not any(is_equivalent(rep, J) for rep in S.reps + found):
                        found.append(J)
        found.sort(key=QuaternionLattice.key)
        frontier = []
        for J in found:
            S.reps.append(J)
            S.depths.append(depth)
            frontier.append(len(S.reps) - 1)
    for i in range(len(S.reps)):
        for P in primes[search_primes:]:
            for J in S.neighbors(i, P):
                if absorb(J, -1):
                    raise HilbertShimuraError("neighbor closure is not complete under the check primes")
    S.weights = [unit_index(J.right_order()) for J in S.reps]
    return S


# -- class vectors ---------------------------------------------------------------


@dataclass(frozen=True)
class ClassVector:
    """Rational combination of classes: an element of M(R)."""

    classes: ClassSet
    coeffs: tuple[Fraction, ...]

    def _check(self, other: "ClassVector"):
        if other.classes is not self.classes or len(other.coeffs) != len(self.coeffs):
            raise DimensionMismatch("class vectors over different class sets")

    def __add__(self, other):
        self._check(other)
        return ClassVector(self.classes, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return ClassVector(self.classes, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, c):
        return ClassVector(self.classes, tuple(Fraction(c) * a for a in self.coeffs))

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def degree(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def inner_product(u: ClassVector, v: ClassVector) -> Fraction:
    """<u, v> = sum u_i v_i w_i."""
    u._check(v)
    return sum((a * b * w for a, b, w in zip(u.coeffs, v.coeffs, u.classes.weights)), Fraction(0))


def eisenstein_vector(S: ClassSet) -> ClassVector:
    """e_0 = sum_i (1/w_i)[I_i] (trivial narrow class group)."""
    return S.vector([Fraction(1, w) for w in S.weights])


# -- Hecke operators -------------------------------------------------------------


@dataclass(frozen=True)
class BrandtMatrix:
    """Matrix of T_m; column j counts the classes of the ideals in t_m(I_j)."""

    m: FieldIdeal
    matrix: tuple[tuple[int, ...], ...]
    method: str = "neighbors"

    def column_sums(self) -> list[int]:
        n = len(self.matrix)
        return [sum(self.matrix[i][j] for i in range(n)) for j in range(n)]

    def apply(self, v: ClassVector) -> ClassVector:
        n = len(self.matrix)
        if len(v) != n:
            raise DimensionMismatch("vector and matrix sizes differ")
        return ClassVector(v.classes, tuple(sum((self.matrix[i][j] * v[j] for j in range(n)), Fraction(0)) for i in range(n)))

    def __matmul__(self, other: "BrandtMatrix") -> "BrandtMatrix":
        M = _linalg.matmul(self.matrix, other.matrix)
        return BrandtMatrix(self.m * other.m, tuple(tuple(r) for r in M), "product")

    def to_json(self) -> dict:
        return {"norm": str(self.m.norm()), "ideal": self.m.to_json(), "method": self.method, "matrix": [list(r) for r in self.matrix]}


def _classify_set(S: ClassSet, ideals) -> list[int]:
    counts = [0] * len(S)
    for J in ideals:
        counts[S.classify(J)] += 1
    return counts


def prime_hecke_matrix(S: ClassSet, P: PrimeIdeal) -> BrandtMatrix:
    _check_good_prime(S.order, P)
    n = len(S)
    cols = [_classify_set(S, S.neighbors(j, P)) for j in range(n)]
    return BrandtMatrix(P.ideal, tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)), "neighbors")


def _identity(n: int):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _prime_power_recurrence(S: ClassSet, P: PrimeIdeal, e: int) -> BrandtMatrix:
    n = len(S)
    Tp = prime_hecke_matrix(S, P)
    K = QuadraticField(P.D)
    prev = BrandtMatrix(K.unit_ideal, _identity(n))
    cur = Tp
    for k in range(1, e):
        # T_{p^{k+1}} = T_{p^k} T_p - N(p) T_{p^{k-1}} (class action of p is trivial)
        prod = _linalg.matmul(cur.matrix, Tp.matrix)
        nxt = tuple(tuple(prod[i][j] - P.norm * prev.matrix[i][j] for j in range(n)) for i in range(n))
        prev, cur = cur, BrandtMatrix(P.ideal ** (k + 1), nxt, "recurrence")
    return cur if e >= 1 else prev


def t_m_direct(S: ClassSet, j: int, m: FieldIdeal) -> list[QuaternionLattice]:
    """t_m(I_j) enumerated as deduplicated iterated neighbor sets."""
    K = QuadraticField(m.D)
    current = {S.reps[j]}
    for P, e in factor_ideal(m):
        rec = K.prime_of(P.ideal)
        for _ in range(e):
            nxt = set()
            for J in sorted(current, key=QuaternionLattice.key):
                nxt.update(p_neighbors(J, rec, S.order))
            current = nxt
    return sorted(current, key=QuaternionLattice.key)


def hecke_matrix(S: ClassSet, m: FieldIdeal, method: str = "recurrence") -> BrandtMatrix:
    """Brandt matrix of T_m for m coprime to the level.

    ``method="recurrence"`` uses neighbors at primes, the prime power
    recurrence, and multiplicativity. ``method="direct"`` classifies the
    full set t_m(I) for every representative.
    """
    K = QuadraticField(m.D)
    n = len(S)
    fac = factor_ideal(m)
    for P, _ in fac:
        _check_good_prime(S.order, K.prime_of(P.ideal))
    if method == "direct":
        cols = [_classify_set(S, t_m_direct(S, j, m)) for j in range(n)]
        return BrandtMatrix(m, tuple(tuple(cols[j][i] for j in range(n)) for i in range(n)), "direct")
    result = BrandtMatrix(K.unit_ideal, _identity(n))
    for P, e in fac:
        result = result @ _prime_power_recurrence(S, K.prime_of(P.ideal), e)
    return BrandtMatrix(m, result.matrix, "recurrence")


def _hecke_worker(args):
    S, P = args
    return prime_hecke_matrix(S, P)


def prime_hecke_matrices(S: ClassSet, primes: Sequence[PrimeIdeal], workers: int = 1) -> list[BrandtMatrix]:
    """T_P for each prime, optionally in worker processes (same output either way)."""
    if workers <= 1 or len(primes) <= 1:
        return [prime_hecke_matrix(S, P) for P in primes]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_hecke_worker, [(S, P) for P in primes]))


def is_self_adjoint(S: ClassSet, T: BrandtMatrix) -> bool:
    """W M = M^t W with W = diag(w_i), i.e. <T u, v> = <u, T v>."""
    n = len(S)
    w = S.weights
    return all(w[i] * T.matrix[i][j] == T.matrix[j][i] * w[j] for i in range(n) for j in range(n))


# -- eigenvectors ----------------------------------------------------------------


def cusp_space(S: ClassSet) -> list[list[Fraction]]:
    """Basis of the orthogonal complement of e_0, i.e. degree-zero vectors."""
    return _linalg.nullspace([[1] * len(S)])


def _normalize(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    lead = next(c for c in v if c)
    return tuple(Fraction(c) / lead for c in v)


def cusp_eigenvectors(S: ClassSet, primes: Sequence[PrimeIdeal], matrices: dict | None = None):
    """Simultaneous eigenvectors of the T_P on S(R), with integer eigenvalues.

    Returns a list of (ClassVector, {prime norm and hnf: eigenvalue}). Each
    eigenvector is scaled so its first nonzero coefficient is 1.
    """
    matrices = matrices or {}
    spaces: list[tuple[list[list[Fraction]], dict]] = [(cusp_space(S), {})]
    for P in primes:
        T = matrices.get(P) or prime_hecke_matrix(S, P)
        bound = 4 * isqrt(P.norm) + 4
        nxt = []
        for basis, eig in spaces:
            if not basis:
                continue
            TB = [[sum(T.matrix[i][j] * b[j] for j in range(len(b))) for i in range(len(b))] for b in basis]
            found = 0
            for lam in range(-bound, bound + 1):
                # coefficients c with sum_k c_k (T - lam) b_k = 0
                cols = [[TB[k][i] - lam * basis[k][i] for i in range(len(basis[k]))] for k in range(len(basis))]
                ker = _linalg.nullspace(_linalg.transpose(cols))
                if ker:
                    sub = [[sum(c[k] * basis[k][i] for k in range(len(basis))) for i in range(len(basis[0]))] for c in ker]
                    nxt.append((sub, {**eig, P: lam}))
                    found += len(ker)
            if found != len(basis):
                raise NonIntegralEigenvalue(f"T at {P} is not diagonalizable over Z on the cusp space")
        spaces = nxt
    out = []
    for basis, eig in spaces:
        for b in basis:
            out.append((S.vector(_normalize(b)), eig))
    return out
