"""Totally definite quaternion algebras B = (a, b / F) over F = Q(sqrt(D)).

Lattices (orders and ideals) are full rank Z-lattices in B, stored as an
8-column HNF in the coordinates

    (t, w t, x, w x, y, w y, z, w z)   for   t + x i + y j + z k,

so that every O-module question reduces to integer linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import _linalg
from .errors import IncompatibleOrders, NotAnOrder, NotFullRank
from .lattice import GramForm, iter_short, enumerate_short
from .numfield import (
    FieldElement,
    FieldIdeal,
    QuadraticField,
    factor_ideal,
    totally_positive_generator,
)


@dataclass(frozen=True, eq=False)
class QuaternionElement:
    """t + x i + y j + z k with coordinates in F."""

    t: FieldElement
    x: FieldElement
    y: FieldElement
    z: FieldElement
    algebra: "QuaternionAlgebra"

    def coords(self) -> tuple[FieldElement, ...]:
        return (self.t, self.x, self.y, self.z)

    def vector(self) -> list[Fraction]:
        out = []
        for c in self.coords():
            out += [c.a, c.b]
        return out

    def __add__(self, other):
        other = self.algebra.coerce(other)
        return self.algebra.element(*(u + v for u, v in zip(self.coords(), other.coords())))

    __radd__ = __add__

    def __neg__(self):
        return self.algebra.element(*(-u for u in self.coords()))

    def __sub__(self, other):
        return self + (-self.algebra.coerce(other))

    def __rsub__(self, other):
        return self.algebra.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.algebra.element(*(u * other for u in self.coords()))
        return self.algebra.multiply(self, other)

    def __rmul__(self, other):
        return self.algebra.element(*(other * u for u in self.coords()))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            inv = 1 / (other if isinstance(other, FieldElement) else Fraction(other))
            return self * inv
        return self * other.inverse()

    def __eq__(self, other):
        if not isinstance(other, QuaternionElement):
            try:
                other = self.algebra.coerce(other)
            except TypeError:
                return NotImplemented
        return self.coords() == other.coords()

    def __hash__(self):
        return hash(self.coords())

    def __bool__(self):
        return any(bool(c) for c in self.coords())

    def conjugate(self) -> "QuaternionElement":
        return self.algebra.element(self.t, -self.x, -self.y, -self.z)

    def reduced_trace(self) -> FieldElement:
        return self.t * 2

    def reduced_norm(self) -> FieldElement:
        a, b = self.algebra.a, self.algebra.b
        t, x, y, z = self.coords()
        return t * t - a * x * x - b * y * y + a * b * z * z

    def delta(self) -> FieldElement:
        """Tr(q)^2 - 4 N(q); depends only on q modulo F."""
        tr = self.reduced_trace()
        return tr * tr - self.reduced_norm() * 4

    def inverse(self) -> "QuaternionElement":
        return self.conjugate() / self.reduced_norm()

    def is_central(self) -> bool:
        return not (self.x or self.y or self.z)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coords()]

    def __repr__(self):
        parts = []
        for c, s in zip(self.coords(), ("", "i", "j", "k")):
            if c:
                parts.append(f"({c}){s}" if s else f"({c})")
        return " + ".join(parts) if parts else "0"


class QuaternionAlgebra:
    """(a, b / F) with i^2 = a, j^2 = b, ij = -ji = k."""

    def __init__(self, field: QuadraticField, a, b):
        self.field = field
        self.a = a if isinstance(a, FieldElement) else field(a)
        self.b = b if isinstance(b, FieldElement) else field(b)
        if not (-self.a).is_totally_positive() or not (-self.b).is_totally_positive():
            raise ValueError("only totally definite algebras (a, b totally negative) are supported")
        self._table = self._structure_constants()

    def __repr__(self):
        return f"QuaternionAlgebra(D={self.field.D}, a={self.a}, b={self.b})"

    def element(self, t=0, x=0, y=0, z=0) -> QuaternionElement:
        F = self.field
        c = [v if isinstance(v, FieldElement) else F(v) for v in (t, x, y, z)]
        return QuaternionElement(*c, algebra=self)

    def coerce(self, v) -> QuaternionElement:
        if isinstance(v, QuaternionElement):
            return v
        if isinstance(v, (int, Fraction, FieldElement)):
            return self.element(v)
        raise TypeError(f"cannot coerce {v!r} into {self}")

    @property
    def gens(self):
        return self.element(0, 1), self.element(0, 0, 1), self.element(0, 0, 0, 1)

    def multiply(self, p: QuaternionElement, q: QuaternionElement) -> QuaternionElement:
        a, b = self.a, self.b
        t1, x1, y1, z1 = p.coords()
        t2, x2, y2, z2 = q.coords()
        return self.element(
            t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 + b * (z1 * y2 - y1 * z2),
            t1 * y2 + y1 * t2 + a * (x1 * z2 - z1 * x2),
            t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
        )

    def from_vector(self, v: Sequence) -> QuaternionElement:
        F = self.field
        return self.element(*(F(v[2 * i], v[2 * i + 1]) for i in range(4)))

    def _structure_constants(self):
        basis = [self.from_vector([int(i == k) for i in range(8)]) for k in range(8)]
        table = []
        for u in basis:
            row = []
            for v in basis:
                w = self.multiply(u, v).vector()
                row.append([(i, c if c.denominator != 1 else int(c)) for i, c in enumerate(w) if c])
            table.append(row)
        return table

    def mul_vectors(self, u: Sequence, v: Sequence) -> list:
        """Product in 8-coordinate form (ints or Fractions)."""
        out = [0] * 8
        T = self._table
        for p, up in enumerate(u):
            if not up:
                continue
            row = T[p]
            for q, vq in enumerate(v):
                if not vq:
                    continue
                c0 = up * vq
                for idx, c in row[q]:
                    out[idx] += c0 * c
        return out

    @cached_property
    def norm_gram_ambient(self) -> list[list[Fraction]]:
        """Tr_{F/Q} o N as a bilinear form on the 8 coordinates."""
        E = [self.from_vector([int(i == k) for i in range(8)]) for k in range(8)]
        return [[(u * v.conjugate()).reduced_trace().trace() / 2 for v in E] for u in E]

    def norm_vector(self, v: Sequence) -> FieldElement:
        return self.from_vector(v).reduced_norm()

    def to_json(self) -> dict:
        return {"D": self.field.D, "a": self.a.to_json(), "b": self.b.to_json()}


# -- lattices ------------------------------------------------------------------


def _scale_rows(rows: Iterable[Sequence], den: int):
    return [[Fraction(x, den) for x in r] for r in rows]


@dataclass(frozen=True, eq=False)
class QuaternionLattice:
    """Full rank Z-lattice in B, O-stable, given by an 8x8 HNF and denominator."""

    algebra: QuaternionAlgebra
    hnf: tuple[tuple[int, ...], ...]
    den: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- construction --------------------------------------------------
    @classmethod
    def from_vectors(cls, algebra: QuaternionAlgebra, vectors: Iterable[Sequence], omodule: bool = True) -> "QuaternionLattice":
        vecs = [list(v) for v in vectors]
        if omodule:
            w = [0, 1, 0, 0, 0, 0, 0, 0]
            vecs = vecs + [algebra.mul_vectors(w, v) for v in vecs]
        basis, den = _linalg.rational_hnf(vecs)
        if len(basis) != 8:
            raise NotFullRank(f"lattice has rank {len(basis)}, expected 8")
        return cls(algebra, tuple(tuple(r) for r in basis), den)

    @classmethod
    def from_generators(cls, algebra: QuaternionAlgebra, gens: Iterable[QuaternionElement]) -> "QuaternionLattice":
        """O-module generated by ``gens``."""
        return cls.from_vectors(algebra, [algebra.coerce(g).vector() for g in gens])

    @classmethod
    def from_json(cls, algebra: QuaternionAlgebra, data) -> "QuaternionLattice":
        F = algebra.field
        gens = [algebra.element(*(FieldElement.from_json(c, F.D) for c in g)) for g in data["generators"]]
        return cls.from_generators(algebra, gens)

    def to_json(self) -> dict:
        gens = [self.algebra.from_vector(r).to_json() for r in self.rows()]
        return {"generators": gens, "hnf": [[str(x) for x in r] for r in self.hnf], "den": str(self.den)}

    # -- basic data ------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, QuaternionLattice) and self.hnf == other.hnf and self.den == other.den

    def __hash__(self):
        return hash((self.hnf, self.den))

    def key(self):
        return (self.den, self.hnf)

    def rows(self) -> list[list[Fraction]]:
        if "rows" not in self._cache:
            self._cache["rows"] = _scale_rows(self.hnf, self.den)
        return self._cache["rows"]

    def basis(self) -> list[QuaternionElement]:
        return [self.algebra.from_vector(r) for r in self.rows()]

    def _inverse_basis(self):
        if "inv" not in self._cache:
            self._cache["inv"] = _linalg.inverse(self.rows())
        return self._cache["inv"]

    def coordinates(self, v: Sequence) -> list[Fraction]:
        inv = self._inverse_basis()
        return [sum((Fraction(v[k]) * inv[k][i] for k in range(8) if v[k]), Fraction(0)) for i in range(8)]

    def contains_vector(self, v: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(v))

    def contains(self, q: QuaternionElement) -> bool:
        return self.contains_vector(q.vector())

    __contains__ = contains

    def is_subset(self, other: "QuaternionLattice") -> bool:
        return all(other.contains_vector(r) for r in self.rows())

    def covolume(self) -> Fraction:
        if "covol" not in self._cache:
            self._cache["covol"] = abs(_linalg.det(self.hnf)) / Fraction(self.den) ** 8
        return self._cache["covol"]

    def index_in(self, other: "QuaternionLattice") -> Fraction:
        """Generalized Z-index [other : self]."""
        return self.covolume() / other.covolume()

    # -- arithmetic ----------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, QuaternionLattice):
            return lattice_product(self, other)
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(other)
        if isinstance(other, QuaternionElement):
            return QuaternionLattice.from_vectors(
                self.algebra, [self.algebra.mul_vectors(r, other.vector()) for r in self.rows()], omodule=False
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.scale(other)
        if isinstance(other, QuaternionElement):
            return QuaternionLattice.from_vectors(
                self.algebra, [self.algebra.mul_vectors(other.vector(), r) for r in self.rows()], omodule=False
            )
        return NotImplemented

    def scale(self, c) -> "QuaternionLattice":
        c = c if isinstance(c, FieldElement) else self.algebra.field(c)
        q = self.algebra.element(c).vector()
        return QuaternionLattice.from_vectors(self.algebra, [self.algebra.mul_vectors(q, r) for r in self.rows()], omodule=False)

    def conjugate(self) -> "QuaternionLattice":
        sign = [1, 1, -1, -1, -1, -1, -1, -1]
        return QuaternionLattice.from_vectors(self.algebra, [[s * x for s, x in zip(sign, r)] for r in self.rows()], omodule=False)

    def norm_ideal(self) -> FieldIdeal:
        """Ideal of F generated by the reduced norms of the elements."""
        if "nrd" not in self._cache:
            B = self.basis()
            gens = [q.reduced_norm() for q in B]
            for i in range(8):
                for j in range(i + 1, 8):
                    gens.append((B[i] * B[j].conjugate()).reduced_trace())
            self._cache["nrd"] = FieldIdeal.from_generators(gens, self.algebra.field.D)
        return self._cache["nrd"]

    def norm_generator(self) -> FieldElement:
        """Canonical totally positive generator of the norm ideal."""
        if "nrd_gen" not in self._cache:
            self._cache["nrd_gen"] = totally_positive_generator(self.norm_ideal())
        return self._cache["nrd_gen"]

    def inverse(self) -> "QuaternionLattice":
        """conj(I) / N(I); satisfies I * I^-1 = left order of I."""
        return self.conjugate().scale(self.norm_generator().inverse())

    def _colon(self, side: str) -> "QuaternionLattice":
        # {q : b q in I for all basis b} (right) or {q : q b in I} (left):
        # the dual of the span of the columns of [M_b * B^-1]
        alg = self.algebra
        inv = self._inverse_basis()
        unit = [[int(i == k) for i in range(8)] for k in range(8)]
        cols = []
        for r in self.rows():
            images = [alg.mul_vectors(r, e) if side == "right" else alg.mul_vectors(e, r) for e in unit]
            coords = _linalg.matmul(images, inv)  # row k: coordinates of image of e_k
            cols.extend(_linalg.transpose(coords))
        lat, den = _linalg.rational_hnf(cols)
        C = _scale_rows(lat, den)
        dual = _linalg.transpose(_linalg.inverse(C))
        return QuaternionLattice.from_vectors(alg, dual, omodule=False)

    def right_order(self) -> "QuaternionLattice":
        if "right" not in self._cache:
            self._cache["right"] = self._colon("right")
        return self._cache["right"]

    def left_order(self) -> "QuaternionLattice":
        if "left" not in self._cache:
            self._cache["left"] = self._colon("left")
        return self._cache["left"]

    def is_order(self) -> bool:
        one = [1, 0, 0, 0, 0, 0, 0, 0]
        if not self.contains_vector(one):
            return False
        rows = self.rows()
        return all(self.contains_vector(self.algebra.mul_vectors(u, v)) for u in rows for v in rows)

    # -- quadratic forms -------------------------------------------------
    def norm_gram(self) -> GramForm:
        """Gram matrix of Tr_{F/Q} o N on the Z-basis."""
        if "ngram" not in self._cache:
            G0 = self.algebra.norm_gram_ambient
            H = [list(r) for r in self.hnf]
            G = _linalg.matmul(_linalg.matmul(H, G0), _linalg.transpose(H))
            d2 = self.den * self.den
            self._cache["ngram"] = GramForm([[Fraction(x, d2) for x in r] for r in G])
        return self._cache["ngram"]

    def element_of(self, coeffs: Sequence[int]) -> list[Fraction]:
        rows = self.rows()
        return [sum((c * rows[k][i] for k, c in enumerate(coeffs) if c), Fraction(0)) for i in range(8)]

    def __repr__(self):
        return f"QuaternionLattice(den={self.den}, covolume={self.covolume()})"


def lattice_product(I: QuaternionLattice, J: QuaternionLattice, check: bool = False) -> QuaternionLattice:
    """Z-span of all products x y, x in I, y in J."""
    if check and I.right_order() != J.left_order():
        raise IncompatibleOrders("right order of I differs from left order of J")
    alg = I.algebra
    # integer arithmetic on the numerators, one common denominator
    prods = [alg.mul_vectors(u, v) for u in I.hnf for v in J.hnf]
    basis, den = _linalg.rational_hnf([[Fraction(x, I.den * J.den) for x in p] for p in prods])
    if len(basis) != 8:
        raise NotFullRank("product lattice is not full rank")
    return QuaternionLattice(alg, tuple(tuple(r) for r in basis), den)


def ideal_product(I: QuaternionLattice, J: QuaternionLattice) -> QuaternionLattice:
    return lattice_product(I, J, check=True)


def ideal_conjugate(I: QuaternionLattice) -> QuaternionLattice:
    return I.conjugate()


def ideal_inverse(I: QuaternionLattice) -> QuaternionLattice:
    return I.inverse()


def right_order(I: QuaternionLattice) -> QuaternionLattice:
    return I.right_order()


def left_order(I: QuaternionLattice) -> QuaternionLattice:
    return I.left_order()


# -- O-bases over the Euclidean ring O -------------------------------------------


def _round_element(x: FieldElement) -> FieldElement:
    return FieldElement(round(x.a), round(x.b), x.D)


def o_basis(vectors: Sequence[Sequence[FieldElement]]) -> list[list[FieldElement]]:
    """Echelon O-basis of the O-module spanned by F-vectors.

    Uses the Euclidean algorithm in O (coordinate rounding leaves a remainder
    of smaller absolute norm, which holds for Q(sqrt 5)).
    """
    if not vectors:
        return []
    dens = 1
    for v in vectors:
        for c in v:
            dens = math.lcm(dens, c.a.denominator, c.b.denominator)
    work = [[c * dens for c in v] for v in vectors if any(v)]
    n = len(work[0])
    out = []
    for col in range(n):
        live = [r for r in work if r[col]]
        rest = [r for r in work if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col].norm()))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = _round_element(r[col] / piv[col])
                r2 = [u - q * v for u, v in zip(r, piv)]
                if r2[col]:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            live = nxt
        if live:
            out.append(live[0])
        work = rest
    return [[c / dens for c in r] for r in out]


def _det_field(m: list[list[FieldElement]]) -> FieldElement:
    a = [list(r) for r in m]
    n = len(a)
    result = FieldElement(1, 0, a[0][0].D)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return FieldElement(0, 0, a[0][0].D)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result = result * a[c][c]
        inv = a[c][c].inverse()
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return result


def order_o_basis(order: QuaternionLattice) -> list[QuaternionElement]:
    F = order.algebra.field
    vecs = [[F(r[2 * i], r[2 * i + 1]) for i in range(4)] for r in order.rows()]
    return [order.algebra.element(*v) for v in o_basis(vecs)]


def reduced_discriminant(order: QuaternionLattice) -> FieldIdeal:
    """Square root of the ideal generated by det(trd(e_i conj(e_j))) on an O-basis."""
    if not order.is_order():
        raise NotAnOrder("lattice is not an order")
    E = order_o_basis(order)
    if len(E) != 4:
        raise NotFullRank("order is not free of rank 4 over O")
    M = [[(u * v.conjugate()).reduced_trace() for v in E] for u in E]
    d = _det_field(M)
    K = order.algebra.field
    fac = factor_ideal(K.ideal(d), K.factor_bound)
    out = K.unit_ideal
    for P, e in fac:
        if e % 2:
            raise NotAnOrder("discriminant ideal is not a square")
        out = out * (P.ideal ** (e // 2))
    return out


def unit_index(order: QuaternionLattice) -> int:
    """#(order^x / O^x): half the number of elements of reduced norm 1.

    For Q(sqrt 5) the totally positive units are squares and mu(O) = {+-1}.
    Norm-1 elements have Tr(N) = 2, the minimum of Tr o N on nonzero integral
    elements, so one enumeration at bound 2 finds them all.
    """
    K = order.algebra.field
    reps = K.totally_positive_unit_reps()
    if len(reps) != 1:
        raise NotImplementedError("unit index needs O^{x,+} = (O^x)^2")
    G = order.norm_gram()
    count = 0
    for sv in enumerate_short(G, 2):
        q = order.algebra.from_vector(order.element_of(sv.vector))
        if q.reduced_norm() == 1:
            count += sv.multiplicity
    return count // 2


def is_locally_principal_ideal(J: QuaternionLattice, R: QuaternionLattice) -> bool:
    """Index/norm certificate: [R : J] = N(N(J))^2 and R J = J."""
    return J.left_order() == R and J.index_in(R) == J.norm_ideal().norm() ** 2


# -- ternary lattices ------------------------------------------------------------


class TernaryLattice:
    """L = order / O as a Z-lattice of rank 6 in B/F, with the form -Delta."""

    def __init__(self, order: QuaternionLattice | None = None, algebra: QuaternionAlgebra | None = None, pure_rows=None):
        self.order = order
        self.algebra = order.algebra if order is not None else algebra
        F = self.algebra.field
        self.field = F
        if pure_rows is None:
            pure_rows = [list(r[2:]) for r in order.rows()]
        basis, den = _linalg.rational_hnf(pure_rows)
        if len(basis) != 6:
            raise NotFullRank("quotient by O is not of rank 6")
        self.hnf = tuple(tuple(r) for r in basis)
        self.den = den
        self.rows = _scale_rows(basis, den)
        self.vectors = [self._pure(r) for r in self.rows]
        n = 6
        self.gram = GramForm([[self.bilinear(self.vectors[i], self.vectors[j]).trace() for j in range(n)] for i in range(n)])

    def scaled(self, c: FieldElement) -> "TernaryLattice":
        """The lattice c * L (c in F^x), e.g. a^-1 L for a = (1/c)."""
        rows = []
        for v in self.vectors:
            for base in (v, tuple(x * self.field.omega for x in v)):
                flat = []
                for x in base:
                    y = x * c
                    flat += [y.a, y.b]
                rows.append(flat)
        return TernaryLattice(algebra=self.algebra, pure_rows=rows)

    def _pure(self, r) -> tuple[FieldElement, FieldElement, FieldElement]:
        F = self.field
        return (F(r[0], r[1]), F(r[2], r[3]), F(r[4], r[5]))

    def bilinear(self, u, v) -> FieldElement:
        """Symmetric F-bilinear form with bilinear(v, v) = -Delta(v)."""
        a, b = self.algebra.a, self.algebra.b
        return (-a * u[0] * v[0] - b * u[1] * v[1] + a * b * u[2] * v[2]) * 4

    def minus_delta(self, v) -> FieldElement:
        return self.bilinear(v, v)

    def combine(self, coeffs: Sequence[int]):
        F = self.field
        out = [F(0), F(0), F(0)]
        for c, vec in zip(coeffs, self.vectors):
            if c:
                out = [o + vec[i] * c for i, o in enumerate(out)]
        return tuple(out)

    def minus_delta_of(self, coeffs: Sequence[int]) -> FieldElement:
        return self.minus_delta(self.combine(coeffs))

    def contains(self, v) -> bool:
        flat = []
        for c in v:
            flat += [c.a, c.b]
        sol = _linalg.solve_left(self.rows, flat)
        return sol is not None and all(s.denominator == 1 for s in sol)

    def delta_gram_over_F(self, vectors) -> list[list[FieldElement]]:
        return [[self.bilinear(u, v) for v in vectors] for u in vectors]

    # -- counting ----------------------------------------------------------
    def value_table(self, bound: int) -> dict[FieldElement, int]:
        """Counts of every -Delta value with trace <= bound (both signs, no zero)."""
        table: dict[FieldElement, int] = {}
        for sv in iter_short(self.gram, bound):
            val = self.minus_delta_of(sv.vector)
            table[val] = table.get(val, 0) + sv.multiplicity
        return table

    def o_basis(self) -> list[tuple[FieldElement, ...]]:
        """A short O-basis: three short vectors whose O-span is all of L."""
        if "_obasis" in self.__dict__:
            return self._obasis
        w = self.field.omega
        target = _linalg.det(self.gram.G)
        cands: list = []
        bound = 8
        while len(cands) < 12 and bound < 10**6:
            cands = [self.combine(sv.vector) for sv in enumerate_short(self.gram, bound)]
            bound *= 2
        cands.sort(key=lambda v: self.minus_delta(v).trace())
        E = None
        for i in range(len(cands)):
            for j in range(i + 1, len(cands)):
                for k in range(j + 1, len(cands)):
                    trial = [cands[i], cands[j], cands[k]]
                    zb = [c for e in trial for c in (e, tuple(x * w for x in e))]
                    G = [[self.bilinear(u, v).trace() for v in zb] for u in zb]
                    if _linalg.det(G) == target:
                        E = trial
                        break
                if E:
                    break
            if E:
                break
        if E is None:
            E = [tuple(v) for v in o_basis([list(v) for v in self.vectors])]
        self._obasis = E
        return E

    @cached_property
    def _o_search_data(self):
        E = self.o_basis()
        w = self.field.omega
        zb = [c for e in E for c in (e, tuple(x * w for x in e))]
        H = [[self.bilinear(u, v) for v in zb] for u in zb]
        den = 1
        for r in H:
            for h in r:
                den = math.lcm(den, h.a.denominator, h.b.denominator)
        A = [[int(h.a * den) for h in r] for r in H]
        Bm = [[int(h.b * den) for h in r] for r in H]
        # per-embedding real LDL of the 3x3 O-Gram
        Q = [[self.bilinear(u, v) for v in E] for u in E]
        ldl = []
        for s in range(2):
            q = [[Q[i][j].embeddings()[s] for j in range(3)] for i in range(3)]
            d = [0.0] * 3
            m = [[0.0] * 3 for _ in range(3)]
            for i in range(3):
                d[i] = q[i][i]
                for j in range(i + 1, 3):
                    m[i][j] = q[i][j] / d[i]
                for k in range(i + 1, 3):
                    for l in range(k, 3):
                        q[k][l] -= q[i][k] * q[i][l] / d[i]
            ldl.append((d, m))
        return A, Bm, den, ldl

    def count_representations(self, eta: FieldElement) -> int:
        """#{v in L : -Delta(v) = eta}, by a search guided by both real embeddings.

        Floating point only proposes candidates (inside widened boxes); each
        candidate is confirmed by an exact integer evaluation of the form.
        """
        if not eta:
            return 1
        if not eta.is_totally_positive():
            return 0
        A, Bm, den, ldl = self._o_search_data
        ta, tb = eta.a * den, eta.b * den
        if ta.denominator != 1 or tb.denominator != 1:
            return 0
        target = (int(ta), int(tb))
        return _count_o_form(A, Bm, ldl, eta, target)


def _o_points(center: tuple[float, float], radius: tuple[float, float], D: int):
    """u + v w in O with |sigma(u + v w) - center_sigma| <= radius_sigma, widened slightly."""
    r5 = math.sqrt(D)
    w1, w2 = (1 + r5) / 2, (1 - r5) / 2
    r1 = radius[0] * (1 + 1e-9) + 1e-7
    r2 = radius[1] * (1 + 1e-9) + 1e-7
    c1, c2 = center
    # sigma1 - sigma2 = v sqrt(D)
    vlo = math.floor(((c1 - r1) - (c2 + r2)) / r5)
    vhi = math.ceil(((c1 + r1) - (c2 - r2)) / r5)
    for v in range(vlo, vhi + 1):
        lo = max(c1 - r1 - v * w1, c2 - r2 - v * w2)
        hi = min(c1 + r1 - v * w1, c2 + r2 - v * w2)
        for u in range(math.ceil(lo), math.floor(hi) + 1):
            yield u, v, u + v * w1, u + v * w2


def _quad(M, x) -> int:
    return sum(x[i] * sum(M[i][j] * x[j] for j in range(6) if x[j]) for i in range(6) if x[i])


def _count_o_form(A, Bm, ldl, eta: FieldElement, target) -> int:
    D = eta.D
    r5 = math.sqrt(D)
    w1 = (1 + r5) / 2
    eta_e = eta.embeddings()
    d = (ldl[0][0], ldl[1][0])
    m = (ldl[0][1], ldl[1][1])
    tol = 1e-7 * (1 + abs(eta_e[0]) + abs(eta_e[1]))
    count = 0
    rad3 = tuple(math.sqrt(eta_e[s] / d[s][2]) for s in range(2))
    for u3, v3, a31, a32 in _o_points((0.0, 0.0), rad3, D):
        a3e = (a31, a32)
        rem3 = tuple(eta_e[s] - d[s][2] * a3e[s] ** 2 for s in range(2))
        if rem3[0] < -tol or rem3[1] < -tol:
            continue
        c2 = tuple(-m[s][1][2] * a3e[s] for s in range(2))
        rad2 = tuple(math.sqrt(max(rem3[s], 0.0) / d[s][1]) for s in range(2))
        for u2, v2, a21, a22 in _o_points(c2, rad2, D):
            a2e = (a21, a22)
            rem2 = tuple(rem3[s] - d[s][1] * (a2e[s] - c2[s]) ** 2 for s in range(2))
            if rem2[0] < -tol or rem2[1] < -tol:
                continue
            shift = tuple(m[s][0][1] * a2e[s] + m[s][0][2] * a3e[s] for s in range(2))
            root = tuple(math.sqrt(max(rem2[s], 0.0) / d[s][0]) for s in range(2))
            found = set()
            for s1 in (1, -1):
                for s2 in (1, -1):
                    x1 = s1 * root[0] - shift[0]
                    x2 = s2 * root[1] - shift[1]
                    v1 = round((x1 - x2) / r5)
                    found.add((round(x1 - v1 * w1), v1))
            for u1, v1 in found:
                x = (u1, v1, u2, v2, u3, v3)
                if _quad(A, x) == target[0] and _quad(Bm, x) == target[1]:
                    count += 1
    return count


def load_order_fixture(path, algebra: QuaternionAlgebra) -> QuaternionLattice:
    import json

    with open(path) as fh:
        return QuaternionLattice.from_json(algebra, json.load(fh))
