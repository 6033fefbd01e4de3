"""Exact arithmetic in a real quadratic field F = Q(sqrt(D)), D = 1 mod 4.

Elements are written a + b*w with w = (1 + sqrt(D))/2, so the ring of
integers is Z[w] and w^2 = w + (D - 1)/4. Fractional ideals are stored as a
2x2 integer Hermite normal form over the basis {1, w} plus a denominator.

Class number and narrow class number are assumed to be 1; everything that
needs a generator asserts it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, isqrt
from typing import Iterable, Union

from . import _linalg
from .errors import DyadicPrime, NoGenerator, NormTooLarge

Rational = Union[int, Fraction]

DEFAULT_FACTOR_BOUND = 10**6


def _is_squarefree(n: int) -> bool:
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, eq=False)
class FieldElement:
    """a + b*w in Q(sqrt(D)), exact."""

    a: Fraction
    b: Fraction
    D: int = 5

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.D != self.D:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(other, 0, self.D)
        return NotImplemented

    @property
    def _c(self) -> int:
        return (self.D - 1) // 4

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        bd = self.b * o.b
        return FieldElement(self.a * o.a + self._c * bd, self.a * o.b + self.b * o.a + bd, self.D)

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        return FieldElement(self.a + self.b, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b - self._c * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.b

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conjugate()
        return FieldElement(c.a / n, c.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(1, 0, self.D)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.D == other.D

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- predicates ---------------------------------------------------
    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_totally_positive(self) -> bool:
        # both conjugates positive <=> trace > 0 and norm > 0
        return self.trace() > 0 and self.norm() > 0

    def embeddings(self) -> tuple[float, float]:
        r = self.D**0.5
        return (float(self.a) + float(self.b) * (1 + r) / 2, float(self.a) + float(self.b) * (1 - r) / 2)

    # -- io -------------------------------------------------------------
    def to_json(self) -> list[str]:
        return [f"{self.a.numerator}/{self.a.denominator}", f"{self.b.numerator}/{self.b.denominator}"]

    @classmethod
    def from_json(cls, data, D: int = 5) -> "FieldElement":
        return cls(Fraction(data[0]), Fraction(data[1]), D)

    def __repr__(self):
        if self.b == 0:
            return str(self.a)
        bs = "" if abs(self.b) == 1 else str(abs(self.b))
        if self.a == 0:
            return f"{'-' if self.b < 0 else ''}{bs}w"
        return f"{self.a}{'-' if self.b < 0 else '+'}{bs}w"

    def sort_key(self):
        return (self.trace(), self.b, self.a)


_ELEMENT_RE = re.compile(r"^\s*([+-]?\s*[0-9/]*)\s*(?:([+-])\s*([0-9/]*)\s*\*?\s*w)?\s*$")


def parse_element(text: str, D: int = 5) -> FieldElement:
    """Parse '35+8w', '47-9w', 'w', '-3', or 'a,b'."""
    text = text.strip()
    if "," in text:
        a, b = text.split(",")
        return FieldElement(Fraction(a.strip()), Fraction(b.strip()), D)
    if text.endswith("w") and re.fullmatch(r"[+-]?[0-9/]*\*?w", text.replace(" ", "")):
        coeff = text.replace(" ", "").rstrip("w").rstrip("*")
        if coeff in ("", "+"):
            coeff = "1"
        elif coeff == "-":
            coeff = "-1"
        return FieldElement(0, Fraction(coeff), D)
    m = _ELEMENT_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse field element {text!r}")
    a = Fraction(m.group(1).replace(" ", "") or "0")
    if m.group(2) is None:
        return FieldElement(a, 0, D)
    b = Fraction(m.group(3) or "1")
    return FieldElement(a, b if m.group(2) == "+" else -b, D)


@dataclass(frozen=True)
class FieldIdeal:
    """Fractional ideal: rows of ``hnf`` / ``den`` are a Z-basis in {1, w}."""

    hnf: tuple[tuple[int, int], tuple[int, int]]
    den: int
    D: int = 5

    @classmethod
    def from_generators(cls, gens: Iterable[FieldElement], D: int = 5) -> "FieldIdeal":
        rows = []
        w = FieldElement(0, 1, D)
        for g in gens:
            g = g if isinstance(g, FieldElement) else FieldElement(g, 0, D)
            for h in (g, g * w):
                rows.append([h.a, h.b])
        basis, den = _linalg.rational_hnf(rows)
        if len(basis) != 2:
            raise ValueError("the zero ideal is not supported")
        return cls((tuple(basis[0]), tuple(basis[1])), den, D)

    def basis(self) -> list[FieldElement]:
        return [FieldElement(Fraction(r[0], self.den), Fraction(r[1], self.den), self.D) for r in self.hnf]

    def norm(self) -> Fraction:
        (p, q), (r, s) = self.hnf
        return Fraction(abs(p * s - q * r), self.den * self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def contains(self, x: FieldElement) -> bool:
        sol = _linalg.solve_left([[Fraction(v, self.den) for v in r] for r in self.hnf], [x.a, x.b])
        return sol is not None and all(c.denominator == 1 for c in sol)

    __contains__ = contains

    def __mul__(self, other):
        if isinstance(other, (FieldElement, int, Fraction)):
            other = FieldIdeal.from_generators([other], self.D)
        gens = [x * y for x in self.basis() for y in other.basis()]
        return FieldIdeal.from_generators(gens, self.D)

    __rmul__ = __mul__

    def conjugate(self) -> "FieldIdeal":
        return FieldIdeal.from_generators([x.conjugate() for x in self.basis()], self.D)

    def inverse(self) -> "FieldIdeal":
        return FieldIdeal.from_generators([x / self.norm() for x in self.conjugate().basis()], self.D)

    def __truediv__(self, other):
        if isinstance(other, (FieldElement, int, Fraction)):
            other = FieldIdeal.from_generators([other], self.D)
        return self * other.inverse()

    def __pow__(self, k: int) -> "FieldIdeal":
        base = self if k >= 0 else self.inverse()
        result = FieldIdeal.from_generators([1], self.D)
        for _ in range(abs(k)):
            result = result * base
        return result

    def is_subset(self, other: "FieldIdeal") -> bool:
        return all(other.contains(x) for x in self.basis())

    def divides(self, other: "FieldIdeal") -> bool:
        """self | other, i.e. other is contained in self."""
        return other.is_subset(self)

    def is_unit(self) -> bool:
        return self.den == 1 and self.norm() == 1

    def sort_key(self):
        return (self.norm(), self.hnf, self.den)

    def to_json(self) -> dict:
        return {"hnf": [list(r) for r in self.hnf], "den": self.den}

    @classmethod
    def from_json(cls, data, D: int = 5) -> "FieldIdeal":
        h = data["hnf"]
        return cls((tuple(h[0]), tuple(h[1])), int(data["den"]), D)

    def __repr__(self):
        try:
            g = totally_positive_generator(self)
            return f"({g})"
        except NoGenerator:
            return f"FieldIdeal({self.hnf}, den={self.den})"


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime of O: N = p^f; ``root`` is w mod P when f = 1."""

    p: int
    ideal: FieldIdeal
    f: int
    ramified: bool
    root: int | None = None

    @property
    def norm(self) -> int:
        return self.p**self.f

    @property
    def D(self) -> int:
        return self.ideal.D

    @cached_property
    def generator(self) -> FieldElement:
        return totally_positive_generator(self.ideal)

    def sort_key(self):
        return (self.norm, self.ideal.hnf)

    def __repr__(self):
        return f"P{self.norm}{self.ideal!r}"

    # -- residue field O/P --------------------------------------------
    def reduce(self, x: FieldElement):
        """Image of a P-integral x in O/P: an int (f=1) or a pair (f=2)."""
        p = self.p
        d = x.a.denominator * x.b.denominator // gcd(x.a.denominator, x.b.denominator)
        v = 0
        while d % p == 0:
            d //= p
            v += 1
        if v and self.f == 1 and not self.ramified:
            # split: p = pi * conj(pi) and conj(pi) is a unit at P
            s = FieldElement(d, 0, x.D) * self.generator.conjugate() ** v
            return self._mul_residue(self._reduce_integral(s * x), self._inverse_residue(self._reduce_integral(s)))
        z = x * d
        if not z.is_integral():
            raise ValueError(f"{x} is not integral at {self}")
        return self._mul_residue(self._reduce_integral(z), self._inverse_residue(d % p))

    def _reduce_integral(self, z: FieldElement):
        if not z.is_integral():
            raise ValueError(f"{z} is not integral at {self}")
        A, B = int(z.a), int(z.b)
        if self.f == 1:
            return (A + B * self.root) % self.p
        return (A % self.p, B % self.p)

    def _mul_residue(self, u, v):
        if self.f == 1:
            if isinstance(v, tuple):
                v = v[0]
            return u * v % self.p
        if isinstance(v, int):
            v = (v, 0)
        return self._fp2_mul(u, v)

    def _inverse_residue(self, u):
        if self.f == 1:
            if isinstance(u, tuple):
                u = u[0]
            return pow(u, -1, self.p)
        if isinstance(u, int):
            u = (u, 0)
        return self.residue_power(u, self.norm - 2)

    def residue_elements(self) -> list[FieldElement]:
        """Representatives of O/P."""
        D = self.D
        if self.f == 1:
            return [FieldElement(a, 0, D) for a in range(self.p)]
        return [FieldElement(a, b, D) for b in range(self.p) for a in range(self.p)]

    def _fp2_mul(self, u, v):
        c = (self.D - 1) // 4
        p = self.p
        bd = u[1] * v[1]
        return ((u[0] * v[0] + c * bd) % p, (u[0] * v[1] + u[1] * v[0] + bd) % p)

    def residue_power(self, r, k: int):
        if self.f == 1:
            return pow(r, k, self.p)
        result = (1, 0)
        base = r
        while k:
            if k & 1:
                result = self._fp2_mul(result, base)
            base = self._fp2_mul(base, base)
            k >>= 1
        return result

    def contains(self, x: FieldElement) -> bool:
        return self.ideal.contains(x)


class QuadraticField:
    """Q(sqrt(D)) for squarefree D = 1 mod 4, with its ring Z[w]."""

    def __init__(self, D: int = 5, factor_bound: int = DEFAULT_FACTOR_BOUND):
        if D <= 1 or D % 4 != 1 or not _is_squarefree(D):
            raise ValueError("D must be squarefree, > 1, and 1 mod 4")
        self.D = D
        self.c = (D - 1) // 4
        self.factor_bound = factor_bound

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.D == self.D

    def __hash__(self):
        return hash(("QuadraticField", self.D))

    def __repr__(self):
        return f"QuadraticField({self.D})"

    def __call__(self, a: Rational = 0, b: Rational = 0) -> FieldElement:
        return FieldElement(a, b, self.D)

    @property
    def omega(self) -> FieldElement:
        return FieldElement(0, 1, self.D)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, 0, self.D)

    def ideal(self, *gens) -> FieldIdeal:
        return FieldIdeal.from_generators([g if isinstance(g, FieldElement) else self(g) for g in gens], self.D)

    @property
    def unit_ideal(self) -> FieldIdeal:
        return self.ideal(1)

    def parse(self, text: str) -> FieldElement:
        return parse_element(text, self.D)

    @cached_property
    def fundamental_unit(self) -> FieldElement:
        """Smallest unit > 1 in the first embedding."""
        for b in range(1, 100000):
            found = []
            for s in (1, -1):
                disc = b * b + 4 * (self.c * b * b + s)
                if disc < 0:
                    continue
                r = isqrt(disc)
                if r * r != disc:
                    continue
                for num in (-b + r, -b - r):
                    if num % 2 == 0:
                        u = self(num // 2, b)
                        if u.embeddings()[0] > 1:
                            found.append(u)
            if found:
                return min(found, key=lambda u: u.embeddings()[0])
        raise RuntimeError("fundamental unit search failed")

    def totally_positive_unit_reps(self) -> list[FieldElement]:
        """Representatives of O^{x,+} / (O^x)^2."""
        e = self.fundamental_unit
        if e.norm() == -1:
            return [self.one]
        return [self.one, e if e.is_totally_positive() else -e]

    def kronecker(self, p: int) -> int:
        """Splitting type of the rational prime p: 1 split, -1 inert, 0 ramified."""
        if self.D % p == 0:
            return 0
        if p == 2:
            return 1 if self.D % 8 == 1 else -1
        return 1 if pow(self.D, (p - 1) // 2, p) == 1 else -1

    def primes_above(self, p: int) -> list[PrimeIdeal]:
        roots = [r for r in range(p) if (r * r - r - self.c) % p == 0]
        kind = self.kronecker(p)
        if kind == -1:
            return [PrimeIdeal(p, self.ideal(p), 2, False, None)]
        if kind == 0:
            r = roots[0]
            return [PrimeIdeal(p, self.ideal(p, self(-r, 1)), 1, True, r)]
        primes = [PrimeIdeal(p, self.ideal(p, self(-r, 1)), 1, False, r) for r in roots]
        return sorted(primes, key=lambda P: P.ideal.hnf)

    def primes_up_to(self, bound: int) -> list[PrimeIdeal]:
        """All prime ideals of norm <= bound, sorted by (norm, hnf)."""
        out = []
        for p in range(2, bound + 1):
            if all(p % q for q in range(2, isqrt(p) + 1)):
                for P in self.primes_above(p):
                    if P.norm <= bound:
                        out.append(P)
        return sorted(out, key=PrimeIdeal.sort_key)

    def prime_of(self, ideal: FieldIdeal) -> PrimeIdeal:
        """The PrimeIdeal record for a prime FieldIdeal."""
        n = ideal.norm()
        p = n.numerator
        for q in range(2, isqrt(p) + 1):
            if p % q == 0:
                p = q
                break
        for P in self.primes_above(p):
            if P.ideal == ideal:
                return P
        raise ValueError(f"{ideal} is not prime")

    def ideals_up_to(self, bound: int) -> list[FieldIdeal]:
        """Integral ideals of norm <= bound, sorted by (norm, hnf)."""
        primes = self.primes_up_to(bound)
        out = []

        def rec(i, cur, n):
            out.append(cur)
            for j in range(i, len(primes)):
                P = primes[j]
                if n * P.norm > bound:
                    if P.norm > bound:
                        break
                    continue
                rec(j, cur * P.ideal, n * P.norm)

        rec(0, self.unit_ideal, 1)
        return sorted(set(out), key=FieldIdeal.sort_key)


# -- module-level operations ---------------------------------------------


def is_totally_positive(x: FieldElement) -> bool:
    return x.is_totally_positive()


def _rational_factor(n: int, bound: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        if d > bound:
            raise NormTooLarge(f"cannot factor {n} below trial-division bound {bound}")
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        if n > bound:
            raise NormTooLarge(f"prime factor {n} exceeds trial-division bound {bound}")
        out[n] = out.get(n, 0) + 1
    return out


def factor_ideal(a: FieldIdeal, bound: int = DEFAULT_FACTOR_BOUND) -> list[tuple[PrimeIdeal, int]]:
    """Prime factorization of a nonzero fractional ideal; exponents may be negative."""
    K = QuadraticField(a.D, bound)
    num = a * a.den
    exps: dict[PrimeIdeal, int] = {}
    for part, sign in ((num, 1), (K.ideal(a.den), -1)):
        n = part.norm()
        assert n.denominator == 1
        cur = part
        for p in sorted(_rational_factor(int(n), bound)):
            for P in K.primes_above(p):
                inv = P.ideal.inverse()
                while cur.is_subset(P.ideal):
                    cur = cur * inv
                    exps[P] = exps.get(P, 0) + sign
        if not cur.is_unit():
            raise RuntimeError("factorization did not terminate at the unit ideal")
    return sorted(((P, e) for P, e in exps.items() if e), key=lambda t: t[0].sort_key())


def divisors(m: FieldIdeal, bound: int = DEFAULT_FACTOR_BOUND) -> list[FieldIdeal]:
    """All integral divisors of the integral ideal m, sorted by (norm, hnf)."""
    if not m.is_integral():
        raise ValueError("divisors() needs an integral ideal")
    fac = factor_ideal(m, bound)
    out = []
    for exps in product(*[range(e + 1) for _, e in fac]):
        d = QuadraticField(m.D).unit_ideal
        for (P, _), k in zip(fac, exps):
            if k:
                d = d * (P.ideal**k)
        out.append(d)
    return sorted(out, key=FieldIdeal.sort_key)


def residue_symbol(x: FieldElement, P: PrimeIdeal) -> int:
    """Quadratic residue symbol (x / P) for odd P; 0 when P | x."""
    if P.p == 2:
        raise DyadicPrime(f"residue symbol at dyadic prime {P}")
    r = P.reduce(x)
    if r == 0 or r == (0, 0):
        return 0
    e = P.residue_power(r, (P.norm - 1) // 2)
    one = 1 if P.f == 1 else (1, 0)
    return 1 if e == one else -1


def epsilon_xi(xi: FieldElement, P: PrimeIdeal) -> int:
    """Value at P of the quadratic character of F(sqrt(-xi))/F (0 if ramified)."""
    return residue_symbol(-xi, P)


def is_square_mod_4(x: FieldElement) -> bool:
    """Whether x is congruent to a square modulo 4O (x integral)."""
    D = x.D
    for a in range(4):
        for b in range(4):
            s = FieldElement(a, b, D)
            if ((x - s * s) / 4).is_integral():
                return True
    return False


def is_fundamental_discriminant(delta: FieldElement, bound: int = DEFAULT_FACTOR_BOUND) -> bool:
    """delta is a square mod 4O and no square factor can be removed keeping that."""
    if not delta.is_integral() or not delta:
        return False
    if not is_square_mod_4(delta):
        return False
    K = QuadraticField(delta.D, bound)
    fac = factor_ideal(K.ideal(delta), bound)
    ranges = [range(e // 2 + 1) for _, e in fac]
    for exps in product(*ranges):
        if not any(exps):
            continue
        q = K.unit_ideal
        for (P, _), k in zip(fac, exps):
            q = q * (P.ideal**k)
        gamma = ideal_generator(q)
        if is_square_mod_4(delta / (gamma * gamma)):
            return False
    return True


def _trace_square_gram(ideal: FieldIdeal) -> list[list[Fraction]]:
    basis = ideal.basis()
    return [[(x * y).trace() for y in basis] for x in basis]


def ideal_generator(a: FieldIdeal) -> FieldElement:
    """Some generator of a principal ideal, found as a short vector of Tr(x^2)."""
    from .lattice import enumerate_short

    n = a.norm()
    gram = _trace_square_gram(a)
    basis = a.basis()
    K = QuadraticField(a.D)
    eps = K.fundamental_unit.embeddings()[0]
    bound = 2 * n
    limit = 2 * n * (eps * eps + 4)
    while True:
        for sv in enumerate_short(gram, bound):
            x = sv.vector[0] * basis[0] + sv.vector[1] * basis[1]
            if abs(x.norm()) == n:
                return x
        if bound > limit:
            raise NoGenerator(f"no generator found for {a.hnf}/{a.den}")
        bound *= 2


def canonical_totally_positive(g: FieldElement) -> FieldElement:
    """Trace-minimal element of g * (O^x)^2 (g totally positive)."""
    K = QuadraticField(g.D)
    e2 = K.fundamental_unit ** 2
    e2i = e2.inverse()
    while (g * e2).sort_key() < g.sort_key():
        g = g * e2
    while (g * e2i).sort_key() < g.sort_key():
        g = g * e2i
    return g


def totally_positive_generator(a: FieldIdeal) -> FieldElement:
    """Totally positive generator of a, canonical up to squares of units."""
    g = ideal_generator(a)
    if g.norm() < 0:
        e = QuadraticField(a.D).fundamental_unit
        if e.norm() > 0:
            raise NoGenerator("ideal has no totally positive generator (narrow class)")
        g = g * e
    if g.trace() < 0:
        g = -g
    g = canonical_totally_positive(g)
    assert g.is_totally_positive()
    return g


def enumerate_totally_positive(T: int, D: int = 5) -> list[FieldElement]:
    """Integral totally positive x with Tr(x) <= T, sorted by (trace, b)."""
    out = []
    for t in range(1, T + 1):
        # x = (t + b sqrt(D))/2, need t^2 > D b^2 and b = t mod 2
        bmax = isqrt((t * t - 1) // D) if t * t > D else 0
        for b in range(-bmax, bmax + 1):
            if (t - b) % 2 or D * b * b >= t * t:
                continue
            out.append(FieldElement((t - b) // 2, b, D))
    return out
