"""Shimura lift as a finite Dirichlet convolution, and the elliptic-curve side.

The lift of a coefficient table f at xi, with xi O = q^2 r, is

    c(m) = sum_{d e = m} lambda(xi, q^-1 d, f) chi(e) / N(e),

where chi = (psi eps_xi)* with psi trivial (class number one), so
chi(P) = eps_xi(P) = (-xi/P), extended multiplicatively and set to 0 on ideals
meeting 2 c xi (c the level). The series returned by ``shimura_lift`` is renormalized by N(m),
which puts it on the same scale as the newform coefficients a_m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .brandt import ClassVector, order_level
from .errors import BadReduction, DegenerateRatio, IndexSetTooSmall, MissingBadPrime
from .halfint import ThetaEngine, ThetaTable, _generator, kohnen_admissible, theta_of
from .numfield import (
    FieldElement,
    FieldIdeal,
    PrimeIdeal,
    QuadraticField,
    epsilon_xi,
    factor_ideal,
    is_fundamental_discriminant,
)


# -- ideal-indexed series ------------------------------------------------------------


@dataclass
class IdealSeries:
    """Truncation of sum c(m) M(m) to integral ideals of norm <= bound."""

    bound: int
    entries: dict = field(default_factory=dict)
    D: int = 5

    def __getitem__(self, m: FieldIdeal) -> Fraction:
        return self.entries.get(m, Fraction(0))

    def __mul__(self, other: "IdealSeries") -> "IdealSeries":
        bound = min(self.bound, other.bound)
        out: dict = {}
        for d, x in self.entries.items():
            if not x:
                continue
            nd = d.norm()
            for e, y in other.entries.items():
                if y and nd * e.norm() <= bound:
                    m = d * e
                    out[m] = out.get(m, Fraction(0)) + x * y
        return IdealSeries(bound, {m: c for m, c in out.items() if c}, self.D)

    def __add__(self, other: "IdealSeries") -> "IdealSeries":
        out = dict(self.entries)
        for m, c in other.entries.items():
            out[m] = out.get(m, Fraction(0)) + c
        return IdealSeries(min(self.bound, other.bound), {m: c for m, c in out.items() if c}, self.D)

    def scale(self, c) -> "IdealSeries":
        c = Fraction(c)
        return IdealSeries(self.bound, {m: c * v for m, v in self.entries.items() if c * v}, self.D)

    def __eq__(self, other):
        if not isinstance(other, IdealSeries):
            return NotImplemented
        a = {m: c for m, c in self.entries.items() if c}
        b = {m: c for m, c in other.entries.items() if c}
        return self.bound == other.bound and a == b

    @classmethod
    def delta(cls, bound: int, D: int = 5) -> "IdealSeries":
        return cls(bound, {QuadraticField(D).unit_ideal: Fraction(1)}, D)

    @classmethod
    def from_function(cls, fn: Callable[[FieldIdeal], object], bound: int, D: int = 5) -> "IdealSeries":
        out = {}
        for m in QuadraticField(D).ideals_up_to(bound):
            v = Fraction(fn(m))
            if v:
                out[m] = v
        return cls(bound, out, D)

    def sorted_items(self):
        return sorted(self.entries.items(), key=lambda t: t[0].sort_key())

    def to_json(self) -> list:
        return [[_generator(m).to_json(), str(c.numerator), str(c.denominator)] for m, c in self.sorted_items()]


# -- the lift ------------------------------------------------------------------------


def xi_factor(xi: FieldElement) -> tuple[FieldIdeal, FieldIdeal]:
    """xi O = q^2 r with r squarefree."""
    K = QuadraticField(xi.D)
    q, r = K.unit_ideal, K.unit_ideal
    for P, e in factor_ideal(K.ideal(xi)):
        if e // 2:
            q = q * P.ideal ** (e // 2)
        if e % 2:
            r = r * P.ideal
    return q, r


def dyadic_epsilon(xi: FieldElement, P: PrimeIdeal) -> int:
    """eps_xi at a dyadic P with -xi = s^2 + 4t, s a unit at P: the splitting of
    x^2 + s x + t over O/P. Returns 0 when no such s exists (ramified or non-fundamental)."""
    D = xi.D
    for a in range(4):
        for b in range(4):
            s = FieldElement(a, b, D)
            t = (-xi - s * s) / 4
            if not t.is_integral() or P.contains(s):
                continue
            k = _ResidueField(P)
            S, T = k.encode(s), k.encode(t)
            roots = sum(1 for x in range(k.q) if k.add(k.mul(x, x), k.add(k.mul(S, x), T)) == 0)
            return 1 if roots else -1
    return 0


def lift_character(xi: FieldElement, level: FieldIdeal | None = None, dyadic: str = "zero") -> Callable[[PrimeIdeal], int]:
    """P -> eps_xi(P) = (-xi/P); 0 at P | c xi, and at dyadic P unless ``dyadic="split"``."""

    def chi(P: PrimeIdeal) -> int:
        if level is not None and level.is_subset(P.ideal):
            return 0
        if P.p == 2:
            return dyadic_epsilon(xi, P) if dyadic == "split" else 0
        return epsilon_xi(xi, P)

    return chi


def character_series(xi: FieldElement, bound: int, level: FieldIdeal | None = None, dyadic: str = "zero") -> IdealSeries:
    """sum chi(m) N(m)^-1 M(m)."""
    chi = lift_character(xi, level, dyadic)
    K = QuadraticField(xi.D)
    cache: dict = {}

    def value(m: FieldIdeal):
        out = Fraction(1)
        for P, e in factor_ideal(m):
            if P not in cache:
                cache[P] = chi(P)
            out *= cache[P] ** e
            if not out:
                return 0
        return out / m.norm()

    return IdealSeries.from_function(value, bound, K.D)


def lift_ideals(xi: FieldElement, bound: int) -> list[FieldIdeal]:
    """Index ideals q^-1 d (N(d) <= bound) needed to lift at xi."""
    q, _ = xi_factor(xi)
    qinv = q.inverse()
    return [qinv * d for d in QuadraticField(xi.D).ideals_up_to(bound)]


def shimura_lift(f: ThetaTable, xi: FieldElement, bound: int, level: FieldIdeal | None = None,
                 renormalize: bool = True, dyadic: str = "zero") -> IdealSeries:
    """Coefficients c(m, Shim_xi(f)) for N(m) <= bound.

    With ``renormalize`` each c(m) of the convolution is multiplied by N(m);
    without it the raw convolution is returned.
    """
    q, _ = xi_factor(xi)
    qinv = q.inverse()
    K = QuadraticField(xi.D)
    lam = {}
    for d in K.ideals_up_to(bound):
        a = qinv * d
        if not f.has(xi, a):
            raise IndexSetTooSmall(f"lambda({xi}, {a}) missing for the lift")
        v = f.value(xi, a)
        if v:
            lam[d] = v
    raw = IdealSeries(bound, lam, K.D) * character_series(xi, bound, level, dyadic)
    if not renormalize:
        return raw
    return IdealSeries(bound, {m: c * m.norm() for m, c in raw.entries.items()}, K.D)


def lift_of_vector(v: ClassVector, xi: FieldElement, bound: int, engine: ThetaEngine | None = None,
                   renormalize: bool = True, dyadic: str = "zero") -> IdealSeries:
    """Build the needed theta columns for xi and lift them at the level of the order."""
    table = theta_of(v, 0, ideals=lift_ideals(xi, bound), engine=engine, xis=[xi])
    return shimura_lift(table, xi, bound, order_level(v.classes.order), renormalize, dyadic)


# -- elliptic curve ------------------------------------------------------------------


class _ResidueField:
    """O/P with elements encoded as ints: a (f = 1) or a + p b (f = 2)."""

    def __init__(self, P: PrimeIdeal):
        self.P = P
        self.p = P.p
        self.q = P.norm
        self.f = P.f
        self.c = (P.D - 1) // 4  # w^2 = w + c

    def encode(self, x: FieldElement) -> int:
        r = self.P.reduce(x)
        return r if self.f == 1 else r[0] + self.p * r[1]

    def add(self, u: int, v: int) -> int:
        if self.f == 1:
            return (u + v) % self.p
        p = self.p
        return (u % p + v % p) % p + p * ((u // p + v // p) % p)

    def mul(self, u: int, v: int) -> int:
        if self.f == 1:
            return u * v % self.p
        p = self.p
        a, b, c, d = u % p, u // p, v % p, v // p
        bd = b * d
        return (a * c + self.c * bd) % p + p * ((a * d + b * c + bd) % p)


@dataclass
class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F."""

    a1: FieldElement
    a2: FieldElement
    a3: FieldElement
    a4: FieldElement
    a6: FieldElement
    conductor: FieldIdeal
    bad_coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.discriminant():
            raise ValueError("singular Weierstrass equation")

    @property
    def coefficients(self) -> list[FieldElement]:
        return [self.a1, self.a2, self.a3, self.a4, self.a6]

    def discriminant(self) -> FieldElement:
        a1, a2, a3, a4, a6 = self.coefficients
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @classmethod
    def from_json(cls, data: dict, D: int = 5) -> "EllipticCurve":
        K = QuadraticField(D)
        co = [FieldElement.from_json(data[k], D) for k in ("a1", "a2", "a3", "a4", "a6")]
        bad = {}
        for item in data.get("bad_coefficients", []):
            P = K.prime_of(K.ideal(FieldElement.from_json(item["prime"], D)))
            bad[P] = int(item["value"])
        return cls(*co, conductor=K.ideal(FieldElement.from_json(data["conductor"], D)), bad_coefficients=bad)

    @classmethod
    def load(cls, path, D: int = 5) -> "EllipticCurve":
        with open(path) as fh:
            return cls.from_json(json.load(fh), D)

    def to_json(self) -> dict:
        return {
            "a1": self.a1.to_json(), "a2": self.a2.to_json(), "a3": self.a3.to_json(),
            "a4": self.a4.to_json(), "a6": self.a6.to_json(),
            "conductor": _generator(self.conductor).to_json(),
            "bad_coefficients": [{"prime": P.generator.to_json(), "value": v}
                                 for P, v in sorted(self.bad_coefficients.items(), key=lambda t: t[0].sort_key())],
        }

    def count_points(self, P: PrimeIdeal) -> int:
        """#E(O/P), including the point at infinity."""
        k = _ResidueField(P)
        a1, a2, a3, a4, a6 = (k.encode(a) for a in self.coefficients)
        q = k.q
        # number of y with y^2 + s y = t, tabulated over (s, t) lazily per s
        count = 1
        for x in range(q):
            s = k.add(k.mul(a1, x), a3)
            x2 = k.mul(x, x)
            t = k.add(k.add(k.mul(x2, x), k.mul(a2, x2)), k.add(k.mul(a4, x), a6))
            for y in range(q):
                if k.add(k.mul(y, y), k.mul(s, y)) == t:
                    count += 1
        return count


def curve_ap(E: EllipticCurve, P: PrimeIdeal) -> int:
    """a_P = N(P) + 1 - #E(O/P) at a prime of good reduction."""
    if E.conductor.is_subset(P.ideal):
        raise BadReduction(f"{P} divides the conductor")
    ap = P.norm + 1 - E.count_points(P)
    assert ap * ap <= 4 * P.norm, "Hasse bound violated"
    return ap


def prime_power_coefficient(ap: int, norm: int, k: int, bad: bool = False) -> int:
    """a_{P^k}: ap^k at a bad prime, else a_{P^(j+2)} = ap a_{P^(j+1)} - N(P) a_{P^j}."""
    if bad:
        return ap**k
    prev, cur = 1, ap
    if k == 0:
        return 1
    for _ in range(k - 1):
        prev, cur = cur, ap * cur - norm * prev
    return cur


def newform_coeffs(E: EllipticCurve, a_bad: dict | None = None, bound: int = 200) -> IdealSeries:
    """a_m for integral m with N(m) <= bound, extended multiplicatively from a_P."""
    a_bad = dict(E.bad_coefficients if a_bad is None else a_bad)
    K = QuadraticField(E.conductor.D)
    bad_primes = [P for P, _ in factor_ideal(E.conductor)]
    for P in bad_primes:
        if P not in a_bad:
            raise MissingBadPrime(f"no coefficient supplied for bad prime {P}")
    ap: dict = {}

    def a_pk(P: PrimeIdeal, k: int) -> int:
        if P not in ap:
            ap[P] = a_bad[P] if P in a_bad else curve_ap(E, P)
        return prime_power_coefficient(ap[P], P.norm, k, P in a_bad)

    def coeff(m: FieldIdeal) -> int:
        out = 1
        for P, e in factor_ideal(m):
            out *= a_pk(P, e)
        return out

    return IdealSeries.from_function(coeff, bound, K.D)


# -- zeros, the Waldspurger factor, and the level check ----------------------------------


@dataclass
class ZeroReport:
    """Zero coefficients of theta([R]) - theta([I]) at fundamental -xi."""

    T: int
    trivial: list = field(default_factory=list)
    nontrivial: list = field(default_factory=list)
    nonzero_count: int = 0

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "trivial": [x.to_json() for x in self.trivial],
            "nontrivial": [x.to_json() for x in self.nontrivial],
            "nonzero_count": self.nonzero_count,
        }


def fundamental_admissible(T: int, D: int = 5) -> list[FieldElement]:
    from .halfint import xi_range

    return [x for x in xi_range(T, D, include_zero=False) if kohnen_admissible(x) and is_fundamental_discriminant(-x)]


def classify_zeros(fR: ThetaTable, fI: ThetaTable, T: int) -> ZeroReport:
    """Split the zeros of lambda_R - lambda_I over fundamental -xi with Tr(xi) <= T."""
    K = QuadraticField(fR.ideals[0].D)
    O = K.unit_ideal
    report = ZeroReport(T)
    for xi in fundamental_admissible(T, K.D):
        r, i = fR.value(xi, O), fI.value(xi, O)
        if r != i:
            report.nonzero_count += 1
        elif r == 0:
            report.trivial.append(xi)
        else:
            report.nontrivial.append(xi)
    return report


def waldspurger_factor(xi: FieldElement, E: EllipticCurve, a_bad: dict | None = None) -> int:
    """prod over P | conductor of (c(P, g) - eps_xi(P))."""
    a_bad = dict(E.bad_coefficients if a_bad is None else a_bad)
    out = 1
    for P, _ in factor_ideal(E.conductor):
        if P not in a_bad:
            raise MissingBadPrime(f"no coefficient supplied for bad prime {P}")
        out *= a_bad[P] - (epsilon_xi(xi, P) if P.p != 2 else 0)
    return out


def _is_odd(m: FieldIdeal) -> bool:
    return m.norm() % 2 == 1


def level_check(lift: IdealSeries, g: IdealSeries) -> tuple[Fraction, Fraction]:
    """alpha from the least odd m with a_m != 0, and max |c(m) - alpha a_m| over even m."""
    bound = min(lift.bound, g.bound)
    K = QuadraticField(g.D)
    ideals = K.ideals_up_to(bound)
    alpha = None
    for m in ideals:
        if _is_odd(m) and g[m]:
            alpha = lift[m] / g[m]
            break
    if alpha is None or (not alpha and not any(lift[m] for m in ideals)):
        raise DegenerateRatio("no usable odd coefficient to fix the ratio")
    residual = max((abs(lift[m] - alpha * g[m]) for m in ideals if not _is_odd(m)), default=Fraction(0))
    return alpha, residual


def odd_proportional(lift: IdealSeries, g: IdealSeries, alpha: Fraction) -> list[FieldIdeal]:
    """Odd ideals where c(m) != alpha a_m (empty means proportional)."""
    bound = min(lift.bound, g.bound)
    return [m for m in QuadraticField(g.D).ideals_up_to(bound) if _is_odd(m) and lift[m] != alpha * g[m]]
