"""Coefficients of half-integral weight forms coming from ternary theta series.

For a class [I] the coefficient table of its theta series is

    lambda(xi, a, theta_I) = N(a)^-1 #{[x] in a^-1 L_I : -Delta(x) = xi},

and with a = gO, x -> g x turns this into a count of -Delta = g^2 xi on L_I.
Everything here is an exact rational.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .brandt import BrandtMatrix, ClassSet, ClassVector, p_neighbors
from .errors import IndexSetTooSmall
from .numfield import (
    FieldElement,
    FieldIdeal,
    PrimeIdeal,
    QuadraticField,
    enumerate_totally_positive,
    is_square_mod_4,
    residue_symbol,
    totally_positive_generator,
)
from .quatalg import TernaryLattice


def kohnen_admissible(xi: FieldElement) -> bool:
    """-xi is a square modulo 4O."""
    return is_square_mod_4(-xi)


def a_count(xi: FieldElement, a: FieldIdeal, L: TernaryLattice) -> int:
    """#{[x] in a^-1 L : -Delta(x) = xi}, counted as -Delta = g^2 xi on L."""
    if not xi:
        return 1
    g = totally_positive_generator(a)
    return L.count_representations(g * g * xi)


def a_count_literal(xi: FieldElement, a: FieldIdeal, L: TernaryLattice) -> int:
    """Same count, but enumerating the scaled lattice a^-1 L itself."""
    if not xi:
        return 1
    g = totally_positive_generator(a)
    return L.scaled(g.inverse()).count_representations(xi)


class ThetaEngine:
    """Cached representation counts for the ternary lattices of a class set.

    Counts with Tr(eta) inside the Fincke-Pohst table come from the table;
    larger eta go to the embedding-guided counter.
    """

    def __init__(self, classes: ClassSet, table_bound: int = 0):
        self.classes = classes
        self.lattices = [TernaryLattice(J.right_order()) for J in classes.reps]
        self.table_bound = 0
        self.tables: list[dict] = [{} for _ in self.lattices]
        self._cache: dict = {}
        if table_bound:
            self.ensure_table(table_bound)

    def ensure_table(self, bound: int) -> None:
        if bound > self.table_bound:
            self.tables = [L.value_table(bound) for L in self.lattices]
            self.table_bound = bound

    def count(self, i: int, eta: FieldElement) -> int:
        if not eta:
            return 1
        if not eta.is_integral() or not eta.is_totally_positive():
            return 0
        if eta.trace() <= self.table_bound:
            return self.tables[i].get(eta, 0)
        key = (i, eta)
        if key not in self._cache:
            self._cache[key] = self.lattices[i].count_representations(eta)
        return self._cache[key]

    def a_count(self, xi: FieldElement, a: FieldIdeal, i: int) -> int:
        if not xi:
            return 1
        g = _generator(a)
        return self.count(i, g * g * xi)


_GEN_CACHE: dict = {}


def _generator(a: FieldIdeal) -> FieldElement:
    if a not in _GEN_CACHE:
        _GEN_CACHE[a] = totally_positive_generator(a)
    return _GEN_CACHE[a]


@dataclass
class ThetaTable:
    """lambda(xi, a, f) for integral xi with Tr(xi) <= T and a in ``ideals``."""

    T: int
    ideals: list[FieldIdeal]
    entries: dict = field(default_factory=dict)
    label: str = ""
    header: dict = field(default_factory=dict)

    def value(self, xi: FieldElement, a: FieldIdeal) -> Fraction:
        key = (xi, a)
        if key not in self.entries:
            raise IndexSetTooSmall(f"lambda({xi}, {a}) is not in the table")
        return self.entries[key]

    def has(self, xi: FieldElement, a: FieldIdeal) -> bool:
        return (xi, a) in self.entries

    def xis(self) -> list[FieldElement]:
        seen = {xi for xi, _ in self.entries}
        return sorted(seen, key=lambda x: x.sort_key())

    def column(self, a: FieldIdeal) -> dict[FieldElement, Fraction]:
        return {xi: v for (xi, b), v in self.entries.items() if b == a}

    def __add__(self, other: "ThetaTable") -> "ThetaTable":
        keys = set(self.entries) & set(other.entries)
        return ThetaTable(min(self.T, other.T), [a for a in self.ideals if a in other.ideals],
                          {k: self.entries[k] + other.entries[k] for k in keys})

    def scale(self, c) -> "ThetaTable":
        c = Fraction(c)
        return ThetaTable(self.T, list(self.ideals), {k: c * v for k, v in self.entries.items()}, self.label)

    def sorted_entries(self):
        def key(item):
            (xi, a), _ = item
            return (xi.trace(), xi.a, xi.b, a.sort_key())

        return sorted(self.entries.items(), key=key)

    def to_json(self) -> dict:
        rows = []
        for (xi, a), v in self.sorted_entries():
            g = _generator(a)
            rows.append([str(xi.a), str(xi.b), g.to_json(), str(v.numerator), str(v.denominator)])
        header = dict(self.header)
        header.update({"T": self.T, "index_ideals": [_generator(a).to_json() for a in self.ideals], "label": self.label})
        return {"header": header, "entries": rows}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def xi_range(T: int, D: int = 5, include_zero: bool = True) -> list[FieldElement]:
    xs = enumerate_totally_positive(T, D) if T >= 1 else []
    return ([FieldElement(0, 0, D)] if include_zero else []) + xs


def theta_of(v: ClassVector, T: int, ideals: Sequence[FieldIdeal] | None = None, engine: ThetaEngine | None = None,
             admissible_only: bool = False, xis: Iterable[FieldElement] | None = None) -> ThetaTable:
    """Coefficient table of theta(v) = sum_i v_i theta_{I_i}.

    With ``admissible_only`` the counts are computed only for admissible xi
    (the others are recorded as 0); the O-column is always computed in full
    when the Fincke-Pohst table covers it.
    """
    S = v.classes
    engine = engine or ThetaEngine(S)
    K = QuadraticField(S.order.algebra.field.D)
    ideals = list(ideals) if ideals is not None else [K.unit_ideal]
    xs = list(xis) if xis is not None else xi_range(T, K.D)
    table = ThetaTable(T, ideals, label=",".join(str(c) for c in v.coeffs))
    for a in ideals:
        norm_inv = 1 / a.norm()
        for xi in xs:
            if admissible_only and xi and not kohnen_admissible(xi) and not (a.is_unit() and T <= engine.table_bound):
                table.entries[(xi, a)] = Fraction(0)
                continue
            total = Fraction(0)
            for i, c in enumerate(v.coeffs):
                if c:
                    total += c * engine.a_count(xi, a, i)
            table.entries[(xi, a)] = total * norm_inv
    return table


def psi_star(P: PrimeIdeal) -> int:
    """psi*(P) = (-1 / P) for odd P."""
    return residue_symbol(FieldElement(-1, 0, P.D), P)


def half_hecke(f: ThetaTable, P: PrimeIdeal) -> ThetaTable:
    """T_P on coefficients:

    lambda(xi, m, T_P f) = N(P) lambda(xi, P m) + psi*(P) (xi c^2 / P) lambda(xi, m)
                           + psi*(P^2) lambda(xi, P^-1 m),

    for every index ideal m with P m and P^-1 m also indexed (c generates m).
    """
    Pinv = P.ideal.inverse()
    chi = psi_star(P)
    out = ThetaTable(f.T, [], label=f"T{P.norm}({f.label})")
    for m in f.ideals:
        up, down = P.ideal * m, Pinv * m
        if up not in f.ideals or down not in f.ideals:
            continue
        c = _generator(m)
        out.ideals.append(m)
        for xi in f.xis():
            if not f.has(xi, m):
                continue
            sym = residue_symbol(xi * c * c, P) if xi else 0
            out.entries[(xi, m)] = (P.norm * f.value(xi, up) + chi * sym * f.value(xi, m) + chi * chi * f.value(xi, down))
    if not out.ideals:
        raise IndexSetTooSmall(f"table lacks the columns needed for T at {P}")
    return out


def apply_brandt(T: BrandtMatrix, v: ClassVector) -> ClassVector:
    return T.apply(v)


def e_xi(xi: FieldElement, S: ClassSet, engine: ThetaEngine | None = None) -> ClassVector:
    """e_xi = sum_J a(xi, O, [J]) / <[J],[J]> [J]."""
    engine = engine or ThetaEngine(S)
    K = QuadraticField(xi.D)
    return S.vector([Fraction(engine.a_count(xi, K.unit_ideal, i), S.weights[i]) for i in range(len(S))])


# -- neighbor counting around a class ------------------------------------------------


def neighbor_membership(I_index: int, S: ClassSet, P: PrimeIdeal, samples: int = 20, seed: int = 0):
    """Sample [x] in P^-1 L_I; return (x, observed count, case, allowed values).

    The observed count is #{J in t_P(I) : [x] in L_J}; the allowed values come
    from the three cases x in P L_I, x in L_I - P L_I, x in P^-1 L_I - L_I.
    """
    I = S.reps[I_index]
    L = TernaryLattice(I.right_order())
    pi = P.generator
    Linv = L.scaled(pi.inverse())
    Lp = L.scaled(pi)
    nbr_lattices = [TernaryLattice(J.right_order()) for J in p_neighbors(I, P, S.order)]
    rng = random.Random(seed)
    out = []
    kinds = ["inner", "middle", "outer"]
    for s in range(samples):
        # cycle through the three cases so each is exercised
        kind = kinds[s % 3]
        base = {"inner": Lp, "middle": L, "outer": Linv}[kind]
        for _ in range(1000):
            coeffs = [rng.randint(-3, 3) for _ in range(6)]
            x = base.combine(coeffs)
            if not any(x):
                continue
            if kind == "middle" and Lp.contains(x):
                continue
            if kind == "outer" and L.contains(x):
                continue
            break
        observed = sum(1 for LJ in nbr_lattices if LJ.contains(x))
        if kind == "inner":
            allowed = {1 + P.norm}
        elif kind == "middle":
            delta = -L.minus_delta(x)
            allowed = {1 + residue_symbol(delta, P)}
        else:
            allowed = {0, 1}
        out.append((x, observed, kind, allowed))
    return out
