from fractions import Fraction

import pytest

from hilbert_shimura.errors import IndexSetTooSmall
from hilbert_shimura.halfint import (
    ThetaEngine,
    a_count,
    a_count_literal,
    e_xi,
    half_hecke,
    kohnen_admissible,
    neighbor_membership,
    theta_of,
    xi_range,
)
from hilbert_shimura.brandt import prime_hecke_matrix
from hilbert_shimura.numfield import is_square_mod_4
from hilbert_shimura.quatalg import TernaryLattice


@pytest.fixture(scope="module")
def engine(S):
    return ThetaEngine(S, 40)


def test_squares_mod_four(K):
    # 4 of the 16 classes of O/4O are squares
    assert sum(is_square_mod_4(K(a, b)) for a in range(4) for b in range(4)) == 4


def test_admissible_list(K):
    got = [str(x) for x in xi_range(12, 5, False) if kohnen_admissible(x)]
    assert got == ["3-w", "2+w", "3", "4", "6-3w", "3+3w", "7-4w", "3+4w", "8-4w", "4+4w"]
    assert sum(kohnen_admissible(x) for x in xi_range(100, 5, False)) == 562


def test_frozen_class_coefficients(S, K, engine):
    O = K.unit_ideal
    fR = theta_of(S.basis_vector(0), 12, engine=engine)
    fI = theta_of(S.basis_vector(1), 12, engine=engine)
    nonzero = {str(x): (int(fR.value(x, O)), int(fI.value(x, O))) for x in fR.xis() if fR.value(x, O) or fI.value(x, O)}
    assert nonzero == {
        "0": (1, 1), "3-w": (0, 2), "2+w": (0, 2), "3": (2, 0), "3+3w": (2, 0), "6-3w": (2, 0),
        "7-4w": (0, 2), "3+4w": (0, 2),
    }


def test_plus_space_vanishing(S, K, engine):
    O = K.unit_ideal
    for i in range(2):
        f = theta_of(S.basis_vector(i), 40, engine=engine)
        assert all(f.value(x, O) == 0 for x in f.xis() if x and not kohnen_admissible(x))


def test_support_law(S, K):
    L = TernaryLattice(S.reps[0].right_order())
    P = K.primes_above(3)[0]
    # a = P^-1 gives g = 1/3; g^2 xi integral only when 9 | xi
    assert a_count(K(3), P.ideal.inverse(), L) == 0
    assert a_count(K(27), P.ideal.inverse(), L) == L.count_representations(K(3))


def test_scaling_literal_matches(S, K):
    L = TernaryLattice(S.reps[1].right_order())
    P = K.primes_above(5)[0]
    for xi in [K(3, -1), K(2, 1), K(7, -4), K(35, 8)]:
        assert a_count(xi, P.ideal, L) == a_count_literal(xi, P.ideal, L)


def test_linearity_at_five(S, K, engine):
    P = K.primes_above(5)[0]
    O = K.unit_ideal
    xs = [K(0)] + [x for x in xi_range(25, 5, False) if kohnen_admissible(x)]
    T = prime_hecke_matrix(S, P)
    for i in range(2):
        v = S.basis_vector(i)
        f = theta_of(v, 25, ideals=[O, P.ideal, P.ideal.inverse()], engine=engine, xis=xs)
        lhs = half_hecke(f, P)
        rhs = theta_of(T.apply(v), 25, engine=engine, xis=xs)
        assert all(lhs.value(x, O) == rhs.value(x, O) for x in xs)


def test_half_hecke_needs_columns(S, K, engine):
    f = theta_of(S.basis_vector(0), 10, engine=engine)
    with pytest.raises(IndexSetTooSmall):
        half_hecke(f, K.primes_above(5)[0])
    with pytest.raises(IndexSetTooSmall):
        f.value(K(3), K.ideal(3))


def test_table_json_is_sorted(S, K, engine):
    f = theta_of(S.vector([1, -1]), 10, ideals=[K.unit_ideal, K.ideal(2)], engine=engine)
    rows = f.to_json()["entries"]
    keys = [(Fraction(r[0]) * 2 + Fraction(r[1]), Fraction(r[0]), r[2]) for r in rows]
    assert len(rows) == len(f.entries)
    assert [k[0] for k in keys] == sorted(k[0] for k in keys)
    assert f.to_json()["header"]["T"] == 10


def test_e_xi(S, K, engine):
    e = e_xi(K(3), S, engine)
    assert list(e) == [Fraction(2, 3), 0]


def test_neighbor_membership_cases(S, K):
    P = K.primes_above(5)[0]
    for x, observed, kind, allowed in neighbor_membership(0, S, P, samples=6):
        assert observed in allowed, kind
