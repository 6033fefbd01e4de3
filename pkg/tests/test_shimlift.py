from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_shimura.errors import BadReduction, DegenerateRatio, MissingBadPrime
from hilbert_shimura.halfint import ThetaEngine, ThetaTable, theta_of
from hilbert_shimura.numfield import QuadraticField, epsilon_xi, factor_ideal, parse_element
from hilbert_shimura.pipeline import FIXTURE_DIR
from hilbert_shimura.shimlift import (
    EllipticCurve,
    IdealSeries,
    classify_zeros,
    curve_ap,
    dyadic_epsilon,
    fundamental_admissible,
    level_check,
    lift_ideals,
    lift_of_vector,
    newform_coeffs,
    odd_proportional,
    prime_power_coefficient,
    shimura_lift,
    waldspurger_factor,
    xi_factor,
)

K = QuadraticField(5)
IDEALS_500 = K.ideals_up_to(500)

# a_P of the curve at good primes of norm <= 60, keyed by the generator
AP = {
    "2": -3, "3-w": -2, "3": 2, "3+w": -4, "4-w": 4, "4+w": 4, "5-w": -4, "5+w": -2, "6-w": -2,
    "7-2w": 8, "6+w": -6, "7-w": -6, "7": 2, "9-2w": -4, "7+2w": 12,
}


@pytest.fixture(scope="module")
def E():
    return EllipticCurve.load(FIXTURE_DIR / "qsqrt5_E.json")


@pytest.fixture(scope="module")
def g(E):
    return newform_coeffs(E, bound=200)


@pytest.fixture(scope="module")
def c31():
    return K.prime_of(K.ideal(K(5, 2)))


def series(draw_entries, bound=500):
    return IdealSeries(bound, {IDEALS_500[i]: Fraction(v) for i, v in draw_entries if v})


entry_lists = st.lists(st.tuples(st.integers(0, len(IDEALS_500) - 1), st.integers(-5, 5)), max_size=8)


@given(entry_lists)
@settings(max_examples=30, deadline=None)
def test_delta_is_identity(entries):
    a = series(entries)
    d = IdealSeries.delta(500)
    assert a * d == a and d * a == a


@given(entry_lists, entry_lists, entry_lists)
@settings(max_examples=20, deadline=None)
def test_convolution_associative_commutative(x, y, z):
    a, b, c = series(x), series(y), series(z)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


def test_xi_factor_examples():
    assert xi_factor(K(35, 8)) == (K.unit_ideal, K.ideal(K(35, 8)))
    assert xi_factor(4 * K(35, 8)) == (K.ideal(2), K.ideal(K(35, 8)))


@given(st.integers(1, 30), st.integers(-20, 20))
@settings(max_examples=40, deadline=None)
def test_xi_factor_norms(a, b):
    xi = K(a, b)
    if not xi.is_totally_positive():
        return
    q, r = xi_factor(xi)
    assert q.norm() ** 2 * r.norm() == abs(xi.norm())


def test_curve_discriminant_and_level(E):
    assert K.ideal(E.discriminant()) == K.ideal(K(5, 2))


def test_curve_ap_frozen(E):
    got = {str(P.generator): curve_ap(E, P) for P in K.primes_up_to(60) if P.generator != K(5, 2)}
    assert got == AP


def test_hasse_bound(E, c31):
    for P in K.primes_up_to(100):
        if P.ideal == c31.ideal:
            continue
        assert curve_ap(E, P) ** 2 <= 4 * P.norm


def test_bad_reduction(E, c31):
    with pytest.raises(BadReduction):
        curve_ap(E, c31)


def test_newform_recurrences(E, g, c31):
    assert g[K.unit_ideal] == 1
    for P in K.primes_up_to(13):
        assert g[P.ideal ** 2] == g[P.ideal] ** 2 - P.norm
    assert g[c31.ideal] == -1
    # a_{c^2} = (-1)^2 lies past the bound, so check the recurrence directly
    assert prime_power_coefficient(-1, 31, 2, bad=True) == 1
    assert prime_power_coefficient(-3, 4, 2) == 5
    assert prime_power_coefficient(-3, 4, 3) == -3 * 5 - 4 * -3


def test_newform_multiplicative(g):
    ideals = K.ideals_up_to(200)
    support = {m: {P for P, _ in factor_ideal(m)} for m in ideals}
    checked = 0
    for m in ideals[:30]:
        for n in ideals[:30]:
            if m.norm() * n.norm() <= 200 and not support[m] & support[n]:
                assert g[m * n] == g[m] * g[n]
                checked += 1
    assert checked > 50


def test_missing_bad_prime(E):
    with pytest.raises(MissingBadPrime):
        newform_coeffs(E, a_bad={}, bound=10)
    with pytest.raises(MissingBadPrime):
        waldspurger_factor(K(35, 8), E, a_bad={})


def test_waldspurger_factor(E, c31):
    assert waldspurger_factor(parse_element("35+8w"), E) == -2
    trivial = next(x for x in fundamental_admissible(30) if epsilon_xi(x, c31) == -1)
    assert waldspurger_factor(trivial, E) == 0
    # ramified at the level prime: the factor is c(P, g)
    assert waldspurger_factor(K(5, 2), E) == -1


def test_dyadic_epsilon():
    P2 = K.primes_above(2)[0]
    assert dyadic_epsilon(K(3, -1), P2) == -1
    assert dyadic_epsilon(K(3), P2) == 1
    assert dyadic_epsilon(4 * K(3), P2) == 0


def test_level_check_homogeneity_and_degeneracy(g):
    lift = g.scale(-2)
    alpha, residual = level_check(lift, g)
    assert alpha == -2 and residual == 0
    alpha3, residual3 = level_check(lift.scale(3), g)
    assert alpha3 == 3 * alpha and residual3 == 3 * residual
    with pytest.raises(DegenerateRatio):
        level_check(IdealSeries(200), g)


def test_lift_constant_term_and_zero_table(S):
    xi = K(3, -1)
    ideals = lift_ideals(xi, 30)
    zero = ThetaTable(0, ideals, {(xi, a): Fraction(0) for a in ideals})
    assert shimura_lift(zero, xi, 30).entries == {}
    engine = ThetaEngine(S, 40)
    table = theta_of(S.vector([1, -1]), 0, ideals=ideals, engine=engine, xis=[xi])
    lift = shimura_lift(table, xi, 30)
    assert lift[K.unit_ideal] == table.value(xi, K.unit_ideal) == -2


def test_lift_proportional_small(S, g):
    engine = ThetaEngine(S, 40)
    lift = lift_of_vector(S.vector([1, -1]), K(3, -1), 60, engine)
    small_g = IdealSeries(60, {m: c for m, c in g.entries.items() if m.norm() <= 60})
    alpha, _ = level_check(lift, small_g)
    assert alpha == -2
    assert odd_proportional(lift, small_g, alpha) == []
    split = lift_of_vector(S.vector([1, -1]), K(3, -1), 60, engine, dyadic="split")
    assert level_check(split, small_g) == (-2, 0)


def test_zero_partition_small(S):
    engine = ThetaEngine(S, 40)
    fR = theta_of(S.basis_vector(0), 40, engine=engine)
    fI = theta_of(S.basis_vector(1), 40, engine=engine)
    rep = classify_zeros(fR, fI, 40)
    pool = fundamental_admissible(40)
    assert not set(rep.trivial) & set(rep.nontrivial)
    assert len(rep.trivial) + len(rep.nontrivial) + rep.nonzero_count == len(pool)
    assert rep.nontrivial == []
