from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_shimura.errors import DyadicPrime
from hilbert_shimura.numfield import (
    FieldElement,
    QuadraticField,
    canonical_totally_positive,
    divisors,
    enumerate_totally_positive,
    epsilon_xi,
    factor_ideal,
    is_fundamental_discriminant,
    is_square_mod_4,
    parse_element,
    residue_symbol,
    totally_positive_generator,
)

K = QuadraticField(5)
W = K.omega

ints = st.integers(-40, 40)
elements = st.builds(lambda a, b: FieldElement(a, b, 5), ints, ints)
nonzero = elements.filter(bool)


def test_omega_relation():
    assert W * W == W + 1
    assert W.norm() == -1
    assert W.trace() == 1
    assert K.fundamental_unit == W


def test_parse_and_repr_roundtrip():
    for text in ["35+8w", "62-27w", "3", "-w", "1+w"]:
        assert str(parse_element(text)) == text
    assert parse_element("47-9w") == FieldElement(47, -9)


def test_totally_positive_examples():
    assert K(35, 8).is_totally_positive()
    assert not W.is_totally_positive()
    assert (W * W).is_totally_positive()
    assert not K(-1).is_totally_positive()


def test_enumerate_totally_positive_small():
    assert enumerate_totally_positive(1) == []
    assert enumerate_totally_positive(2) == [K(1)]
    xs = enumerate_totally_positive(40)
    assert all(x.is_totally_positive() and x.trace() <= 40 for x in xs)
    assert len(xs) == len(set(xs))


def test_prime_decomposition_types():
    assert [P.f for P in K.primes_above(2)] == [2]
    assert [P.ramified for P in K.primes_above(5)] == [True]
    assert len(K.primes_above(11)) == 2
    assert len(K.primes_above(7)) == 1 and K.primes_above(7)[0].norm == 49
    assert [P.norm for P in K.primes_up_to(11)] == [4, 5, 9, 11, 11]


def test_factor_level_ideal():
    fac = factor_ideal(K.ideal(K(5, 2)))
    assert len(fac) == 1 and fac[0][0].norm == 31 and fac[0][1] == 1


def test_factor_negative_exponents():
    a = K.ideal(K(3)) / K.ideal(K(2))
    fac = {P.norm: e for P, e in factor_ideal(a)}
    assert fac == {4: -1, 9: 1}


def test_divisors_of_four():
    assert divisors(K.ideal(4)) == [K.ideal(1), K.ideal(2), K.ideal(4)]


def test_ideal_norms_and_inverse():
    a = K.ideal(K(35, 8))
    assert a.norm() == abs(K(35, 8).norm())
    assert (a * a.inverse()).is_unit()
    assert K.ideal(K(3, 1)).norm() == 11


def test_residue_symbols():
    P9 = K.primes_above(3)[0]
    assert residue_symbol(K(-1), P9) == 1
    P11 = K.primes_above(11)
    assert {residue_symbol(K(-1), P) for P in P11} == {-1}
    assert residue_symbol(K(3, 1), K.prime_of(K.ideal(K(3, 1)))) == 0
    with pytest.raises(DyadicPrime):
        residue_symbol(K(3), K.primes_above(2)[0])


def test_epsilon_at_level_prime_for_nontrivial_zeros():
    c = K.prime_of(K.ideal(K(5, 2)))
    for text in ["35+8w", "39+15w", "47-9w", "51-5w", "62-27w"]:
        assert epsilon_xi(parse_element(text), c) == 1


def test_square_mod_four():
    assert is_square_mod_4(K(1))
    assert is_square_mod_4(W * W + 4 * K(3, 5))
    assert not is_square_mod_4(W)
    squares = {((K(a, b) * K(a, b)).a % 4, (K(a, b) * K(a, b)).b % 4) for a in range(4) for b in range(4)}
    for a in range(4):
        for b in range(4):
            assert is_square_mod_4(K(a, b)) == ((a, b) in squares)


def test_fundamental_discriminants():
    assert is_fundamental_discriminant(-K(35, 8))
    assert not is_fundamental_discriminant(-4 * K(35, 8))
    assert not is_fundamental_discriminant(K(0))


def test_totally_positive_generator_up_to_unit_squares():
    g = totally_positive_generator(K.ideal(K(3, 1)))
    assert g.is_totally_positive() and abs(g.norm()) == 11
    # (w) is the unit ideal, so its generator is 1; w^2 is a unit square
    assert totally_positive_generator(K.ideal(W)) == K(1)
    assert canonical_totally_positive(W * W) == K(1)
    assert canonical_totally_positive(K(35, 8)) == canonical_totally_positive(K(62, -27))


@given(elements, elements)
def test_norm_and_trace_are_multiplicative_and_additive(x, y):
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conjugate().conjugate() == x


@given(nonzero)
def test_inverse(x):
    assert x * x.inverse() == K(1)


@given(nonzero, nonzero)
@settings(max_examples=40)
def test_ideal_product_norm(x, y):
    a, b = K.ideal(x), K.ideal(y)
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a * b) == K.ideal(x * y)


@given(nonzero, nonzero)
@settings(max_examples=60)
def test_residue_symbol_multiplicative(x, y):
    for P in K.primes_up_to(30):
        if P.p == 2:
            continue
        assert residue_symbol(x * y, P) == residue_symbol(x, P) * residue_symbol(y, P)


@given(elements.filter(lambda x: x.is_totally_positive()), st.integers(-3, 3))
@settings(max_examples=40)
def test_epsilon_unit_square_invariance(xi, k):
    u2 = (W * W) ** k
    for P in K.primes_up_to(30):
        if P.p != 2:
            assert epsilon_xi(xi * u2, P) == epsilon_xi(xi, P)


@given(elements.filter(lambda x: x.is_totally_positive()))
@settings(max_examples=30)
def test_generator_generates(x):
    a = K.ideal(x)
    g = totally_positive_generator(a)
    assert K.ideal(g) == a and g.is_totally_positive()


def test_fraction_coercion():
    x = K(Fraction(1, 2), Fraction(1, 2))
    assert x.is_integral() is False
    assert (2 * x).is_integral()
