from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_shimura.numfield import FieldElement
from hilbert_shimura.quatalg import (
    QuaternionLattice,
    TernaryLattice,
    ideal_product,
    is_locally_principal_ideal,
    lattice_product,
    reduced_discriminant,
    unit_index,
)

coord = st.builds(lambda a, b: FieldElement(a, b, 5), st.integers(-6, 6), st.integers(-6, 6))


def test_hamilton_relations(B):
    i, j, k = B.gens
    one = B.element(1)
    assert i * i == -one and j * j == -one
    assert i * j == k and j * i == -k
    assert (i * j).reduced_norm() == FieldElement(1, 0)


quads = st.lists(coord, min_size=4, max_size=4)


@given(quads, quads)
@settings(max_examples=40)
def test_norm_is_multiplicative(B, a, b):
    p = B.element(*a)
    q = B.element(*b)
    assert (p * q).reduced_norm() == p.reduced_norm() * q.reduced_norm()
    assert (p * q).conjugate() == q.conjugate() * p.conjugate()
    assert p.reduced_trace() == (p + p.conjugate()).t


@given(quads, quads)
@settings(max_examples=30)
def test_structure_constants_match_element_product(B, a, b):
    p = B.element(*a)
    q = B.element(*b)
    assert B.mul_vectors(p.vector(), q.vector()) == (p * q).vector()


def test_fixture_order_is_an_order(R):
    assert R.is_order()
    assert R.right_order() == R and R.left_order() == R


def test_level_of_fixture_orders(R, I, K):
    assert reduced_discriminant(R) == K.ideal(K(5, 2))
    assert reduced_discriminant(I.right_order()) == reduced_discriminant(R)


def test_fixture_ideal_is_left_ideal_of_R(R, I):
    assert I.left_order() == R
    assert is_locally_principal_ideal(I, R)
    # the right order of I is a different maximal order of the same level
    assert I.right_order() != R


def test_unit_indices(R, I):
    # w_R = 3, w_I = 5; the mass 1/3 + 1/5 = 8/15
    assert unit_index(R) == 3
    assert unit_index(I.right_order()) == 5


def test_ideal_norm_and_inverse(R, I):
    # the fixture I has norm O and the same covolume as R
    assert I.norm_ideal().is_unit()
    assert I.covolume() == R.covolume()
    assert ideal_product(I.conjugate(), I).is_subset(I.right_order())
    assert lattice_product(I, I.inverse()) == R


def test_scaling_lattice(R, K):
    three = R.scale(K(3))
    assert three.index_in(R) == 3**8


def test_ternary_lattice_counts_agree_with_enumeration(R):
    L = TernaryLattice(R)
    table = L.value_table(40)
    for eta, count in sorted(table.items(), key=lambda t: t[0].sort_key())[:40]:
        assert L.count_representations(eta) == count


def test_ternary_small_values(R, I):
    # frozen: the -Delta values of trace <= 12 on L_R and L_I
    LR = TernaryLattice(R)
    LI = TernaryLattice(I.right_order())
    small = lambda L: sorted((str(k), v) for k, v in L.value_table(12).items() if k.trace() <= 12)
    assert small(LR) == [("3", 2), ("3+3w", 2), ("6-3w", 2)]
    assert small(LI) == [("2+w", 2), ("3+4w", 2), ("3-w", 2), ("7-4w", 2)]


def test_scaled_lattice_counts(R, K):
    L = TernaryLattice(R)
    half = L.scaled(K(Fraction(1, 2)))
    for xi in [K(3), K(3, 3), K(35, 8)]:
        assert half.count_representations(xi) == L.count_representations(4 * xi)
    assert L.scaled(K(3)).count_representations(K(3)) == 0


def test_nonintegral_and_nonpositive_targets(R, K):
    L = TernaryLattice(R)
    assert L.count_representations(K(0)) == 1
    assert L.count_representations(K(-3)) == 0
    assert L.count_representations(K(Fraction(1, 2))) == 0


def test_json_roundtrip(R, B):
    again = QuaternionLattice.from_json(B, R.to_json())
    assert again == R
