from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_shimura.brandt import (
    cusp_eigenvectors,
    eisenstein_vector,
    hecke_matrix,
    inner_product,
    is_equivalent,
    is_self_adjoint,
    p_neighbors,
    prime_hecke_matrix,
)
from hilbert_shimura.errors import DimensionMismatch, LevelPrime
from hilbert_shimura.numfield import FieldElement

# frozen Brandt matrices in the basis ([R], [I])
FROZEN = {
    (4, "2"): ((2, 5), (3, 0)),
    (5, "3-w"): ((3, 5), (3, 1)),
    (9, "3"): ((7, 5), (3, 5)),
    (11, "3+w"): ((6, 10), (6, 2)),
    (11, "4-w"): ((9, 5), (3, 7)),
}


@pytest.fixture(scope="module")
def small_primes(K):
    return [P for P in K.primes_up_to(11)]


def test_class_set_shape(S, I):
    assert len(S) == 2
    assert S.weights == [3, 5]
    assert S.depths == [0, 1]
    assert is_equivalent(S.reps[1], I)
    assert not is_equivalent(S.reps[0], I)
    assert sum(Fraction(1, w) for w in S.weights) == Fraction(8, 15)


def test_frozen_matrices(S, small_primes):
    for P in small_primes:
        T = prime_hecke_matrix(S, P)
        assert T.matrix == FROZEN[(P.norm, str(P.generator))]
        assert T.column_sums() == [P.norm + 1] * 2


def test_adjoint_and_commuting(S, small_primes):
    mats = [prime_hecke_matrix(S, P) for P in small_primes]
    for A in mats:
        assert is_self_adjoint(S, A)
        for B in mats:
            assert (A @ B).matrix == (B @ A).matrix


def test_eisenstein_vector_is_eigen(S, small_primes):
    e0 = eisenstein_vector(S)
    for P in small_primes:
        Te = prime_hecke_matrix(S, P).apply(e0)
        assert list(Te) == [(P.norm + 1) * c for c in e0]


def test_cusp_eigenvector(S, small_primes):
    eig = cusp_eigenvectors(S, small_primes)
    assert len(eig) == 1
    v, lam = eig[0]
    assert list(v) == [1, -1]
    assert [lam[P] for P in small_primes] == [-3, -2, 2, -4, 4]
    assert inner_product(v, eisenstein_vector(S)) == 0


def test_level_prime_rejected(S, K):
    c = K.prime_of(K.ideal(K(5, 2)))
    with pytest.raises(LevelPrime):
        p_neighbors(S.reps[0], c, S.order)
    with pytest.raises(LevelPrime):
        hecke_matrix(S, K.ideal(K(5, 2)))


def test_direct_matches_recurrence_at_four(S, K):
    m = K.ideal(4)
    assert hecke_matrix(S, m, method="direct").matrix == hecke_matrix(S, m).matrix


def test_neighbors_are_distinct_and_certified(S, K):
    P = K.primes_above(5)[0]
    for i in range(2):
        nbrs = p_neighbors(S.reps[i], P, S.order)
        assert len(set(nbrs)) == 6
        assert all(J.index_in(S.reps[i]) == 25 for J in nbrs)


def test_dimension_mismatch(S, K):
    T = prime_hecke_matrix(S, K.primes_above(2)[0])
    from hilbert_shimura.brandt import ClassVector

    with pytest.raises(DimensionMismatch):
        T.apply(ClassVector(S, (Fraction(1),)))


small = st.integers(-3, 3)


@given(small, small, small, small)
@settings(max_examples=8, deadline=None)
def test_right_multiplication_preserves_class(S, B, t, x, y, z):
    q = B.element(FieldElement(t, 1), FieldElement(x, 0), FieldElement(y, 0), FieldElement(z, 1))
    J = S.reps[1] * q
    assert S.classify(J) == 1
