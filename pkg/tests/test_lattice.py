from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbert_shimura import _linalg
from hilbert_shimura.errors import NotPositiveDefinite
from hilbert_shimura.lattice import GramForm, enumerate_short, hnf_basis, lll_reduce, naive_enumerate


def _counts(vectors, G):
    form = GramForm(G)
    return Counter(form.value(sv.vector) for sv in vectors)


def test_sum_of_three_squares():
    # r_3(n) / 2 for n = 1..5 is 3, 6, 4, 3, 12
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    c = _counts(enumerate_short(eye, 5), eye)
    assert [c[n] for n in range(1, 6)] == [3, 6, 4, 3, 12]


def test_hexagonal_minimum():
    A2 = [[2, 1], [1, 2]]
    short = enumerate_short(A2, 2)
    assert len(short) == 3
    assert all(sv.value == 2 for sv in short)


def test_hnf_is_canonical():
    a = hnf_basis([[2, 4, 0], [0, 6, 3], [1, 1, 1]])
    b = hnf_basis([[1, 1, 1], [2, 4, 0], [2, 10, 3]])
    assert a == b
    c = hnf_basis([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])
    assert c.den == 6 and c.covolume() == Fraction(1, 6)


def test_lattice_membership():
    L = hnf_basis([[2, 0], [1, 3]])
    assert L.contains([3, 3]) and not L.contains([1, 0])
    assert L.coordinates([3, 3]) is not None


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        GramForm([[1, 2], [2, 1]])


def _lovasz_holds(G):
    # size reduction and the Lovasz condition with delta = 3/4, exactly
    n = len(G)
    Bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i):
            num = G[i][j] - sum(mu[j][k] * mu[i][k] * Bstar[k] for k in range(j))
            mu[i][j] = num / Bstar[j]
        Bstar.append(G[i][i] - sum(mu[i][k] ** 2 * Bstar[k] for k in range(i)))
    size = all(abs(mu[i][j]) <= Fraction(1, 2) for i in range(n) for j in range(i))
    lov = all(Bstar[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * Bstar[k - 1] for k in range(1, n))
    return size and lov


pd_forms = st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3).map(
    lambda B: [[sum(B[i][k] * B[j][k] for k in range(3)) + (3 if i == j else 0) for j in range(3)] for i in range(3)]
)


@given(pd_forms)
@settings(max_examples=40)
def test_lll_is_unimodular_and_reduced(G):
    reduced, U = lll_reduce(G)
    assert abs(_linalg.det(U)) == 1
    Gr = GramForm(G).transform(U).G
    assert _lovasz_holds(Gr)


@given(pd_forms, st.integers(1, 30))
@settings(max_examples=40, deadline=None)
def test_fincke_pohst_matches_box(G, bound):
    fp = [(sv.vector, sv.value) for sv in enumerate_short(G, bound)]
    box = [(sv.vector, sv.value) for sv in naive_enumerate(G, bound)]
    assert fp == box


@given(pd_forms, st.integers(1, 20))
@settings(max_examples=25, deadline=None)
def test_reduction_does_not_change_the_set(G, bound):
    a = enumerate_short(G, bound, reduce=True)
    b = enumerate_short(G, bound, reduce=False)
    assert a == b


def test_rational_gram():
    G = [[Fraction(1, 2), 0], [0, Fraction(3, 2)]]
    vals = sorted(sv.value for sv in enumerate_short(G, 2))
    assert vals == [Fraction(1, 2), Fraction(3, 2), Fraction(2), Fraction(2), Fraction(2)]
