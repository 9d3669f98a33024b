import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jscc.algebra import (
    GF,
    Permutation,
    all_permutations,
    all_vectors,
    apply_perm,
    from_index,
    is_prime,
    make_rng,
    sample_uniform_perm,
    sample_uniform_vec,
    to_index,
)
from jscc.errors import UsageError
from jscc.spectra import type_of


def test_primes():
    assert [q for q in range(12) if is_prime(q)] == [2, 3, 5, 7, 11]


@pytest.mark.parametrize("q", [0, 1, 4, 6, 9])
def test_field_rejects_non_prime(q):
    with pytest.raises(UsageError):
        GF(q)


def test_vec_add_binary_is_xor():
    assert GF(2).vec_add((1, 0, 1), (1, 1, 0)) == (0, 1, 1)


def test_vec_sub_ternary():
    assert GF(3).vec_sub((2, 2), (1, 0)) == (1, 2)


def test_length_mismatch():
    with pytest.raises(UsageError):
        GF(3).vec_add((1, 2), (1,))


def test_out_of_range_element():
    with pytest.raises(UsageError):
        GF(3).vec((0, 3))


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_add_then_sub_roundtrip_exhaustive(q, n):
    F = GF(q)
    for a in itertools.product(range(q), repeat=n):
        assert F.vec_sub(a, a) == F.zeros(n)
        for b in itertools.product(range(q), repeat=n):
            assert F.vec_sub(F.vec_add(a, b), b) == a


def test_inverse_in_field():
    F = GF(7)
    for a in range(1, 7):
        assert F.mul(a, F.inv(a)) == 1
    with pytest.raises(UsageError):
        F.inv(0)


def test_index_roundtrip_and_order():
    vecs = all_vectors(3, 3)
    assert [tuple(v) for v in vecs] == list(itertools.product(range(3), repeat=3))
    for i, v in enumerate(vecs):
        assert to_index(v, 3) == i
        assert from_index(i, 3, 3) == tuple(v)


def test_perm_identity_and_swap():
    a = (4, 5, 6)
    assert apply_perm(Permutation.identity(3), a) == a
    assert apply_perm(Permutation((1, 0)), ("x0", "x1")) == ("x1", "x0")


def test_perm_rejects_non_bijection():
    with pytest.raises(UsageError):
        Permutation((0, 0, 1))


def test_perm_size_mismatch():
    with pytest.raises(UsageError):
        apply_perm(Permutation((1, 0)), (1, 2, 3))


@given(st.permutations(range(5)), st.lists(st.integers(0, 2), min_size=5, max_size=5))
def test_perm_inverse_and_type_preservation(image, a):
    p = Permutation(tuple(image))
    a = tuple(a)
    b = apply_perm(p, a)
    assert apply_perm(p.inverse(), b) == a
    assert type_of(b, 3) == type_of(a, 3)


@given(st.permutations(range(4)), st.permutations(range(4)))
def test_perm_compose(p, r):
    p, r = Permutation(tuple(p)), Permutation(tuple(r))
    a = (7, 8, 9, 10)
    assert apply_perm(p.compose(r), a) == apply_perm(p, apply_perm(r, a))


def test_all_permutations_count():
    assert len(list(all_permutations(4))) == 24


def test_sample_perm_n1_is_identity():
    rng = make_rng(0)
    assert all(sample_uniform_perm(1, rng).is_identity for _ in range(20))


def _chi_square_ok(counts, k, draws):
    expected = draws / k
    stat = sum((c - expected) ** 2 / expected for c in counts)
    # well above the 99.9% point for <= 5 degrees of freedom
    return stat < 25.0


def test_sample_perm_uniform_s3():
    rng = make_rng(11)
    draws = 60_000
    tally = Counter(sample_uniform_perm(3, rng).image for _ in range(draws))
    assert len(tally) == 6
    assert _chi_square_ok(tally.values(), 6, draws)
    sigma = (draws * (1 / 6) * (5 / 6)) ** 0.5
    assert all(abs(c - draws / 6) < 4 * sigma for c in tally.values())


def test_sample_vec_uniform():
    rng = make_rng(12)
    draws = 40_000
    tally = Counter(sample_uniform_vec(2, 2, rng) for _ in range(draws))
    assert set(tally) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert _chi_square_ok(tally.values(), 4, draws)


def test_seeded_streams_reproducible_and_distinct():
    a = make_rng(5, 0, 3).integers(0, 1 << 30, 8)
    b = make_rng(5, 0, 3).integers(0, 1 << 30, 8)
    c = make_rng(5, 0, 4).integers(0, 1 << 30, 8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
