from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from jscc.algebra import Permutation, apply_perm, make_rng
from jscc.codes import LinearCode
from jscc.errors import BudgetExceededError, DomainError, UsageError
from jscc.spectra import (
    JointSpectrum,
    Spectrum,
    TypeDist,
    ambient_spectrum,
    enumerate_types,
    function_spectrum,
    joint_set_spectrum,
    marginals_and_conditionals,
    product_spectrum,
    set_spectrum,
    total_variation,
    type_of,
)


def T(*c):
    return TypeDist(tuple(c))


def as_plain(spec):
    """Spectrum keyed by raw count tuples, for comparison with the oracles."""
    out = {}
    for key, mass in spec.items():
        if isinstance(key, tuple):
            out[tuple(k.counts for k in key)] = mass
        else:
            out[key.counts] = mass
    return out


def test_type_of_examples():
    assert type_of((0, 1, 1, 0), 2) == T(2, 2)
    assert type_of((1, 2, 2, 0, 1), 3) == T(1, 2, 2)
    assert type_of((0,) * 5, 3) == TypeDist.zero(5, 3)
    assert type_of((0,) * 5, 3).is_zero_type


def test_type_of_empty():
    with pytest.raises(UsageError):
        type_of((), 2)


def test_type_probabilities_exact():
    t = T(1, 2, 3)
    assert t.probabilities() == (Fraction(1, 6), Fraction(1, 3), Fraction(1, 2))
    assert sum(t.probabilities()) == 1


def test_enumerate_types_small():
    assert enumerate_types(2, 2) == [T(2, 0), T(1, 1), T(0, 2)]
    assert len(enumerate_types(4, 3)) == 15
    assert enumerate_types(1, 5) == sorted(enumerate_types(1, 5))
    assert len(enumerate_types(1, 5)) == 5


@pytest.mark.parametrize("n,q", [(3, 2), (4, 3), (5, 3), (3, 5)])
def test_enumerate_types_matches_observed(n, q):
    types = enumerate_types(n, q)
    assert len(types) == comb(n + q - 1, q - 1)
    assert len(set(types)) == len(types)
    assert {t.counts for t in types} == {oracles.counts(x, q) for x in oracles.vectors(n, q)}
    assert types == sorted(types)


def test_ambient_examples():
    a = ambient_spectrum(2, 2)
    assert a[T(1, 1)] == Fraction(1, 2)
    assert a[T(2, 0)] == Fraction(1, 4)
    assert all(m == Fraction(1, 7) for m in ambient_spectrum(1, 7).values())


@pytest.mark.parametrize("q", [2, 3, 5])
def test_ambient_sums_to_one(q):
    for n in range(1, 13):
        assert ambient_spectrum(n, q).total() == 1


def test_ambient_matches_full_space_n6():
    assert as_plain(ambient_spectrum(6, 2)) == oracles.set_spectrum(oracles.vectors(6, 2), 2)


def test_set_spectrum_examples():
    s = set_spectrum([(0, 0), (1, 1)], 2)
    assert as_plain(s) == {(2, 0): Fraction(1, 2), (0, 2): Fraction(1, 2)}
    with pytest.raises(UsageError):
        set_spectrum([], 2)
    with pytest.raises(UsageError):
        set_spectrum([(0, 1), (1,)], 2)


def test_joint_identity_is_diagonal():
    vs = oracles.vectors(2, 2)
    J = joint_set_spectrum([(x, x) for x in vs], 2)
    amb = ambient_spectrum(2, 2)
    for P in enumerate_types(2, 2):
        for Q in enumerate_types(2, 2):
            assert J[(P, Q)] == (amb[P] if P == Q else 0)


def test_joint_zero_map():
    vs = oracles.vectors(2, 2)
    J = joint_set_spectrum([(x, (0, 0)) for x in vs], 2)
    amb = ambient_spectrum(2, 2)
    for P in enumerate_types(2, 2):
        assert J[(P, T(2, 0))] == amb[P]
        assert J[(P, T(1, 1))] == 0


def test_function_spectrum_hand_enumeration():
    c = LinearCode(((1, 0), (1, 1)), 2)
    # x=00->00, 01->11, 10->10, 11->01
    J = function_spectrum(c.encode, 2, 2)
    expected = {
        ((2, 0), (2, 0)): Fraction(1, 4),
        ((1, 1), (0, 2)): Fraction(1, 4),
        ((1, 1), (1, 1)): Fraction(1, 4),
        ((0, 2), (1, 1)): Fraction(1, 4),
    }
    assert as_plain(J) == expected


def test_function_spectrum_budget():
    with pytest.raises(BudgetExceededError, match="16"):
        function_spectrum(lambda x: x, 5, 2, budget=16)


def test_sampled_spectrum_close_to_exact():
    c = LinearCode(((1, 0, 1, 1), (0, 1, 1, 0), (1, 1, 0, 0), (0, 0, 1, 1)), 2)
    exact = function_spectrum(c.encode, 4, 2)
    sampled = function_spectrum(c.encode, 4, 2, mode="sampled", trials=100_000, rng=make_rng(3))
    assert sampled.standard_error is not None
    assert total_variation(exact, sampled) < 0.02
    again = function_spectrum(c.encode, 4, 2, mode="sampled", trials=100_000, rng=make_rng(3))
    assert dict(again) == dict(sampled)


def test_conditionals_diagonal_and_zero_map():
    vs = oracles.vectors(3, 2)
    J = joint_set_spectrum([(x, x) for x in vs], 2)
    s_in, s_out, cond = marginals_and_conditionals(J)
    assert s_in == s_out
    assert cond.forward(T(2, 1), T(2, 1)) == 1
    assert cond.forward(T(1, 2), T(2, 1)) == 0

    Z = joint_set_spectrum([(x, (0, 0)) for x in vs], 2)
    _, _, zc = marginals_and_conditionals(Z)
    for P in enumerate_types(3, 2):
        assert zc.forward(T(2, 0), P) == 1
    with pytest.raises(DomainError):
        zc.backward(T(3, 0), T(0, 2))


def test_product_spectrum_conditionals_are_marginals():
    J = product_spectrum(3, 2, 2, 3)
    pairs = [(x, y) for x in oracles.vectors(3, 2) for y in oracles.vectors(2, 3)]
    assert as_plain(J) == oracles.joint_spectrum(pairs, 2, 3)
    s_in, s_out, cond = marginals_and_conditionals(J)
    for P in s_in:
        for Q in s_out:
            assert cond.forward(Q, P) == s_out[Q]
            assert cond.backward(P, Q) == s_in[P]


def test_csv_roundtrip():
    s = ambient_spectrum(4, 3)
    assert Spectrum.from_csv(s.to_csv()) == s
    assert s.to_csv().splitlines()[0] == "type_counts,mass_num,mass_den"
    J = function_spectrum(lambda x: (x[0], x[1] ^ x[2]), 3, 2)
    assert JointSpectrum.from_csv(J.to_csv()) == J
    assert J.to_csv().splitlines()[0] == "type_counts_in,type_counts_out,mass_num,mass_den"


maps = st.integers(1, 4).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda l: st.tuples(
            st.just(n),
            st.just(l),
            st.lists(st.tuples(*[st.integers(0, 1)] * l), min_size=2**n, max_size=2**n),
            st.permutations(range(n)),
            st.permutations(range(l)),
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(maps)
def test_permutation_invariance_property(case):
    n, l, table, s_in, s_out = case
    vs = oracles.vectors(n, 2)
    f = dict(zip(vs, table))
    p_in, p_out = Permutation(tuple(s_in)), Permutation(tuple(s_out))
    g = lambda x: apply_perm(p_out, f[apply_perm(p_in, x)])  # noqa: E731
    assert function_spectrum(g, n, 2) == function_spectrum(lambda x: f[x], n, 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=20))
def test_joint_marginal_is_projected_set_spectrum(rows):
    pairs = [((a, b), (c,)) for a, b, c in rows]
    J = joint_set_spectrum(pairs, 3)
    assert J.total() == 1
    assert J.marginal_in() == set_spectrum([x for x, _ in pairs], 3)
    assert J.marginal_out() == set_spectrum([y for _, y in pairs], 3)
