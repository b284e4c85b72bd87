import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BIN2, BIN3, CD, THREE, all_sequences, histogram
from gcdcode.errors import ConfigurationTooLarge, TypeMismatch
from gcdcode.typekit import (
    AlphabetSpec,
    Distribution,
    JointType,
    class_rank,
    class_size,
    class_unrank,
    cond_entropy,
    divergence,
    entropy,
    enumerate_shell,
    enumerate_types,
    epsilon_n,
    exp2_n_cond_entropy,
    exp2_n_entropy,
    exp2_neg_n_divergence,
    iter_class,
    marginal_type,
    project,
    rank_in_shell,
    shell_size,
    type_count,
    type_of,
    type_probability,
    type_probability_exact,
    type_rank,
    type_unrank,
    unrank_in_shell,
)

BIN1 = AlphabetSpec((2,))


def brute_shell(side, Q, net, j):
    """Members of Q's class whose side projection for decoder j equals ``side``, sorted."""
    coords = net.complement(j)
    return sorted(
        x for x in all_sequences(Q.alphabet, Q.n)
        if type_of(x, Q.alphabet) == Q and project(x, coords) == side
    )


# -- type_of -----------------------------------------------------------------


def test_type_of_pairs():
    Q = type_of(((0, 0), (1, 1), (0, 0), (1, 1)), BIN2)
    assert Q.as_dict() == {(0, 0): 2, (1, 1): 2}


def test_type_of_constant():
    Q = type_of(((1, 0),) * 7, BIN2)
    assert Q.as_dict() == {(1, 0): 7}


def test_type_of_matches_histogram():
    x = ((1, 1), (0, 0), (1, 0), (0, 1))
    assert type_of(x, BIN2).counts == histogram(x, BIN2) == (1, 1, 1, 1)


def test_type_of_rejects_bad_letter():
    with pytest.raises(ValueError):
        type_of(((0, 2),), BIN2)


# -- enumerate_types ---------------------------------------------------------


def test_single_binary_source_has_five_types_at_n4():
    distinct = {histogram(x, BIN1) for x in all_sequences(BIN1, 4)}
    types = enumerate_types(4, BIN1)
    assert len(distinct) == 5
    assert sorted(distinct) == [Q.counts for Q in types]


def test_n1_joint4_has_four_types():
    assert len(enumerate_types(1, BIN2)) == 4


def test_type_count_lemma_small():
    assert len(enumerate_types(4, BIN1)) <= 25


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("sizes", [(2,), (3,), (2, 2)])
def test_type_count_formula_and_lemma(n, sizes):
    a = AlphabetSpec(sizes)
    k = a.joint_size
    types = enumerate_types(n, a)
    assert len(types) == math.comb(n + k - 1, k - 1) == type_count(n, k)
    assert len(types) <= (n + 1) ** k
    assert [Q.counts for Q in types] == sorted(Q.counts for Q in types)
    assert len(set(types)) == len(types)


def test_enumerate_types_cap():
    with pytest.raises(ConfigurationTooLarge):
        enumerate_types(10, BIN2, cap=100)


@pytest.mark.parametrize("n", range(1, 9))
def test_type_rank_inverts(n):
    for r, Q in enumerate(enumerate_types(n, BIN2)):
        assert type_rank(Q) == r
        assert type_unrank(r, n, BIN2) == Q


# -- class_size --------------------------------------------------------------


def test_class_size_two_two():
    Q = JointType.from_mapping(BIN1, {0: 2, 1: 2})
    brute = sum(1 for x in all_sequences(BIN1, 4) if type_of(x, BIN1) == Q)
    assert class_size(Q) == brute == 6


def test_class_size_constant():
    assert class_size(JointType.from_mapping(BIN2, {(0, 1): 5})) == 1


def test_class_size_all_ones_joint():
    Q = JointType(BIN2, (1, 1, 1, 1))
    brute = sum(1 for x in all_sequences(BIN2, 4) if type_of(x, BIN2) == Q)
    assert class_size(Q) == brute == 24


@pytest.mark.parametrize("n", range(1, 9))
def test_classes_partition_the_space(n):
    assert sum(class_size(Q) for Q in enumerate_types(n, BIN2)) == 4**n


# -- marginal_type -----------------------------------------------------------


def test_marginal_of_uniform():
    Q = JointType(BIN2, (1, 1, 1, 1))
    assert marginal_type(Q, {0}).as_dict() == {(0,): 2, (1,): 2}


def test_marginal_all_sources_is_identity():
    Q = JointType(BIN2, (3, 0, 1, 2))
    assert marginal_type(Q, {0, 1}) == Q


def test_marginal_second_source():
    Q = JointType.from_mapping(BIN2, {(0, 0): 3, (1, 0): 1})
    brute = {}
    x = ((0, 0), (0, 0), (0, 0), (1, 0))
    for letter in project(x, [1]):
        brute[letter] = brute.get(letter, 0) + 1
    assert marginal_type(Q, {1}).as_dict() == brute == {(0,): 4}


def test_marginal_empty_set():
    with pytest.raises(ValueError):
        marginal_type(JointType(BIN2, (1, 1, 1, 1)), set())


# -- shells ------------------------------------------------------------------


def test_shell_all_ones_side_is_source_two():
    # decoder 0 wants source 0 and holds source 1
    Q = JointType(BIN2, (1, 1, 1, 1))
    side = ((0,), (0,), (1,), (1,))
    brute = brute_shell(side, Q, CD, 0)
    assert shell_size(Q, CD, 0) == len(brute) == 4
    assert list(enumerate_shell(side, Q, CD, 0)) == brute


def test_shell_deterministic_channel():
    Q = JointType.from_mapping(BIN2, {(0, 0): 2, (1, 1): 2})
    side = ((0,), (1,), (1,), (0,))
    assert shell_size(Q, CD, 0) == 1
    assert list(enumerate_shell(side, Q, CD, 0)) == [((0, 0), (1, 1), (1, 1), (0, 0))]


def test_shell_concentrated_side_uniform_conditional():
    Q = JointType.from_mapping(BIN2, {(0, 0): 2, (1, 0): 2})
    side = ((0,),) * 4
    brute = brute_shell(side, Q, CD, 0)
    assert shell_size(Q, CD, 0) == len(brute) == math.comb(4, 2) == 6


def test_shell_wrong_side_type():
    Q = JointType(BIN2, (1, 1, 1, 1))
    with pytest.raises(TypeMismatch):
        list(enumerate_shell(((0,), (0,), (0,), (1,)), Q, CD, 0))


@pytest.mark.parametrize("n", range(1, 7))
def test_shell_rank_unrank_exhaustive(n):
    for Q in enumerate_types(n, BIN2):
        for j in range(CD.n_decoders):
            coords = CD.complement(j)
            sides = {project(x, coords) for x in iter_class(Q)}
            for side in sides:
                members = list(enumerate_shell(side, Q, CD, j))
                assert len(members) == shell_size(Q, CD, j)
                assert members == sorted(members)
                for r, x in enumerate(members):
                    assert rank_in_shell(x, side, Q, CD, j) == r
                    assert unrank_in_shell(r, side, Q, CD, j) == x


def test_unrank_zero_is_smallest():
    Q = JointType(BIN2, (1, 1, 1, 1))
    side = ((1,), (0,), (1,), (0,))
    assert unrank_in_shell(0, side, Q, CD, 0) == min(brute_shell(side, Q, CD, 0))


def test_unrank_out_of_range():
    Q = JointType(BIN2, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        unrank_in_shell(4, ((0,), (0,), (1,), (1,)), Q, CD, 0)


def test_class_ranks_distinct_over_24():
    Q = JointType(BIN2, (1, 1, 1, 1))
    members = sorted(x for x in all_sequences(BIN2, 4) if type_of(x, BIN2) == Q)
    ranks = [class_rank(x, Q) for x in members]
    assert ranks == list(range(24))
    assert [class_unrank(r, Q) for r in ranks] == members


def test_three_user_shells_match_brute_force():
    for Q in enumerate_types(2, BIN3):
        for j in range(THREE.n_decoders):
            coords = THREE.complement(j)
            for side in {project(x, coords) for x in iter_class(Q)}:
                assert list(enumerate_shell(side, Q, THREE, j)) == brute_shell(side, Q, THREE, j)


# -- measures ----------------------------------------------------------------


def test_entropy_uniform_binary():
    assert entropy(JointType(BIN1, (3, 3))) == pytest.approx(1.0, abs=1e-15)


def test_divergence_self_zero():
    Q = JointType(BIN2, (1, 2, 3, 2))
    P = Distribution(BIN2, tuple(Fraction(c, 8) for c in Q.counts))
    assert divergence(Q, P) == 0.0


def test_divergence_point_mass_against_fair():
    assert divergence(JointType(BIN1, (4, 0)), Distribution.uniform(BIN1)) == pytest.approx(1.0)


def test_divergence_support_mismatch():
    P = Distribution(BIN1, (Fraction(1), Fraction(0)))
    assert divergence(JointType(BIN1, (1, 1)), P) == math.inf


def test_cond_entropy_chain_rule():
    for Q in enumerate_types(5, BIN2):
        for j in range(2):
            coords = CD.complement(j)
            assert cond_entropy(Q, CD, j) == pytest.approx(
                entropy(Q) - entropy(marginal_type(Q, coords)), abs=1e-12
            )


# -- type probabilities ------------------------------------------------------


def test_type_probability_forced():
    P = Distribution.uniform(BIN1)
    assert 2 ** type_probability(JointType(BIN1, (4, 0)), P) == pytest.approx(1 / 16)
    assert type_probability_exact(JointType(BIN1, (4, 0)), P) == Fraction(1, 16)


def test_type_probabilities_sum_to_one():
    P = Distribution(BIN1, (Fraction(1, 3), Fraction(2, 3)))
    types = enumerate_types(4, BIN1)
    assert sum(type_probability_exact(Q, P) for Q in types) == 1
    assert math.fsum(2 ** type_probability(Q, P) for Q in types) == pytest.approx(1.0)


def test_type_probability_two_two():
    P = Distribution.uniform(BIN1)
    Q = JointType(BIN1, (2, 2))
    brute = Fraction(sum(1 for x in all_sequences(BIN1, 4) if type_of(x, BIN1) == Q), 16)
    assert type_probability_exact(Q, P) == brute == Fraction(6, 16)


def test_type_probability_matches_brute_force_sum():
    P = Distribution(BIN2, (Fraction(1, 2), Fraction(1, 8), Fraction(1, 8), Fraction(1, 4)))
    totals = {}
    for x in all_sequences(BIN2, 3):
        p = Fraction(1)
        for letter in x:
            p *= P.prob(letter)
        Q = type_of(x, BIN2)
        totals[Q] = totals.get(Q, 0) + p
    for Q, p in totals.items():
        assert type_probability_exact(Q, P) == p
        assert 2 ** type_probability(Q, P) == pytest.approx(float(p), rel=1e-12)


# -- epsilon_n ---------------------------------------------------------------


def test_epsilon_example():
    assert epsilon_n(4, 2, BIN2) == pytest.approx((4 * math.log2(5) + 1) / 4)
    assert epsilon_n(4, 2, BIN2) == pytest.approx(2.5719, abs=1e-4)


def test_epsilon_single():
    assert epsilon_n(7, 1, BIN2) == 4 * math.log2(8) / 7


def test_epsilon_halves():
    for n in range(2, 65):
        assert epsilon_n(2 * n, 3, BIN2) < epsilon_n(n, 3, BIN2)


# -- counting lemmas in exact arithmetic --------------------------------------


@pytest.mark.parametrize("n", range(1, 9))
def test_shell_size_lemma_exact(n):
    k = BIN2.joint_size
    for Q in enumerate_types(n, BIN2):
        for j in range(2):
            upper = exp2_n_cond_entropy(Q, CD, j)
            size = shell_size(Q, CD, j)
            assert upper / (n + 1) ** k <= size <= upper


def test_shell_size_lemma_three_user():
    k = 8
    for n in range(1, 4):
        for Q in enumerate_types(n, BIN3):
            for j in range(3):
                upper = exp2_n_cond_entropy(Q, THREE, j)
                assert upper / (n + 1) ** k <= shell_size(Q, THREE, j) <= upper


def test_class_size_bounded_by_entropy():
    for Q in enumerate_types(6, BIN2):
        assert class_size(Q) <= exp2_n_entropy(Q)


rational_dist = st.lists(st.integers(0, 12), min_size=4, max_size=4).filter(lambda w: sum(w) > 0)


@settings(max_examples=60, deadline=None)
@given(weights=rational_dist, n=st.integers(1, 8))
def test_type_probability_lemma_exact(weights, n):
    total = sum(weights)
    P = Distribution(BIN2, tuple(Fraction(w, total) for w in weights))
    k = BIN2.joint_size
    for Q in enumerate_types(n, BIN2):
        prob = type_probability_exact(Q, P)
        if any(c and not p for c, p in zip(Q.counts, P.probs)):
            assert prob == 0
            continue
        upper = exp2_neg_n_divergence(Q, P)
        assert upper / (n + 1) ** k <= prob <= upper


@settings(max_examples=40, deadline=None)
@given(weights=rational_dist, n=st.integers(1, 8))
def test_log_and_exact_agree(weights, n):
    total = sum(weights)
    P = Distribution(BIN2, tuple(Fraction(w, total) for w in weights))
    for Q in enumerate_types(n, BIN2):
        exact = type_probability_exact(Q, P)
        log = type_probability(Q, P)
        if exact == 0:
            assert log == -math.inf
        else:
            assert log == pytest.approx(math.log2(exact.numerator) - math.log2(exact.denominator), abs=1e-9)
            assert -n * (divergence(Q, P) + entropy(Q)) + math.log2(class_size(Q)) == pytest.approx(log, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from(BIN2.letters), min_size=1, max_size=9))
def test_class_rank_roundtrip_random(x):
    x = tuple(x)
    Q = type_of(x, BIN2)
    r = class_rank(x, Q)
    assert 0 <= r < class_size(Q)
    assert class_unrank(r, Q) == x


def test_alphabet_checks():
    with pytest.raises(ValueError):
        AlphabetSpec((2, 1))
    assert AlphabetSpec((2, 3)).joint_size == 6
    assert AlphabetSpec((2, 3)).letters == tuple(itertools.product(range(2), range(3)))


def test_distribution_normalization():
    with pytest.raises(ValueError):
        Distribution(BIN1, (0.5, 0.5 + 1e-9))
    Distribution(BIN1, (0.5, 0.5 + 1e-13))
