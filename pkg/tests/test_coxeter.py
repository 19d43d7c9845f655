from math import comb

import pytest
from hypothesis import given, strategies as st

from flagattr.coxeter import (
    DimensionSignature,
    bruhat_leq,
    compose,
    coset_poset,
    coset_rep_of,
    identity,
    inverse,
    is_coset_rep,
    length,
    longest_element,
    minimal_coset_reps,
)
from flagattr.errors import InvalidSignature, SizeMismatch
from oracles import all_perms, grassmannian_reps, reduced_word, subword_pairs, word_product

perms = st.integers(1, 6).flatmap(lambda n: st.permutations(list(range(1, n + 1)))).map(tuple)


def test_length_examples():
    assert length(identity(4)) == 0
    assert length((3, 2, 1)) == 3
    assert length((2, 1, 4, 3)) == 2


@given(perms)
def test_length_is_reduced_word_length(w):
    word = reduced_word(w)
    assert word_product(len(w), word) == w
    assert len(word) == length(w)


@given(perms, st.data())
def test_group_laws(w, data):
    u = tuple(data.draw(st.permutations(list(range(1, len(w) + 1)))))
    assert compose(w, inverse(w)) == identity(len(w))
    assert length(inverse(w)) == length(w)
    assert length(compose(u, w)) <= length(u) + length(w)


def test_bruhat_examples():
    assert all(bruhat_leq(identity(3), w) for w in all_perms(3))
    assert not bruhat_leq((2, 1, 3), (1, 3, 2)) and not bruhat_leq((1, 3, 2), (2, 1, 3))
    with pytest.raises(SizeMismatch):
        bruhat_leq((1, 2), (1, 2, 3))


@pytest.mark.parametrize("n,count", [(2, 3), (3, 19), (4, 213)])
def test_bruhat_pairs_match_subword_oracle(n, count):
    ws = all_perms(n)
    ours = {(u, w) for u in ws for w in ws if bruhat_leq(u, w)}
    assert ours == subword_pairs(ws)
    assert len(ours) == count


def test_longest_element():
    assert longest_element(1) == (1,)
    assert longest_element(3) == (3, 2, 1)
    assert all(bruhat_leq(w, longest_element(4)) for w in all_perms(4))


def test_signature_validation():
    assert DimensionSignature.full(4).dims == (1, 2, 3)
    assert DimensionSignature((2,), 4).manifold_dim == 4
    assert DimensionSignature.full(3).manifold_dim == 3
    for bad in [((2, 1), 4), ((0,), 3), ((3,), 3), ((1, 1), 3)]:
        with pytest.raises(InvalidSignature):
            DimensionSignature(*bad)


def test_minimal_coset_reps():
    assert set(minimal_coset_reps(DimensionSignature.full(3))) == set(all_perms(3))
    grass = minimal_coset_reps(DimensionSignature((2,), 4))
    assert len(grass) == comb(4, 2) and set(grass) == set(grassmannian_reps(4, 2))
    assert len(minimal_coset_reps(DimensionSignature((1,), 3))) == 3


@pytest.mark.parametrize("dims,n", [((2,), 4), ((1,), 3), ((1, 3), 4), ((2,), 5)])
def test_coset_reps_partition_the_group(dims, n):
    sig = DimensionSignature(dims, n)
    reps = set(minimal_coset_reps(sig))
    for w in all_perms(n):
        r = coset_rep_of(w, sig)
        assert r in reps and is_coset_rep(r, sig)
        # r is the unique shortest element of its coset
        assert length(r) <= length(w)


def test_coset_posets():
    two = coset_poset(DimensionSignature.full(2))
    assert len(two.pairs()) == 3
    assert len(coset_poset(DimensionSignature.full(3)).pairs()) == 19
    grass = coset_poset(DimensionSignature((2,), 4))
    assert grass.pairs() == subword_pairs(grassmannian_reps(4, 2))
    ranks = grass.ranks()
    middle = [w for w, r in zip(grass.elements, ranks) if r == 2]
    assert sorted(middle) == [(1, 4, 2, 3), (2, 3, 1, 4)]
    assert not grass.le(*middle) and not grass.le(*middle[::-1])


def test_covers_raise_length_by_one_via_a_transposition():
    p = coset_poset(DimensionSignature.full(4))
    covers = p.covers()
    assert len(covers) == 58
    for u, w in covers:
        assert length(w) == length(u) + 1
        assert sum(a != b for a, b in zip(u, w)) == 2
