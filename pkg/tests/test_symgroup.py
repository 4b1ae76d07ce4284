import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from klkostant.symgroup import (
    bruhat_leq,
    compose,
    conjugate_by_w0,
    coset_decompose,
    descents_left,
    descents_right,
    format_perm,
    from_word,
    identity,
    inverse,
    is_compatible,
    length,
    longest_element,
    multi_shift,
    occurrences,
    parse_perm,
    pattern_at,
    reduced_word,
    shift,
    simple,
    support,
    transposition,
)


def P(text):
    return parse_perm(text)


def perms(n):
    return list(itertools.permutations(range(1, n + 1)))


def perm_strategy(n):
    return st.permutations(list(range(1, n + 1))).map(tuple)


class TestExamples:
    def test_simple(self):
        assert simple(1, 4) == P("2134")
        assert simple(3, 4) == P("1243")
        assert simple(2, 3) == P("132")
        with pytest.raises(ValueError):
            simple(4, 4)

    def test_compose_convention(self):
        x = P("3241")
        assert compose(simple(1, 4), x) == P("3142")
        assert compose(x, simple(1, 4)) == P("2341")
        assert compose(x, identity(4)) == x
        with pytest.raises(ValueError):
            compose(x, identity(3))

    def test_inverse(self):
        assert inverse(P("231")) == P("312")
        assert inverse(P("4231")) == P("4231")
        assert inverse(identity(5)) == identity(5)

    def test_length(self):
        assert length(P("3241")) == 4
        assert from_word([1, 2, 1, 3], 4) == P("3241")
        assert length(identity(4)) == 0
        assert length(longest_element(4)) == 6

    def test_descents(self):
        assert descents_right(P("5234167")) == {1, 4}
        assert descents_left(P("5234167")) == {1, 4}
        assert descents_right(identity(4)) == set()
        assert descents_right(P("3241")) == {1, 3}

    def test_support(self):
        assert support(identity(4)) == set()
        assert support(P("3241")) == {1, 2, 3}
        assert support(P("42315")) == {1, 2, 3}

    def test_reduced_word(self):
        assert reduced_word(identity(3)) == []
        assert reduced_word(simple(2, 4)) == [2]
        w = reduced_word(P("3241"))
        assert len(w) == 4 and from_word(w, 4) == P("3241")

    def test_bruhat(self):
        assert all(bruhat_leq(identity(4), x) for x in perms(4))
        assert all(bruhat_leq(x, longest_element(4)) for x in perms(4))
        # 3412 lies below 4312 and 3421 but is incomparable with 4231
        assert not bruhat_leq(P("3412"), P("4231"))
        assert P("3412") not in oracles.bruhat_below(P("4231"))
        assert bruhat_leq(P("3412"), P("4312"))

    def test_longest_and_conjugation(self):
        assert longest_element(4) == P("4321")
        assert conjugate_by_w0(simple(1, 4)) == simple(3, 4)
        z = compose(transposition(1, 4, 5), transposition(3, 5, 5))
        assert conjugate_by_w0(z) == compose(transposition(1, 3, 5), transposition(2, 5, 5))

    def test_pattern_at(self):
        assert pattern_at(P("132479685"), 4, 6) == P("4231")
        assert pattern_at(P("21743856"), 4, 1) == P("2143")
        assert pattern_at(P("3142"), 1, 3) == (1,)
        with pytest.raises(ValueError):
            pattern_at(P("3142"), 3, 3)

    def test_occurrences(self):
        assert occurrences(P("21743856"), P("2143")) == [1, 4]
        assert occurrences(identity(5), P("21")) == []
        assert occurrences(P("14325"), P("14325")) == [1]
        assert occurrences(P("21"), P("14325")) == []

    def test_shift(self):
        assert shift(P("312"), 7, 4) == P("1236457")
        assert shift(P("312"), 7, 4) == from_word([5, 4], 7)
        assert shift(P("2413"), 6, 1) == P("241356")
        assert shift(identity(3), 6, 2) == identity(6)
        with pytest.raises(ValueError):
            shift(P("312"), 4, 3)

    def test_multi_shift(self):
        assert multi_shift([P("312"), P("3142")], (3, 4), 9, (2, 6)) == P("142358697")
        assert multi_shift([P("312")], (3,), 7, (4,)) == shift(P("312"), 7, 4)
        assert multi_shift([identity(2), identity(3)], (2, 3), 6, (1, 3)) == identity(6)
        with pytest.raises(ValueError):
            multi_shift([P("21"), P("21")], (2, 2), 5, (1, 2))

    def test_coset_decompose(self):
        assert coset_decompose(P("132479685"), 4, 6) == (P("132475689"), P("4231"))
        z = P("1234567")
        assert coset_decompose(z, 3, 2) == (z, identity(3))

    def test_compatibility(self):
        walk = [P("235146"), P("231546"), P("213546")]
        assert is_compatible(walk, [3, 2, 1])
        z = P("2134")
        assert is_compatible([z], [1])
        assert not is_compatible([z], [2])
        with pytest.raises(ValueError):
            is_compatible(walk, [1, 1, 2])

    def test_text_io(self):
        assert parse_perm("3,2,4,1") == P("3241")
        assert parse_perm("w:1,2,1,3", 4) == P("3241")
        assert format_perm(P("3241")) == "3,2,4,1"
        for bad in ("1,1,2", "abc", "1,3"):
            with pytest.raises(ValueError):
                parse_perm(bad)
        with pytest.raises(ValueError):
            parse_perm("w:1,2")


class TestProperties:
    def test_descents_by_length(self):
        for x in perms(5):
            by_len = {i for i in range(1, 5) if length(compose(x, simple(i, 5))) < length(x)}
            assert descents_right(x) == by_len
            assert descents_left(x) == descents_right(inverse(x))

    def test_bruhat_matches_subword_oracle(self):
        for y in perms(4):
            below = oracles.bruhat_below(y)
            for x in perms(4):
                assert bruhat_leq(x, y) == (x in below)

    def test_length_matches_inversions(self):
        for x in perms(5):
            assert length(x) == oracles.inversions(x) == len(reduced_word(x))
            assert from_word(reduced_word(x), 5) == x

    def test_support_is_letters_of_reduced_word(self):
        for x in perms(5):
            assert support(x) == set(reduced_word(x))

    def test_coset_decomposition_is_length_additive(self):
        for z in perms(5):
            x, p = coset_decompose(z, 3, 2)
            sp = shift(p, 5, 2)
            assert compose(x, sp) == z
            assert x[1] < x[2] < x[3]
            assert length(z) == length(x) + length(sp)

    def test_pattern_of_shift(self):
        for x in perms(4):
            for n, i in ((4, 1), (5, 2), (6, 3), (7, 1)):
                assert pattern_at(shift(x, n, i), 4, i) == x

    @given(perm_strategy(4), perm_strategy(4), st.integers(1, 4))
    def test_shift_is_a_homomorphism(self, x, y, i):
        assert shift(compose(x, y), 7, i) == compose(shift(x, 7, i), shift(y, 7, i))

    @given(perm_strategy(6), perm_strategy(6))
    def test_length_subadditive(self, x, y):
        assert length(compose(x, y)) <= length(x) + length(y)

    def test_composition_matches_oracle(self):
        rng = random.Random(7)
        for _ in range(200):
            x, y = (tuple(rng.sample(range(1, 8), 7)) for _ in range(2))
            assert compose(x, y) == oracles.mul(x, y)

    def test_conjugation_by_w0(self):
        w0 = longest_element(5)
        for x in perms(5):
            assert conjugate_by_w0(x) == compose(compose(w0, x), w0)
