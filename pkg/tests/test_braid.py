"""Braid words: text form, closure combinatorics, flype families."""

import random

import pytest

from transkh.braid import (BraidWord, flype_pair, format_word, parse_word,
                           random_word, require_single_component)
from transkh.errors import (IndexOutOfRange, LengthMismatch, MultiComponent)


def test_parse_format_roundtrip():
    for text in ("1,1,1", "1,-2,1,-2", "-", "3,-3,2"):
        w = parse_word(text)
        assert format_word(w) == text
    assert parse_word(" 1 , 2 ").letters == (1, 2)
    assert parse_word("", strands=4).strands == 4


def test_parse_rejects_garbage():
    with pytest.raises(LengthMismatch):
        parse_word("1,x")
    with pytest.raises(IndexOutOfRange):
        parse_word("1,0,2")
    with pytest.raises(IndexOutOfRange):
        BraidWord(2, (2,))          # letter needs 3 strands


def test_self_linking_is_writhe_minus_strands():
    assert BraidWord(2, (1, 1, 1)).self_linking == 1
    assert BraidWord(2, (-1, -1, -1)).self_linking == -5
    assert BraidWord(1, ()).self_linking == -1
    rng = random.Random(0)
    for _ in range(50):
        w = random_word(rng, 8, 5)
        writhe = sum(1 if t > 0 else -1 for t in w.letters)
        assert w.self_linking == writhe - w.strands


def test_components_are_permutation_cycles():
    assert len(BraidWord(2, (1, 1, 1)).components()) == 1
    assert len(BraidWord(2, (1, 1)).components()) == 2
    assert len(BraidWord(3, ()).components()) == 3
    assert BraidWord(3, (1, -2, 1, -2)).is_knot()
    with pytest.raises(MultiComponent):
        require_single_component(BraidWord(2, (1, 1)))


def test_flype_pair_shapes():
    w1, w2 = flype_pair((1,), (-1,), 3, 2)
    assert w1.letters == (1, 2, 2, 2, -1, -2)
    assert w2.letters == (1, -2, -1, 2, 2, 2)
    assert w1.strands == w2.strands == 3
    # negative twist block
    w1, w2 = flype_pair((), (), -2, 1)
    assert w1.letters == (-1, -1, -1)
    assert w2.letters == (-1, -1, -1)


def test_flype_pair_preserves_self_linking():
    rng = random.Random(1)
    for _ in range(30):
        m = rng.randint(1, 3)
        mk = lambda: tuple(rng.choice([1, -1]) * rng.randint(1, m - 1)
                           for _ in range(rng.randint(0, 2))) if m > 1 else ()
        w1, w2 = flype_pair(mk(), mk(), rng.randint(-2, 3), m)
        assert w1.self_linking == w2.self_linking


def test_flype_pair_letter_bounds():
    with pytest.raises(IndexOutOfRange):
        flype_pair((2,), (), 1, 2)
    with pytest.raises(IndexOutOfRange):
        flype_pair((), (0,), 1, 2)
