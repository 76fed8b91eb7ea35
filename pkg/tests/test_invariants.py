"""Canonical cycles: gradings, cycle property in every theory, twin
difference, windows, the s-style invariant, and the obstruction report."""

import random

import pytest

import oracles
from transkh.braid import BraidWord, random_word
from transkh.complexes import build_complex, flatten_chain
from transkh.errors import MultiComponent, WindowInvalid
from transkh.invariants import (combination_cycle, cycle_gradings,
                                diff_window_bounds, is_cycle, oriented_vertex,
                                s_invariant, transverse_cycle,
                                transverse_difference, triviality_obstruction,
                                window_bounds, window_class_vanishes)


def test_cycle_gradings_random():
    rng = random.Random(11)
    for _ in range(40):
        w = random_word(rng, 8, 4)
        sl = (w.n_plus - w.n_minus) - w.strands
        for sign in (+1, -1):
            for flip in (False, True):
                chain = transverse_cycle(w, sign, flip)
                hs, qmin, qmax = cycle_gradings(w, chain)
                assert hs == {0}
                assert qmin == sl == w.self_linking
                # all-minus generator is the unique lowest term
                v = oriented_vertex(w)
                assert chain[(v, 0)] == 1


def test_is_cycle_all_theories():
    rng = random.Random(12)
    for _ in range(25):
        w = random_word(rng, 7, 3)
        for sign in (+1, -1):
            chain = transverse_cycle(w, sign)
            # full twisted representative closes up only once the
            # deformation is switched on
            assert is_cycle(w, chain, "def")
            # its lowest-order (all-minus) part is already closed in
            # the undeformed theory
            assert is_cycle(w, {(oriented_vertex(w), 0): 1}, "kh")


def test_twin_difference():
    rng = random.Random(13)
    for _ in range(25):
        w = random_word(rng, 7, 3)
        diff = transverse_difference(w)
        if not diff:
            continue
        hs, qmin, _ = cycle_gradings(w, diff)
        assert hs == {0}
        assert qmin == w.self_linking + 2
        assert is_cycle(w, diff, "def")
        assert diff == combination_cycle(w, 1, -1)


def test_combination_linearity():
    w = BraidWord(3, (1, -2, 1))
    plus = transverse_cycle(w, +1)
    minus = transverse_cycle(w, -1)
    combo = combination_cycle(w, 3, -5)
    keys = set(plus) | set(minus)
    for k in keys:
        want = 3 * plus.get(k, 0) - 5 * minus.get(k, 0)
        assert combo.get(k, 0) == want
    assert all(v for v in combo.values())


def test_window_bound_arithmetic():
    w = BraidWord(2, (1, 1, 1))
    assert w.self_linking == 1
    assert window_bounds(w, 0, 1) == (1, 3)
    assert window_bounds(w, -2, 3) == (-3, 7)
    assert diff_window_bounds(w, 1, 2) == (3, 5)
    with pytest.raises(WindowInvalid):
        window_bounds(w, 1, 2)      # p must be <= 0
    with pytest.raises(WindowInvalid):
        window_bounds(w, 0, 0)      # q must be > 0
    with pytest.raises(WindowInvalid):
        diff_window_bounds(w, 2, 3)  # p must be <= 1


def test_window_class_controls():
    # trivial closure: the class generates the bottom of the homology
    w0 = BraidWord(1, ())
    cx0 = build_complex(w0, "def")
    assert not window_class_vanishes(cx0, w0, transverse_cycle(w0), 0, 1)
    # its twin difference survives one step up
    assert not window_class_vanishes(cx0, w0, transverse_difference(w0),
                                     1, 2, difference=True)
    # negatively stabilized trivial closure: class dies in first window
    w1 = BraidWord(2, (-1,))
    cx1 = build_complex(w1, "def")
    assert window_class_vanishes(cx1, w1, transverse_cycle(w1), 0, 1)
    # positive torus closure: class survives the first window
    w3 = BraidWord(2, (1, 1, 1))
    cx3 = build_complex(w3, "def")
    assert not window_class_vanishes(cx3, w3, transverse_cycle(w3), 0, 1)


@pytest.mark.parametrize("letters,strands,value", [
    ((), 1, 0),
    ((1, 1, 1), 2, 2),
    ((-1, -1, -1), 2, -2),
    ((1, -2, 1, -2), 3, 0),
    ((-1,), 2, 0),           # stabilized trivial closure, still the unknot
])
def test_s_values(letters, strands, value):
    assert s_invariant(BraidWord(strands, letters)) == value


def test_s_needs_knot():
    with pytest.raises(MultiComponent):
        s_invariant(BraidWord(3, (1,)))


def test_s_lower_bound():
    rng = random.Random(14)
    checked = 0
    for _ in range(30):
        w = random_word(rng, 6, 3)
        if not w.is_knot():
            continue
        assert s_invariant(w) >= w.self_linking + 1
        checked += 1
    assert checked >= 10


def test_obstruction_matches_dense_groups():
    rng = random.Random(15)
    checked = 0
    for _ in range(20):
        w = random_word(rng, 6, 3)
        sl = w.self_linking
        vanishes, bad = triviality_obstruction(w)
        table = oracles.kh_homology(list(w.letters), w.strands)
        want = {k: v for k, v in table.items()
                if k[0] == -1 and k[1] < sl}
        assert {k: (r, list(t)) for k, (r, t) in bad.items()} == want
        assert vanishes == (not bad)
        checked += 1
    assert checked == 20


def test_obstruction_pinned():
    vanishes, bad = triviality_obstruction(BraidWord(2, (1, 1, 1)))
    assert vanishes and bad == {}
