"""Grid diagrams: parsing, braid extraction, front invariants, marker
stabilizations, and the square-move rewrite with its braid-level
certificate."""

import random

import pytest

from transkh.braid import BraidWord, flype_pair, random_word
from transkh.errors import (MalformedGrid, MultiComponent, PatternMismatch,
                            ShapeMismatch)
from transkh.grid import (GridDiagram, braid_from_grid, classical_invariants,
                          component_count, find_square_move, format_grid,
                          grid_from_braid, grid_writhe, parse_grid,
                          square_move_pair, stabilize_marker, sz_plus_rewrite,
                          verify_flype_sz)

UNKNOT = GridDiagram(2, (1, 0), (0, 1))


def test_validation():
    with pytest.raises(MalformedGrid):
        GridDiagram(1, (0,), (0,))
    with pytest.raises(MalformedGrid):
        GridDiagram(2, (0, 0), (1, 0))          # xs not a permutation
    with pytest.raises(MalformedGrid):
        GridDiagram(2, (0, 1), (0, 1))          # X and O share a cell
    with pytest.raises(MalformedGrid):
        parse_grid("2\n1 0\n0 2\n")             # out of range
    with pytest.raises(MalformedGrid):
        parse_grid("3\n1 0\n0 1\n")             # wrong length


def test_parse_format_round_trip():
    text = format_grid(UNKNOT)
    assert parse_grid(text) == UNKNOT
    commented = "# tiny example\n2\n1 0   # xs\n0 1\n"
    assert parse_grid(commented) == UNKNOT


def test_unknot_pinned():
    w = braid_from_grid(UNKNOT)
    assert w.strands == 1 and w.letters == ()
    assert w.self_linking == -1
    assert component_count(UNKNOT) == 1
    inv = classical_invariants(UNKNOT)
    assert inv["tb"] == -1 and inv["rot"] == 0
    assert grid_writhe(UNKNOT) == 0


def test_encoder_round_trip():
    rng = random.Random(19)
    for _ in range(40):
        w = random_word(rng, 7, 4)
        g = grid_from_braid(w)
        back = braid_from_grid(g)
        assert back.letters == w.letters and back.strands == w.strands
        assert component_count(g) == len(w.components())


def test_front_invariants_match_braid():
    rng = random.Random(20)
    checked = 0
    for _ in range(40):
        w = random_word(rng, 7, 4)
        if not w.is_knot():
            continue
        inv = classical_invariants(grid_from_braid(w))
        assert inv["tb"] - inv["rot"] == w.self_linking
        checked += 1
    assert checked >= 10
    with pytest.raises(MultiComponent):
        classical_invariants(grid_from_braid(BraidWord(3, (1,))))


def test_marker_stabilizations():
    # two of the four corner insertions shift the front invariants, the
    # other two are plain planar isotopies
    deltas = {"NW": (-1, +1), "SE": (-1, -1), "NE": (0, 0), "SW": (0, 0)}
    rng = random.Random(21)
    grids = [UNKNOT] + [grid_from_braid(random_word(rng, 5, 3))
                        for _ in range(10)]
    for g in grids:
        if component_count(g) != 1:
            continue
        base = classical_invariants(g)
        for corner, (dtb, drot) in deltas.items():
            for c in range(g.n):
                g2 = stabilize_marker(g, c, corner)
                assert g2.n == g.n + 1
                assert component_count(g2) == 1
                inv = classical_invariants(g2)
                assert (inv["tb"] - base["tb"],
                        inv["rot"] - base["rot"]) == (dtb, drot), \
                    (corner, c, format_grid(g))


def test_square_move_pair_and_rewrite():
    for m, b in ((1, ()), (2, (1,)), (2, (-1, 1)), (3, (2,)), (3, (1, -2))):
        g1, g2, loc = square_move_pair(b, m)
        assert sz_plus_rewrite(g1, loc) == g2
        assert sz_plus_rewrite(g2, loc) == g1       # involution
        assert find_square_move(g1) == loc
        rep = verify_flype_sz(g1, g2)
        assert rep["ok"] and rep["theorem"] == "flype-square-move"
        assert rep["inputs"]["m"] == m
        assert rep["checks"]["tb_rot_equal"]
    with pytest.raises(PatternMismatch):
        sz_plus_rewrite(UNKNOT, (0, 0))


def test_square_move_words_are_flype_shapes():
    g1, g2, _ = square_move_pair((1,), 2)
    w1, w2 = braid_from_grid(g1), braid_from_grid(g2)
    # source closes up as conjugate of A s_m s_m B s_m^{-1}, target as
    # the flyped word, here with A empty, B = (1,), m = 2
    f1, f2 = flype_pair((), (1,), 2, 2)

    def cyclic(word):
        return min(word.letters[i:] + word.letters[:i]
                   for i in range(max(len(word.letters), 1)))

    assert cyclic(w1) == cyclic(f1)
    assert cyclic(w2) == cyclic(f2)


def test_verify_flype_sz_rejects_non_pairs():
    g1, _, _ = square_move_pair((1,), 2)
    other, _, _ = square_move_pair((2,), 3)
    with pytest.raises(ShapeMismatch):
        verify_flype_sz(g1, other)
    with pytest.raises(ShapeMismatch):
        verify_flype_sz(UNKNOT, UNKNOT)


def test_verify_flype_sz_swapped_order():
    g1, g2, _ = square_move_pair((-1, 1), 2)
    rep = verify_flype_sz(g2, g1)
    assert rep["ok"] and rep["inputs"]["swapped"]


def test_grid_multi_component():
    # split diagram: two stacked unknot blocks
    g = GridDiagram(4, (1, 0, 3, 2), (0, 1, 2, 3))
    assert component_count(g) == 2
    with pytest.raises(MultiComponent):
        classical_invariants(g)
