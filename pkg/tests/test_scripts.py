"""Move scripts: text round-trip, word-level replay of every move kind,
legality of generated scripts, and the flype rewiring script."""

import random

import pytest

from transkh.braid import BraidWord, flype_pair, random_word
from transkh.errors import (IndexOutOfRange, InvalidDestabilization,
                            PatternMismatch)
from transkh.moves import (apply_move, apply_script, flype_script,
                           format_script, move, parse_script, random_script,
                           script_records)


def test_script_text_round_trip():
    text = """
# comment line
shift 2
insert_rii 0 1 -1   # trailing comment
braid_relation 3 0
stab_pos 1

destab_neg 0
"""
    moves = parse_script(text)
    assert [mv.as_tuple() for mv in moves] == [
        ("shift", 2), ("insert_rii", 0, 1, -1), ("braid_relation", 3, 0),
        ("stab_pos", 1), ("destab_neg", 0)]
    assert parse_script(format_script(moves)) == moves
    assert format_script([]) == ""


def test_script_parse_errors():
    with pytest.raises(PatternMismatch, match="line 1"):
        parse_script("warp 3")
    with pytest.raises(PatternMismatch, match="line 2"):
        parse_script("shift 1\nshift 1 2")


def test_replay_shift():
    w = BraidWord(3, (1, 2, -1))
    assert apply_move(w, move("shift", 1)).letters == (2, -1, 1)
    assert apply_move(w, move("shift", 3)).letters == (1, 2, -1)


def test_replay_insert_delete_pair():
    w = BraidWord(3, (1, 2))
    w2 = apply_move(w, move("insert_rii", 1, 2, -1))
    assert w2.letters == (1, -2, 2, 2)
    assert apply_move(w2, move("delete_rii", 1)).letters == w.letters
    with pytest.raises(IndexOutOfRange):
        apply_move(w, move("insert_rii", 0, 3, 1))
    with pytest.raises(PatternMismatch):
        apply_move(w, move("delete_rii", 0))


def test_replay_braid_relation():
    w = BraidWord(4, (1, 3, 2))
    assert apply_move(w, move("braid_relation", 0, 0)).letters == (3, 1, 2)
    with pytest.raises(PatternMismatch):
        apply_move(BraidWord(3, (1, 2, 1)), move("braid_relation", 0, 0))
    # the sliding relation, including a mixed-sign variant
    assert apply_move(BraidWord(3, (1, 2, 1)),
                      move("braid_relation", 0, 1)).letters == (2, 1, 2)
    assert apply_move(BraidWord(3, (-2, -1, 2)),
                      move("braid_relation", 0, 1)).letters == (1, -2, -1)


def test_replay_stab_destab():
    w = BraidWord(2, (1, 1))
    up = apply_move(w, move("stab_pos", 1))
    assert up.strands == 3 and up.letters == (1, 2, 1)
    back = apply_move(up, move("destab_pos", 1))
    assert back.letters == w.letters and back.strands == 2
    dn = apply_move(w, move("stab_neg", 2))
    assert dn.letters == (1, 1, -2)
    with pytest.raises(InvalidDestabilization):
        apply_move(dn, move("destab_pos", 2))       # sign mismatch
    with pytest.raises(InvalidDestabilization):
        apply_move(BraidWord(3, (2, 1, 2)), move("destab_pos", 0))
    with pytest.raises(InvalidDestabilization):
        apply_move(BraidWord(3, (1, 1)), move("destab_pos", 0))


def test_apply_script_is_composition():
    rng = random.Random(16)
    for _ in range(20):
        w = random_word(rng, 5, 3)
        script = random_script(rng, w, 5)
        step = w
        for mv in script:
            step = apply_move(step, mv)
        assert apply_script(w, script).letters == step.letters


def test_random_scripts_preserve_closure_data():
    rng = random.Random(17)
    for _ in range(40):
        w = random_word(rng, 5, 3)
        script = random_script(rng, w, rng.randint(1, 8))
        out = apply_script(w, script)
        assert out.self_linking == w.self_linking
        assert len(out.components()) == len(w.components())
        assert len(out.letters) <= 9 and out.strands <= 5


def test_flype_script_replays_to_target():
    cases = [
        ((), (), 2, 1), ((), (), 0, 1), ((), (), -2, 1),
        ((1,), (-1,), 3, 2), ((1, -1), (1,), 1, 2),
        ((2, 1), (-2,), 2, 3), ((), (1, 2), -1, 3),
    ]
    for A, B, k, m in cases:
        w1, w2 = flype_pair(A, B, k, m)
        script = flype_script(len(A), len(B), k, m)
        got = apply_script(w1, script)
        assert got.letters == w2.letters and got.strands == w2.strands, \
            (A, B, k, m, got.letters, w2.letters)


def test_script_records_smoke():
    w = BraidWord(2, (1, -1))
    script = [move("delete_rii", 0), move("stab_pos", 0),
              move("shift", 0)]
    out, rec, trace = script_records(w, script)
    assert out.letters == (2,) and out.strands == 3
    rec.verify("full")
    assert len(trace) == 3
    assert trace[0]["from"] == (1, -1) and trace[-1]["to"] == (2,)
    # empty script gives the identity record
    same, rec0, trace0 = script_records(w, [])
    assert same.letters == w.letters and trace0 == []
    rec0.verify("full")
