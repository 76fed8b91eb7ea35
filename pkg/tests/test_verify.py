"""Certificate builders: report shape, witness levels, the explicit
negative-stabilization pattern, flype sub-cube checks, and the
destabilization obstruction controls."""

import random

import pytest

from transkh.braid import BraidWord
from transkh.errors import (PatternMismatch, VerificationFailed)
from transkh.moves import (apply_move, move, move_support_report,
                           random_move_instance, verify_destab_vanishing,
                           verify_diff_flype, verify_diff_markov,
                           verify_flype, verify_markov, verify_neg_stab,
                           verify_stab_once_rational)
from transkh.suite import MOVE_KINDS


def test_markov_pinned_conjugation():
    w = BraidWord(2, (1, 1, 1))
    rep = verify_markov(w, None, [("shift", 1)])
    assert rep["theorem"] == "markov-invariance" and rep["ok"]
    assert rep["sign"] in (+1, -1)
    assert rep["witness"]["level"] == w.self_linking
    if rep["witness"]["chain"]:
        assert rep["witness"]["min_gr_q"] >= w.self_linking
    assert len(rep["trace"]) == 1


def test_markov_positive_stabilization():
    w = BraidWord(2, (1, -1))
    rep = verify_markov(w, BraidWord(3, (1, -1, 2)), [("stab_pos", 2)])
    assert rep["ok"] and rep["inputs"]["target_strands"] == 3
    # and for the twin difference, one level higher
    rep2 = verify_diff_markov(w, None, [("stab_pos", 2)])
    assert rep2["ok"]
    assert rep2["witness"]["level"] == w.self_linking + 2


def test_markov_rejects_bad_scripts():
    w = BraidWord(2, (1, 1))
    with pytest.raises(PatternMismatch):
        verify_markov(w, None, [("stab_neg", 0)])   # changes sl
    with pytest.raises(PatternMismatch):
        verify_markov(w, BraidWord(2, (1,)), [("shift", 1)])  # wrong target


def test_markov_both_twins():
    w = BraidWord(3, (1, -2, 1))
    script = [("shift", 2), ("insert_rii", 0, 2, 1), ("delete_rii", 0)]
    for which in (+1, -1):
        rep = verify_markov(w, None, script, which=which)
        assert rep["ok"] and rep["inputs"]["twin"] == which


def test_neg_stab_report():
    w = BraidWord(2, (1, 1, 1))
    rep = verify_neg_stab(w)
    assert rep["theorem"] == "negative-stabilization" and rep["ok"]
    checks = rep["checks"]
    for key in ("explicit_witness_plus", "explicit_witness_minus",
                "combination_1_0", "combination_0_1", "combination_1_1",
                "sign_flip_detected"):
        assert checks[key], key
    # witness sits at the dropped self-linking level
    assert rep["witness"]["level"] == w.self_linking - 2
    for twin in ("plus", "minus"):
        assert rep["signs"][twin]["forward"] in (+1, -1)
        assert rep["signs"][twin]["backward"] in (+1, -1)


def test_neg_stab_interior_position():
    rep = verify_neg_stab(BraidWord(3, (1, -2)), pos=1)
    assert rep["ok"] and rep["inputs"]["position"] == 1


def test_flype_reports():
    rep = verify_flype((), (), 1, 1)
    assert rep["theorem"] == "flype-invariance" and rep["ok"]
    assert rep["inputs"]["word"] == "1,-1" and rep["inputs"]["target"] == "-1,1"
    assert rep["checks"]["cycle_support"]
    assert rep["checks"]["image_support"]
    assert rep["checks"]["witness_sub_cube"]
    # k = 0 and k < 0 branches
    assert verify_flype((), (), 0, 1)["ok"]
    assert verify_flype((), (), -1, 1)["ok"]
    assert verify_flype((1,), (-1,), 2, 2)["ok"]


def test_diff_flype():
    assert verify_diff_flype((), (), 1, 1)["ok"]
    rep = verify_diff_flype((1,), (1,), 1, 2)
    assert rep["ok"]
    w1_sl = BraidWord(3, (1, 2, 1, -2)).self_linking
    assert rep["witness"]["level"] == w1_sl + 2
    with pytest.raises(PatternMismatch):
        verify_diff_flype((), (), -1, 1)


def test_destab_vanishing_controls():
    stab1 = BraidWord(3, (1, 1, 1, -2))
    rep = verify_destab_vanishing(stab1, 1, expect="zero")
    assert rep["ok"] and rep["vanishes"] and rep["stabilized_suffix"]
    assert rep["witness"]["min_gr_q"] >= rep["inputs"]["window"][0]
    stab2 = BraidWord(4, (1, 1, 1, -2, -3))
    rep2 = verify_destab_vanishing(stab2, 2, expect="zero")
    assert rep2["ok"] and rep2["vanishes"]
    # undeformed positive torus word: class survives the first window
    ctrl = verify_destab_vanishing(BraidWord(2, (1, 1, 1)), 1,
                                   expect="nonzero")
    assert ctrl["ok"] and not ctrl["vanishes"]
    assert not ctrl["stabilized_suffix"]
    with pytest.raises(VerificationFailed):
        verify_destab_vanishing(BraidWord(2, (1, 1, 1)), 1, expect="zero")
    with pytest.raises(VerificationFailed):
        verify_destab_vanishing(stab1, 1, expect="nonzero")


def test_stab_once_rational():
    w = BraidWord(2, (1, 1, 1))
    rep = verify_stab_once_rational(w, None, [("stab_pos", 3), ("shift", 1)])
    assert rep["ok"] and rep["alpha"] != "0"
    assert rep["theorem"] == "graded-class-transport"


def test_move_support_reports():
    cases = [
        (BraidWord(2, (1, -1)), move("shift", 1)),
        (BraidWord(3, (1, 2)), move("insert_rii", 1, 1, -1)),
        (BraidWord(3, (2, -2, 1)), move("delete_rii", 0)),
        (BraidWord(4, (1, 3, -2)), move("braid_relation", 0, 0)),
        (BraidWord(3, (1, 2, 1)), move("braid_relation", 0, 1)),
        (BraidWord(2, (1,)), move("stab_neg", 0)),
        (BraidWord(3, (1, 2)), move("destab_pos", 1)),
    ]
    for word, mv in cases:
        rep = move_support_report(word, mv)
        assert rep["ok"], (word, mv)
        assert rep["entries"]["f"] > 0


def test_random_move_instances_are_legal():
    rng = random.Random(18)
    assert len(MOVE_KINDS) == 9
    for kind in MOVE_KINDS:
        for _ in range(10):
            word, mv = random_move_instance(rng, kind)
            out = apply_move(word, mv)      # must not raise
            if kind.startswith("braid_relation"):
                assert mv.kind == "braid_relation"
                assert (mv.args[1] == 0) == kind.endswith("far")
            else:
                assert mv.kind == kind
            assert len(out.letters) >= 0
