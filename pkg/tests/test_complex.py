"""Cube complexes against the independent dense construction: same
generators, same gradings, same matrix entries, for all three label
theories."""

import random

import numpy as np
import pytest

import oracles
from transkh.braid import BraidWord, random_word
from transkh.complexes import (Complex, add_chains, apply_matrix, bits_of,
                               build_complex, chain_gradings, flatten_chain,
                               unflatten_chain)
from transkh.errors import FiltrationViolation, TooLarge


def oracle_index_map(cx, letters, strands, gens):
    """Oracle generator (bits, labels) -> package flat index.

    The package orders labels by mask over circles sorted by smallest
    segment key; the oracle's tracer sorts circles the same way, so the
    label tuple IS the mask bits."""
    n = len(letters)
    out = np.empty(len(gens), dtype=np.int64)
    for gi, (bits, labels) in enumerate(gens):
        v = sum(b << j for j, b in enumerate(bits))
        mask = sum(l << a for a, l in enumerate(labels))
        out[gi] = cx.cube.index_of(v, mask)
    return out


@pytest.mark.parametrize("theory", ["kh", "def", "lee"])
def test_matches_dense_oracle(theory):
    rng = random.Random(4)
    words = [random_word(rng, 5, 3) for _ in range(6)]
    words += [BraidWord(2, (1, 1, 1)), BraidWord(3, (1, -2, 1, -2))]
    for w in words:
        cx = build_complex(w, theory)
        gens, diff, gr = oracles.build_complex(list(w.letters), w.strands,
                                               theory)
        assert cx.n == len(gens)
        ids = oracle_index_map(cx, w.letters, w.strands, gens)
        assert sorted(ids) == list(range(cx.n))
        for gi, (h, q) in enumerate(gr):
            assert cx.gr_h[ids[gi]] == h
            assert cx.gr_q[ids[gi]] == q
        dense = np.zeros((cx.n, cx.n), dtype=np.int64)
        for gi, outs in diff.items():
            for ti, co in outs.items():
                dense[ids[ti], ids[gi]] = co
        assert np.array_equal(cx.d.toarray(), dense), \
            (theory, w.letters)


def test_d_squared_and_filtration():
    rng = random.Random(5)
    for _ in range(10):
        w = random_word(rng, 7, 4)
        for theory in ("kh", "def", "lee"):
            cx = build_complex(w, theory)
            cx.check_d_squared()
            cx.check_filtered()


def test_kh_is_quantum_homogeneous_def_is_not():
    w = BraidWord(2, (1, 1, 1))
    kh = build_complex(w, "kh")
    coo = kh.d.tocoo()
    assert np.all(kh.gr_q[coo.row] == kh.gr_q[coo.col])
    de = build_complex(w, "def")
    coo = de.d.tocoo()
    assert np.any(de.gr_q[coo.row] > de.gr_q[coo.col])


def test_generator_count_is_sum_of_label_spaces():
    w = BraidWord(3, (1, -2, 1))
    cx = build_complex(w, "kh")
    total = 0
    for v in range(1 << 3):
        from transkh.resolution import Resolution
        total += 1 << Resolution(3, w.letters, bits_of(v, 3)).n_circles
    assert cx.n == total


def test_size_cap():
    with pytest.raises(TooLarge):
        build_complex(BraidWord(2, (1,) * 25), "kh")


def test_chain_plumbing_roundtrip():
    w = BraidWord(2, (1, -1))
    cx = build_complex(w, "def")
    chain = {(0, 0): 2, (3, 1): -1}
    flat = flatten_chain(cx, chain)
    assert unflatten_chain(cx, flat) == chain
    doubled = add_chains(flat, flat)
    assert doubled == {k: 2 * v for k, v in flat.items()}
    assert add_chains(flat, flat, scale=-1) == {}
    image = apply_matrix(cx.d, flat)
    for idx in image:
        assert cx.gr_h[idx] == cx.gr_h[min(flat)] + 1 or len(set(
            cx.gr_h[i] for i in flat)) > 1


def test_chain_gradings_reports_min_level():
    w = BraidWord(2, (1, 1, 1))
    cx = build_complex(w, "def")
    z = {0: 1, 1: 3}
    h, q_min = chain_gradings(cx, z)
    assert h == {int(cx.gr_h[0]), int(cx.gr_h[1])}
    assert q_min == min(int(cx.gr_q[0]), int(cx.gr_q[1]))


def test_filtration_violation_detected():
    d = np.zeros((2, 2), dtype=np.int64)
    d[1, 0] = 1
    import scipy.sparse as sp
    cx = Complex([0, 1], [0, -2], sp.csr_matrix(d))
    with pytest.raises(FiltrationViolation):
        cx.check_filtered()
