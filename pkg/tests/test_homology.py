"""Integer linear algebra and homology: transforms are exact, witnesses
are real witnesses, groups match the sympy SNF on dense blocks."""

import random

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

import oracles
from transkh.braid import BraidWord, random_word
from transkh.complexes import build_complex, flatten_chain
from transkh.homology import (class_vanishes, find_bounding_chain,
                              homology_bigraded, homology_groups,
                              rational_rank, snf_with_transforms,
                              solve_dense_int, solve_dense_rational)
from transkh.invariants import transverse_cycle


def rand_matrix(rng, m, n, lo=-4, hi=4):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def test_snf_transform_identity():
    rng = random.Random(6)
    for _ in range(60):
        m, n = rng.randint(0, 5), rng.randint(1, 5)
        A = rand_matrix(rng, m, n)
        diag, U, V = snf_with_transforms(A)
        UA = sympy.Matrix(U) * sympy.Matrix(m, n, lambda i, j: A[i][j]) \
            if m else sympy.zeros(0, n)
        S = UA * sympy.Matrix(V) if m else sympy.zeros(0, n)
        for i in range(m):
            for j in range(n):
                want = diag[i] if (i == j and i < len(diag)) else 0
                assert S[i, j] == want
        # unimodular transforms
        if m:
            assert abs(sympy.Matrix(U).det()) == 1
        assert abs(sympy.Matrix(V).det()) == 1
        # invariant factors divide forward
        for a, b in zip(diag, diag[1:]):
            assert b % a == 0
        ref = smith_normal_form(sympy.Matrix(m, n, lambda i, j: A[i][j])) \
            if m and n else None
        if ref is not None:
            got = sorted(abs(x) for x in diag)
            want = sorted(abs(ref[i, i]) for i in range(min(m, n))
                          if ref[i, i] != 0)
            assert got == want


def test_integer_solver():
    rng = random.Random(7)
    solved = unsolvable = 0
    for _ in range(80):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = rand_matrix(rng, m, n)
        if rng.random() < 0.5:
            x = [rng.randint(-3, 3) for _ in range(n)]
            b = [sum(A[i][j] * x[j] for j in range(n)) for i in range(m)]
        else:
            b = [rng.randint(-6, 6) for _ in range(m)]
        got = solve_dense_int(A, b)
        if got is None:
            # cross-check: no rational solution either, or a rational
            # one exists but no integer one; verify with sympy
            Am = sympy.Matrix(A)
            bm = sympy.Matrix(b)
            sol = Am.gauss_jordan_solve(bm) \
                if Am.rank() == Am.row_join(bm).rank() else None
            if sol is None:
                unsolvable += 1
            continue
        assert all(sum(A[i][j] * got[j] for j in range(n)) == b[i]
                   for i in range(m))
        solved += 1
    assert solved > 10 and unsolvable > 5


def test_rational_solver_and_rank():
    rng = random.Random(8)
    for _ in range(40):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = rand_matrix(rng, m, n)
        assert rational_rank(A) == sympy.Matrix(A).rank()
        x = [rng.randint(-3, 3) for _ in range(n)]
        b = [sum(A[i][j] * x[j] for j in range(n)) for i in range(m)]
        got = solve_dense_rational(A, b)
        assert got is not None
        assert all(sum(A[i][j] * got[j] for j in range(n)) == b[i]
                   for i in range(m))


@pytest.mark.parametrize("letters,strands", [
    ((), 1), ((1, 1, 1), 2), ((-1, -1, -1), 2), ((1, -2, 1, -2), 3),
    ((1, 1), 2), ((1, -1), 2),
])
def test_bigraded_groups_match_oracle(letters, strands):
    got = homology_bigraded(build_complex(BraidWord(strands, letters),
                                          "kh"))
    want = oracles.kh_homology(list(letters), strands)
    assert {k: (r, list(t)) for k, (r, t) in got.items()} == want


def test_homology_groups_unlink_rank():
    # def theory: rank 2^components, concentrated in degree 0 for the
    # trivial braid
    cx = build_complex(BraidWord(3, ()), "def")
    groups = homology_groups(cx)
    assert groups == {0: (8, ())}


def test_bounding_chain_is_a_boundary():
    rng = random.Random(9)
    hits = 0
    for _ in range(20):
        w = random_word(rng, 6, 3)
        cx = build_complex(w, "def")
        # boundary of a random h-homogeneous chain is certainly a boundary
        h = rng.choice(sorted(set(int(v) for v in cx.gr_h)))
        pool = [i for i in range(cx.n) if cx.gr_h[i] == h]
        x = {i: rng.randint(-2, 2) for i in
             rng.sample(pool, min(4, len(pool)))}
        x = {i: v for i, v in x.items() if v}
        if not x:
            continue
        z = {}
        coo = cx.d.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            if c in x:
                z[int(r)] = z.get(int(r), 0) + int(v) * x[c]
        z = {k: v for k, v in z.items() if v}
        if not z:
            continue
        wit = find_bounding_chain(cx, z)
        assert wit is not None
        hits += 1
    assert hits >= 8


def test_window_quotient_and_floor():
    w = BraidWord(2, (1, 1, 1))
    cx = build_complex(w, "def")
    psi = flatten_chain(cx, transverse_cycle(w))
    sl = w.self_linking
    # the class is nonzero in the first window
    assert not class_vanishes(cx, psi, q_min=sl, q_max=sl + 2)
    # quotienting away everything leaves nothing to bound
    assert find_bounding_chain(cx, psi, q_min=sl, q_max=sl) == {}
    # a chain below the window floor is refused
    with pytest.raises(AssertionError):
        find_bounding_chain(cx, psi, q_min=sl + 2, q_max=sl + 4)


def test_witness_respects_source_mask():
    w = BraidWord(2, (1, -1))
    cx = build_complex(w, "def")
    rng = random.Random(10)
    coo = cx.d.tocoo()
    # pick one differential column and bound its image with full mask
    for c in sorted(set(coo.col)):
        z = {int(r): int(v) for r, v in
             zip(coo.row[coo.col == c], coo.data[coo.col == c])}
        mask = np.zeros(cx.n, dtype=bool)
        mask[c] = True
        wit = find_bounding_chain(cx, z, src_mask=mask)
        assert wit is not None and set(wit) <= {int(c)}
        break
