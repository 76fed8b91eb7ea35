"""Randomized acceptance suites, shared by the CLI and the test harness.

### CONVENTIONS
# Every part returns a report dict {"name", "ok", "count", "seconds",
# ...detail}; run_all stitches them together.  All randomness flows from
# the explicit seed, so a fixed seed gives identical check outcomes
# (timings are the only volatile fields).  Counts scale linearly via the
# `scale` argument; the defaults are the contract sizes.
"""

import random
import time

import numpy as np
import scipy.sparse as sp

from .braid import BraidWord, random_word
from .complexes import Complex, build_complex, flatten_chain
from .errors import NotCancellable
from .grid import (braid_from_grid, classical_invariants, component_count,
                   grid_from_braid, square_move_pair, stabilize_marker,
                   sz_plus_rewrite, verify_flype_sz)
from .homology import homology_bigraded, homology_groups
from .invariants import cycle_gradings, s_invariant, transverse_cycle
from .moves import (apply_script, cancel_pair, move_support_report,
                    random_move_instance, random_script, verify_diff_flype,
                    verify_diff_markov, verify_destab_vanishing,
                    verify_flype, verify_markov, verify_neg_stab)

# frozen from the independent dense/SNF oracle (tests/oracles.py); the
# acceptance tests re-derive these against the live oracle
GOLDEN_KH = {
    ((), 1): {(0, -1): (1, ()), (0, 1): (1, ())},
    ((1, 1, 1), 2): {(0, 1): (1, ()), (0, 3): (1, ()), (2, 5): (1, ()),
                     (3, 7): (0, (2,)), (3, 9): (1, ())},
    ((-1, -1, -1), 2): {(-3, -9): (1, ()), (-2, -7): (0, (2,)),
                        (-2, -5): (1, ()), (0, -3): (1, ()),
                        (0, -1): (1, ())},
    ((1, -2, 1, -2), 3): {(-2, -5): (1, ()), (-1, -3): (0, (2,)),
                          (-1, -1): (1, ()), (0, -1): (1, ()),
                          (0, 1): (1, ()), (1, 1): (1, ()),
                          (2, 3): (0, (2,)), (2, 5): (1, ())},
}
GOLDEN_S = {((), 1): 0, ((1, 1, 1), 2): 2, ((-1, -1, -1), 2): -2,
            ((1, -2, 1, -2), 3): 0}

# twenty flype shapes: every bound (m = 3, |A|+|B| = 5, k in {-2..3})
# is hit by some row
FLYPE_TRIPLES = (
    ((), (), -2, 1), ((), (), -1, 1), ((), (), 0, 1),
    ((), (), 1, 1), ((), (), 2, 1), ((), (), 3, 1),
    ((1,), (), 1, 2), ((1, -1), (1,), 2, 2), ((1, 1), (1,), -1, 2),
    ((), (1,), -2, 2), ((1,), (1,), 0, 2), ((1,), (-1,), 3, 2),
    ((1, 2), (), 1, 3), ((2,), (1,), 2, 3), ((2, 1), (2,), -1, 3),
    ((1,), (2,), -2, 3), ((), (2, 1), 3, 3), ((2, 2), (2,), 0, 3),
    ((1, 2, 1), (2, 2), 1, 3), ((2,), (2, -1), 2, 3),
)

MOVE_KINDS = ("shift", "insert_rii", "delete_rii", "braid_relation_far",
              "braid_relation_slide", "stab_pos", "stab_neg",
              "destab_pos", "destab_neg")


def _timed(fn):
    t0 = time.time()
    out = fn()
    out["seconds"] = round(time.time() - t0, 3)
    return out


def suite_words(seed, count=100, max_letters=9, max_strands=4):
    rng = random.Random(seed)
    return [random_word(rng, max_letters, max_strands) for _ in range(count)]


def gradings_suite(seed, count=100):
    """Canonical cycle sits in homological degree 0 with lowest quantum
    level exactly the self-linking number."""
    def body():
        words = suite_words(seed, count)
        bad = []
        for w in words:
            hs, q_min, _ = cycle_gradings(w, transverse_cycle(w))
            if hs != {0} or q_min != w.self_linking:
                bad.append(list(w.letters))
        return {"name": "cycle-gradings", "ok": not bad,
                "count": len(words), "failures": bad}
    return _timed(body)


def rank_suite(seed, count=100):
    """Deformed homology: free rank 2^components, torsion-free on knots."""
    def body():
        words = suite_words(seed, count)
        bad = []
        for w in words:
            groups = homology_groups(build_complex(w, "def"))
            rank = sum(r for r, _ in groups.values())
            torsion = any(t for _, t in groups.values())
            expected = 2 ** len(w.components())
            if rank != expected or (w.is_knot() and torsion):
                bad.append([list(w.letters), rank, expected, torsion])
        return {"name": "deformed-rank", "ok": not bad,
                "count": len(words), "failures": bad}
    return _timed(body)


def golden_suite():
    """Frozen bigraded groups for the four pinned closures."""
    def body():
        bad = []
        for (letters, m), want in GOLDEN_KH.items():
            got = homology_bigraded(build_complex(BraidWord(m, letters),
                                                  "kh"))
            norm = {k: (r, tuple(t)) for k, (r, t) in got.items()}
            if norm != want:
                bad.append([list(letters), str(norm)])
        return {"name": "undeformed-goldens", "ok": not bad,
                "count": len(GOLDEN_KH), "failures": bad}
    return _timed(body)


def s_suite(seed, count=100):
    """Pinned concordance values plus the slice-Bennequin style bound
    s >= sl + 1 on every knot in the random suite."""
    def body():
        bad = []
        for (letters, m), want in GOLDEN_S.items():
            got = s_invariant(BraidWord(m, letters))
            if got != want:
                bad.append([list(letters), got, want])
        knots = [w for w in suite_words(seed, count) if w.is_knot()]
        for w in knots:
            if s_invariant(w) < w.self_linking + 1:
                bad.append([list(w.letters), "bound"])
        return {"name": "s-values", "ok": not bad,
                "count": len(GOLDEN_S) + len(knots), "failures": bad}
    return _timed(body)


def markov_suite(seed, count=100, script_len=6):
    """Random legal scripts transport both cycles with filtered
    witnesses; any raise is a failure."""
    def body():
        rng = random.Random(seed)
        bad = []
        for _ in range(count):
            w = random_word(rng, 5, 3)
            moves = random_script(rng, w, rng.randint(1, script_len),
                                  max_letters=8, max_strands=4)
            target = apply_script(w, moves)
            try:
                r1 = verify_markov(w, target, moves)
                r2 = verify_diff_markov(w, target, moves)
                ok = r1["ok"] and r2["ok"]
            except Exception as exc:    # noqa: BLE001 - report, not crash
                ok, r1 = False, {"error": repr(exc)}
            if not ok:
                bad.append([list(w.letters), [list(mv.as_tuple)
                                              for mv in moves],
                            r1.get("error", "")])
        return {"name": "markov-scripts", "ok": not bad, "count": count,
                "failures": bad}
    return _timed(body)


def flype_suite(triples=FLYPE_TRIPLES):
    """Fixed flype table; the k >= 0 rows also run the difference-cycle
    variant."""
    def body():
        bad = []
        for A, B, k, m in triples:
            try:
                rep = verify_flype(A, B, k, m)
                ok = rep["ok"]
                if k >= 0:
                    ok = ok and verify_diff_flype(A, B, k, m)["ok"]
            except Exception as exc:    # noqa: BLE001
                ok = False
                rep = {"error": repr(exc)}
            if not ok:
                bad.append([list(A), list(B), k, m, rep.get("error", "")])
        return {"name": "flype-table", "ok": not bad,
                "count": len(triples), "failures": bad}
    return _timed(body)


def negstab_suite(seed, count=15):
    """Negative stabilization on random closures (with the sign-flip
    control built into the verifier), plus destabilization vanishing
    for one and two negative stabilizations and the nonvanishing
    control on the positive trefoil."""
    def body():
        rng = random.Random(seed)
        bad = []
        for _ in range(count):
            w = random_word(rng, 7, 4)
            pos = rng.choice([None, rng.randint(0, len(w.letters))])
            try:
                rep = verify_neg_stab(w, pos)
                if not (rep["ok"] and rep["checks"]["sign_flip_detected"]):
                    bad.append([list(w.letters), pos, "neg-stab"])
            except Exception as exc:    # noqa: BLE001
                bad.append([list(w.letters), pos, repr(exc)])
        for _ in range(max(count // 3, 2)):
            base = random_word(rng, 4, 3)
            m = base.strands
            one = BraidWord(m + 1, base.letters + (-m,))
            two = BraidWord(m + 2, base.letters + (-m, -(m + 1)))
            try:
                r1 = verify_destab_vanishing(one, 1, expect="zero")
                r2 = verify_destab_vanishing(two, 2, expect="zero")
                if not (r1["ok"] and r2["ok"]):
                    bad.append([list(base.letters), "destab"])
            except Exception as exc:    # noqa: BLE001
                bad.append([list(base.letters), repr(exc)])
        r3 = verify_destab_vanishing(BraidWord(2, (1, 1, 1)), 1,
                                     expect="nonzero")
        if not r3["ok"]:
            bad.append(["trefoil control"])
        return {"name": "negative-stabilization", "ok": not bad,
                "count": count, "failures": bad}
    return _timed(body)


def locality_suite(seed, per_kind=50):
    """Sub-cube support of all four maps on random embeddings of every
    move kind."""
    def body():
        rng = random.Random(seed)
        bad = []
        for kind in MOVE_KINDS:
            for _ in range(per_kind):
                w, mv = random_move_instance(rng, kind)
                try:
                    rep = move_support_report(w, mv)
                    if not rep["ok"]:
                        bad.append([kind, list(w.letters),
                                    list(mv.as_tuple)])
                except Exception as exc:    # noqa: BLE001
                    bad.append([kind, list(w.letters), repr(exc)])
        return {"name": "move-locality", "ok": not bad,
                "count": per_kind * len(MOVE_KINDS), "failures": bad}
    return _timed(body)


GRID_INSTANCES = ((1, ()), (2, (1,)), (2, (-1, 1)), (3, (2,)),
                  (3, (1, -2)), (2, (1, 1)))


def grid_suite(seed, count=40):
    """The transcribed square-move pair plus generated instances; the
    tb - rot = sl cross-check on every grid the suite touches."""
    def body():
        bad = []
        grids = []
        for m, B in GRID_INSTANCES:
            g1, g2, loc = square_move_pair(B, m)
            grids += [g1, g2]
            try:
                rep = verify_flype_sz(g1, g2)
                ok = (rep["ok"] and sz_plus_rewrite(g1, loc) == g2
                      and sz_plus_rewrite(g2, loc) == g1)
            except Exception as exc:    # noqa: BLE001
                ok, rep = False, {"error": repr(exc)}
            if not ok:
                bad.append([m, list(B), rep.get("error", "")])
        rng = random.Random(seed)
        small = 0
        while small < count:
            w = random_word(rng, 4, 3)
            g = grid_from_braid(w)
            grids.append(g)
            if g.n <= 8:
                small += 1
            for corner in ("NW", "NE", "SW", "SE"):
                grids.append(stabilize_marker(g, rng.randrange(g.n),
                                              corner))
        for g in grids:
            if component_count(g) != 1:
                continue
            tb, rot = classical_invariants(g)
            if tb - rot != braid_from_grid(g).self_linking:
                bad.append(["tb-rot", g.n, list(g.xs), list(g.os)])
        return {"name": "grid-square-move", "ok": not bad,
                "count": len(grids), "failures": bad}
    return _timed(body)


def random_filtered_complex(rng, max_pairs=5, max_free=3):
    """Direct sum of unit pairs and free generators, sheared by a
    random filtered unitriangular automorphism; returns (complex,
    (alpha, beta)) with a guaranteed unit pairing of equal level."""
    gr_h, gr_q, entries = [], [], []
    pairs = []
    for _ in range(rng.randint(1, max_pairs)):
        h, q = rng.randint(-2, 2), rng.randint(-3, 3)
        a = len(gr_h)
        gr_h += [h, h + 1]
        gr_q += [q, q]
        entries.append((a + 1, a, rng.choice((1, -1))))
        pairs.append((a, a + 1))
    for _ in range(rng.randint(0, max_free)):
        gr_h.append(rng.randint(-2, 3))
        gr_q.append(rng.randint(-3, 3))
    n = len(gr_h)
    perm = list(range(n))
    rng.shuffle(perm)
    inv = [0] * n
    for new, old in enumerate(perm):
        inv[old] = new
    gr_h = np.array([gr_h[old] for old in perm])
    gr_q = np.array([gr_q[old] for old in perm])
    d = sp.lil_matrix((n, n), dtype=np.int64)
    for r, c, v in entries:
        d[inv[r], inv[c]] = v
    alpha, beta = pairs[0]
    a_new, b_new = inv[alpha], inv[beta]
    shear = sp.identity(n, dtype=np.int64, format="lil")
    for i in range(n):
        for j in range(i + 1, n):
            # leaving row b and column a of the shear trivial keeps the
            # tracked pairing entry literally unchanged
            if i == b_new or j == a_new:
                continue
            if (gr_h[i] == gr_h[j] and gr_q[i] >= gr_q[j]
                    and rng.random() < 0.3):
                shear[i, j] = rng.randint(-2, 2)
    shear = shear.tocsr()
    nil = (shear - sp.identity(n, dtype=np.int64, format="csr")).tocsr()
    inv_m = sp.identity(n, dtype=np.int64, format="csr")
    power = -nil
    while power.nnz:
        inv_m = inv_m + power
        power = -(power @ nil)
    cx = Complex(gr_h, gr_q, (shear @ d.tocsr() @ inv_m).tocsr())
    cx.check_d_squared()
    cx.check_filtered()
    return cx, (a_new, b_new)


def cancellation_suite(seed, count=500):
    """Homotopy-equivalence identities of single-pair elimination hold
    exactly; a non-unit pairing and an unequal-level pairing are both
    refused."""
    def body():
        rng = random.Random(seed)
        bad = []
        for _ in range(count):
            cx, (alpha, beta) = random_filtered_complex(rng)
            try:
                reduced, rec = cancel_pair(cx, alpha, beta)
                rec.verify("full")
                reduced.check_d_squared()
                reduced.check_filtered()
            except Exception as exc:    # noqa: BLE001
                bad.append([cx.n, repr(exc)])
        d2 = sp.csr_matrix(([2], ([1], [0])), shape=(2, 2), dtype=np.int64)
        try:
            cancel_pair(Complex([0, 1], [0, 0], d2), 0, 1)
            bad.append(["non-unit pairing accepted"])
        except NotCancellable:
            pass
        du = sp.csr_matrix(([1], ([1], [0])), shape=(2, 2), dtype=np.int64)
        try:
            cancel_pair(Complex([0, 1], [0, 2], du), 0, 1)
            bad.append(["filtration-breaking pair accepted"])
        except NotCancellable:
            pass
        return {"name": "pair-cancellation", "ok": not bad,
                "count": count + 2, "failures": bad}
    return _timed(body)


def run_all(seed=0, scale=1.0):
    def cnt(base, floor=1):
        return max(floor, int(round(base * scale)))

    parts = [
        gradings_suite(seed, cnt(100)),
        rank_suite(seed, cnt(100)),
        golden_suite(),
        s_suite(seed, cnt(100)),
        markov_suite(seed, cnt(100)),
        flype_suite(FLYPE_TRIPLES[:cnt(len(FLYPE_TRIPLES))]),
        negstab_suite(seed, cnt(15, 3)),
        locality_suite(seed, cnt(50, 2)),
        grid_suite(seed, cnt(40, 5)),
        cancellation_suite(seed, cnt(500, 10)),
    ]
    return {"seed": seed, "scale": scale,
            "ok": all(p["ok"] for p in parts), "parts": parts}
