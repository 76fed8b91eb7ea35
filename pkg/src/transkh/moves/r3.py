"""Records for the braid-like triple slide s_i s_{i+1} s_i ~ s_{i+1} s_i s_{i+1}.

### CONVENTIONS
# Pattern at word position pos: letters on indices (i, i+1, i) with
# exponents (a, b, c), rewritten to indices (i+1, i, i+1) with
# exponents (c, b, a).  The slide is braid-like only when b == a or
# b == c.
#
# Production path (triple_slide_record): both complexes are cones over
# the bit of the letter carrying exponent `a` resp. `c` (the one whose
# deletion leaves the same two-letter word on both sides).  The
# cap/cup-frozen side of the cone retracts onto a single 2-cube face S
# by a merge pass and a split pass over the local free circle; the
# parallel-frozen sides match through the common shorter word, the S
# faces match segment-by-segment outside the window, and the two cones
# are compared block by block.  If the edge blocks fail to match on the
# nose (they do match in every case we have run), a correcting homotopy
# is solved for degreewise.
#
# Literal path (triple_slide_record_via_parent): insert the six-letter
# trivial tangle and greedily cancel everything not over the face that
# restores the target word, lexicographically smallest unit pair first,
# refusing cancellations that would edit the surviving face.  Kept for
# cross-checking the production path on small words.
"""

from collections import defaultdict

import numpy as np
import scipy.sparse as sp

from ..braid import BraidWord
from ..complexes import build_complex
from ..errors import (PatternMismatch, ReductionStuck, VerificationFailed)
from ..homology import solve_boundary_map
from ..resolution import Resolution
from .records import (ChainMapRecord, cancel_pair, build_cone,
                      cone_comparison_target, cone_comparison_source,
                      same_matrix)
from .elementary import (_contract_tracked, _face_word_dst, _match_circles,
                         _merge_sub_levels, _split_quot_levels, _ResCache,
                         face_indices, signed_iso_record)


def slide_pattern(letters, pos):
    """(a, b, c, i, direction) of a slidable triple, or PatternMismatch.
    direction +1 means (i, i+1, i) -> (i+1, i, i+1)."""
    if pos < 0 or pos + 3 > len(letters):
        raise PatternMismatch("window %d out of range" % pos)
    x, y, z = letters[pos:pos + 3]
    ix, iy, iz = abs(x), abs(y), abs(z)
    if ix != iz or abs(ix - iy) != 1:
        raise PatternMismatch("letters at %d do not form a triple" % pos)
    a, b, c = (1 if x > 0 else -1), (1 if y > 0 else -1), (1 if z > 0 else -1)
    if b != a and b != c:
        raise PatternMismatch("middle exponent blocks the slide")
    return a, b, c, min(ix, iy), (1 if iy > ix else -1)


def slide_word(word, pos):
    letters = word.letters
    a, b, c, i, direction = slide_pattern(letters, pos)
    x, y, z = letters[pos:pos + 3]
    new = (c * abs(y), b * abs(x), a * abs(y))
    return BraidWord(word.strands, letters[:pos] + new + letters[pos + 3:])


# ------------------------------------------------------------------
# production path: cone over the repeated-index letter

def _local_circle_face(word, pos, chi, xb, q1, q2):
    """Find the unique 2-cube face (bits of q1, q2) of the cap/cup-frozen
    side owning a circle inside the window's two inner gaps; return
    (bits, a segment key of that circle)."""
    m = word.strands
    inner = {g * m + t for g in (pos + 1, pos + 2) for t in range(m)}
    found = []
    for b1 in (0, 1):
        for b2 in (0, 1):
            bits = [0] * len(word.letters)
            bits[chi], bits[q1], bits[q2] = xb, b1, b2
            res = Resolution(m, word.letters, tuple(bits))
            local = [circ for circ in res.circles
                     if all(s in inner for s in circ)]
            if local:
                assert len(local) == 1, "more than one local circle"
                found.append(((b1, b2), min(local[0])))
    assert len(found) == 1, "free-circle face is not unique"
    return found[0]


def _half_cone(word, cx, pos, chi):
    """Collapse the cap/cup side of the cone over letter chi down to its
    S face.  Returns a dict with every piece the comparison needs."""
    letters = word.letters
    cs = 1 if letters[chi] > 0 else -1
    pb, xb = (0, 1) if cs > 0 else (1, 0)      # parallel / cap-cup bits
    q1, q2 = sorted(set((pos, pos + 1, pos + 2)) - {chi})
    face_a, ids_a = face_indices(cx, {chi: pb})
    face_x, ids_x = face_indices(cx, {chi: xb})
    d = cx.d.tocsr()
    if cs > 0:
        edge = d[ids_x][:, ids_a]              # A -> X
    else:
        edge = d[ids_a][:, ids_x]              # X -> A
    (o1, o2), u_key = _local_circle_face(word, pos, chi, xb, q1, q2)
    assert o1 != o2, "free-circle face is not mixed"
    j_in = q1 if o1 == 1 else q2               # split edge into O
    j_out = q1 if o1 == 0 else q2              # merge edge out of O
    lv_d = _merge_sub_levels(
        cx, j_out,
        lambda v: (v >> chi) & 1 == xb and (v >> j_in) & 1 == 1, u_key)
    lv_e = _split_quot_levels(
        cx, j_in,
        lambda v: (v >> chi) & 1 == xb and (v >> j_out) & 1 == 0, u_key)
    pos_x = {int(b): r for r, b in enumerate(ids_x)}
    lv_d = [[(pos_x[p], pos_x[q]) for p, q in level] for level in lv_d]
    cx_s, rec_d, surv = _contract_tracked(face_x, lv_d, "sub")
    pos_d = {int(orig): r for r, orig in enumerate(surv)}
    lv_e = [[(pos_d[pos_x[p]], pos_d[pos_x[q]]) for p, q in level]
            for level in lv_e]
    cx_s, rec_e, surv2 = _contract_tracked(cx_s, lv_e, "quot")
    surv = surv[surv2]
    rec_x = rec_d.then(rec_e)                  # face_x -> cx_s
    surv_big = ids_x[surv]
    s_bits = {chi: xb, q1: 1 - o1, q2: 1 - o2}
    cube = cx.cube
    for b in surv_big:
        v, _ = cube.vertex_of(int(b))
        assert all((v >> q) & 1 == bit for q, bit in s_bits.items()), \
            "survivor outside the S face"
    if cs > 0:
        cone1, cone2, cmp_rec = cone_comparison_target(face_a, edge, rec_x)
        e2 = (rec_x.f @ edge).tocsr()
        ids_cone = np.concatenate([ids_a, ids_x])
        n_first = face_a.n
    else:
        cone1, cone2, cmp_rec = cone_comparison_source(face_a, edge, rec_x)
        e2 = (edge @ rec_x.g).tocsr()
        ids_cone = np.concatenate([ids_x, ids_a])
        n_first = face_x.n
    # permutation record cx -> cone1
    n = cx.n
    ones = np.ones(n, dtype=np.int64)
    p_f = sp.csr_matrix((ones, (np.arange(n), ids_cone)), shape=(n, n))
    p_g = sp.csr_matrix((ones, (ids_cone, np.arange(n))), shape=(n, n))
    z = sp.csr_matrix((n, n), dtype=np.int64)
    perm = ChainMapRecord(cx, cone1, p_f, p_g, z, z.copy())
    assert same_matrix(cone1.d.tocsr() @ p_f, p_f @ cx.d.tocsr()), \
        "cone ordering is not a chain map"
    return {
        "cs": cs, "chi": chi, "q": (q1, q2), "s_bits": s_bits,
        "face_a": face_a, "ids_a": ids_a, "cx_s": cx_s,
        "surv_s": surv_big, "e2": e2, "perm": perm, "cmp": cmp_rec,
        "cone2": cone2, "n_a": face_a.n, "n_s": cx_s.n,
    }


def _s_face_iso(word1, cx1, half1, word2, cx2, half2, pos):
    """Signed iso S(K) -> S(K~) matching circles outside the window."""
    m = word1.strands
    outer_keys = {g * m + t for g in range(len(word1.letters) + 1)
                  for t in range(m)} - \
        {g * m + t for g in (pos + 1, pos + 2) for t in range(m)}
    cache1, cache2 = _ResCache(word1), _ResCache(word2)
    cube1, cube2 = cx1.cube, cx2.cube
    window = (pos, pos + 1, pos + 2)
    base2 = 0
    for q, bit in half2["s_bits"].items():
        base2 |= bit << q
    pos_s2 = {int(b): r for r, b in enumerate(half2["surv_s"])}
    n_s = half1["cx_s"].n
    dst = np.empty(n_s, dtype=np.int64)
    block = np.empty(n_s, dtype=np.int64)
    perm_cache = {}
    for r, b in enumerate(half1["surv_s"]):
        v, mask = cube1.vertex_of(int(b))
        outer = v
        for q in window:
            outer &= ~(1 << q)
        v2 = outer | base2
        if v not in perm_cache:
            r1, r2 = cache1(v), cache2(v2)
            assert r1.n_circles == r2.n_circles, "circle counts differ"
            perm_cache[v] = _match_circles(r1, r2, lambda k: k,
                                           on_keys=outer_keys)
        perm = perm_cache[v]
        mask2 = 0
        for ci, cj in enumerate(perm):
            mask2 |= ((mask >> ci) & 1) << cj
        dst[r] = pos_s2[cube2.index_of(v2, mask2)]
        block[r] = v
    return signed_iso_record(half1["cx_s"], half2["cx_s"], dst, block)


def _solve_cone_homotopy(rhs, cx_from, cx_to):
    """J with d_to J - J d_from = rhs (rhs raises gr_h by 1), filtered,
    solved per column by descending homological grading.  None if any
    column is unsolvable."""
    rhs = rhs.tocsc()
    d_to = cx_to.d.tocsc()
    cols = sorted(range(cx_from.n), key=lambda a: -int(cx_from.gr_h[a]))
    d_from = cx_from.d.tocsc()
    j_cols = {}
    for a in cols:
        z = {int(r): int(v)
             for r, v in zip(rhs.indices[rhs.indptr[a]:rhs.indptr[a + 1]],
                             rhs.data[rhs.indptr[a]:rhs.indptr[a + 1]])}
        # (J d_from) column a
        for k in range(d_from.indptr[a], d_from.indptr[a + 1]):
            t, c = int(d_from.indices[k]), int(d_from.data[k])
            for r, v in j_cols.get(t, {}).items():
                z[r] = z.get(r, 0) + c * v
        z = {r: v for r, v in z.items() if v}
        ha, qa = int(cx_from.gr_h[a]), int(cx_from.gr_q[a])
        src = np.nonzero((cx_to.gr_h == ha) & (cx_to.gr_q >= qa))[0]
        tgt = np.nonzero(cx_to.gr_h == ha + 1)[0]
        if any(int(cx_to.gr_h[r]) != ha + 1 or int(cx_to.gr_q[r]) < qa
               for r in z):
            return None
        x = solve_boundary_map(d_to, src, tgt, z)
        if x is None:
            return None
        j_cols[a] = x
    rows, cols_, data = [], [], []
    for a, x in j_cols.items():
        for r, v in x.items():
            rows.append(r)
            cols_.append(a)
            data.append(v)
    return sp.csr_matrix((data, (rows, cols_)), shape=(cx_to.n, cx_from.n),
                         dtype=np.int64)


def _cone_block_iso(half1, half2, t_a, t_s):
    """Iso record cone2(K) -> cone2(K~) from the two block isos, fixing
    the global sign and, if needed, a correcting homotopy block."""
    cs = half1["cs"]
    e1, e2 = half1["e2"], half2["e2"]
    if cs > 0:
        m_ = t_s.f @ e1
        n_ = e2 @ t_a.f
    else:
        m_ = e2 @ t_s.f
        n_ = t_a.f @ e1
    eta = None
    if same_matrix(m_, n_):
        eta = 1
    elif same_matrix(m_, -n_):
        eta = -1
    jay = None
    if eta is None:
        # fall back: solve the block equation d J - J d = mismatch
        for cand in (1, -1):
            if cs > 0:
                rhs = (m_ - cand * n_).tocsr()
                jay = _solve_cone_homotopy(rhs, half1["face_a"],
                                           half2["cx_s"])
            else:
                rhs = (cand * n_ - m_).tocsr()
                jay = _solve_cone_homotopy(rhs, half1["cx_s"],
                                           half2["face_a"])
            if jay is not None:
                eta = cand
                break
        if jay is None:
            raise VerificationFailed("cone edges do not match up to "
                                     "filtered homotopy")
    n_a1, n_s1 = half1["n_a"], half1["n_s"]
    n_a2, n_s2 = half2["n_a"], half2["n_s"]
    fa, ga = eta * t_a.f, eta * t_a.g
    fs, gs = t_s.f, t_s.g
    if jay is None:
        if cs > 0:
            f = sp.bmat([[fa, None], [None, fs]], format="csr")
            g = sp.bmat([[ga, None], [None, gs]], format="csr")
        else:
            f = sp.bmat([[fs, None], [None, fa]], format="csr")
            g = sp.bmat([[gs, None], [None, ga]], format="csr")
    else:
        if cs > 0:
            f = sp.bmat([[fa, None], [jay, fs]], format="csr")
            g = sp.bmat([[ga, None], [-gs @ jay @ ga, gs]], format="csr")
        else:
            f = sp.bmat([[fs, None], [jay, fa]], format="csr")
            g = sp.bmat([[gs, None], [-ga @ jay @ gs, ga]], format="csr")
    cone1, cone2 = half1["cone2"], half2["cone2"]
    z1 = sp.csr_matrix((cone1.n, cone1.n), dtype=np.int64)
    z2 = sp.csr_matrix((cone2.n, cone2.n), dtype=np.int64)
    rec = ChainMapRecord(cone1, cone2, f, g, z1, z2)
    return rec


def triple_slide_record(word, cx, pos, cx_new=None):
    """Record C(word) -> C(slid word) through the pair of cones."""
    letters = word.letters
    a, b, c, i, direction = slide_pattern(letters, pos)
    new_word = slide_word(word, pos)
    if cx_new is None:
        cx_new = build_complex(new_word, cx.cube.theory, check=False)
    if b == c:
        chi1, chi2 = pos, pos + 2
    else:
        chi1, chi2 = pos + 2, pos
    half1 = _half_cone(word, cx, pos, chi1)
    half2 = _half_cone(new_word, cx_new, pos, chi2)
    assert half1["cs"] == half2["cs"]
    # A sides through the common shorter word
    red1 = BraidWord(word.strands,
                     letters[:chi1] + letters[chi1 + 1:])
    red2 = BraidWord(word.strands,
                     new_word.letters[:chi2] + new_word.letters[chi2 + 1:])
    assert red1.letters == red2.letters, "deleted faces do not agree"
    cx_red = build_complex(red1, cx.cube.theory, check=False)
    pb = 0 if half1["cs"] > 0 else 1
    dst1, blk1 = _face_word_dst(cx, half1["ids_a"], red1, cx_red,
                                {chi1: pb}, [])
    dst2, blk2 = _face_word_dst(cx_new, half2["ids_a"], red2, cx_red,
                                {chi2: pb}, [])
    inv2 = np.empty(cx_red.n, dtype=np.int64)
    inv2[dst2] = np.arange(cx_red.n)
    t_a = signed_iso_record(half1["face_a"], half2["face_a"],
                            inv2[dst1], blk1)
    t_s = _s_face_iso(word, cx, half1, new_word, cx_new, half2, pos)
    iso = _cone_block_iso(half1, half2, t_a, t_s)
    rec = (half1["perm"].then(half1["cmp"]).then(iso)
           .then(half2["cmp"].reverse()).then(half2["perm"].reverse()))
    return new_word, rec


# ------------------------------------------------------------------
# literal path: six extra letters, greedy elimination

def _face_ids_set(cx, frozen_bits):
    cube = cx.cube
    ids = set()
    for v in range(1 << cube.n):
        if all((v >> q) & 1 == bit for q, bit in frozen_bits.items()):
            ids.update(range(int(cube.v_offset[v]),
                             int(cube.v_offset[v + 1])))
    return ids


def _greedy_contract_to_face(cx, face_mask):
    """Cancel unit pairs off the face until only face generators
    remain; refuse cancellations whose fill-in would write an entry
    between two face generators, so the arrows inside the face never
    change.  The primary order takes the lexicographically smallest
    pair; the greedy can strand (measured even on the smallest slide
    window), so on a dead end we search over a battery of other
    deterministic orders and finally over depth-limited branching."""
    def step_candidates(cur, face_now, order, limit):
        dc = cur.d.tocsc()
        dc.sort_indices()
        coldeg = np.diff(dc.indptr)
        cols = np.repeat(np.arange(cur.n), coldeg)
        rows = dc.indices
        ok = ((np.abs(dc.data) == 1)
              & (cur.gr_q[cols] == cur.gr_q[rows])
              & ~face_now[cols] & ~face_now[rows])
        # span closure: fill-in of (col, row) hits face-to-face arrows
        # iff col has a face target and row has a face source
        row_face_deg = np.zeros(cur.n, dtype=np.int64)
        np.add.at(row_face_deg, rows[face_now[cols]], 1)
        col_face_deg = np.zeros(cur.n, dtype=np.int64)
        np.add.at(col_face_deg, cols[face_now[rows]], 1)
        ok &= ~((col_face_deg[cols] > 0) & (row_face_deg[rows] > 0))
        idx = np.nonzero(ok)[0]
        if len(idx) == 0:
            return []
        if order == "rev":
            idx = idx[::-1]
        elif order == "hmax":
            idx = idx[np.lexsort((idx, -cur.gr_h[cols[idx]]))]
        elif order == "hmin":
            idx = idx[np.lexsort((idx, cur.gr_h[cols[idx]]))]
        idx = idx[:limit]
        return [(int(cols[i]), int(rows[i])) for i in idx]

    def run(cur, rec, alive, order, depth):
        while True:
            face_now = face_mask[alive]
            if face_now.all():
                return cur, rec, alive
            cands = step_candidates(cur, face_now, order,
                                    3 if depth > 0 else 1)
            if not cands:
                return None
            if depth <= 0 or len(cands) == 1:
                al, be = cands[0]
                reduced, step = cancel_pair(cur, al, be)
                keep = np.ones(cur.n, dtype=bool)
                keep[[al, be]] = False
                cur, rec, alive = reduced, rec.then(step), alive[keep]
                continue
            for al, be in cands:
                reduced, step = cancel_pair(cur, al, be)
                keep = np.ones(cur.n, dtype=bool)
                keep[[al, be]] = False
                got = run(reduced, rec.then(step), alive[keep],
                          order, depth - 1)
                if got is not None:
                    return got
            return None

    for order in ("fwd", "rev", "hmax", "hmin"):
        got = run(cx, ChainMapRecord.identity(cx), np.arange(cx.n),
                  order, 0)
        if got is not None:
            return got
    got = run(cx, ChainMapRecord.identity(cx), np.arange(cx.n),
              "fwd", 4)
    if got is None:
        raise ReductionStuck("greedy elimination stranded off the face")
    return got


def triple_slide_record_via_parent(word, cx, pos, cx_new=None):
    """Record C(word) -> C(slid word) through the six-letter parent,
    following the written elimination recipe.  Small words only."""
    from .elementary import _survivor_iso
    letters = word.letters
    slide_pattern(letters, pos)                 # validity
    new_word = slide_word(word, pos)
    if cx_new is None:
        cx_new = build_complex(new_word, cx.cube.theory, check=False)
    t_new = new_word.letters[pos:pos + 3]
    t_bar = tuple(-x for x in reversed(t_new))
    parent = BraidWord(word.strands,
                       letters[:pos + 3] + t_bar + t_new + letters[pos + 3:])
    cx_p = build_complex(parent, cx.cube.theory, check=False)
    # face restoring the source word: the six inserted letters parallel
    par_bits_1 = {pos + 3 + j: (0 if t_bar[j] > 0 else 1) for j in range(3)}
    par_bits_1.update({pos + 6 + j: (0 if t_new[j] > 0 else 1)
                       for j in range(3)})
    # face restoring the slid word: original triple + t_bar parallel
    par_bits_2 = {pos + j: (0 if letters[pos + j] > 0 else 1)
                  for j in range(3)}
    par_bits_2.update({pos + 3 + j: (0 if t_bar[j] > 0 else 1)
                       for j in range(3)})
    recs = []
    for frozen, short, cx_short in ((par_bits_1, word, cx),
                                    (par_bits_2, new_word, cx_new)):
        face_ids = np.array(sorted(_face_ids_set(cx_p, frozen)),
                            dtype=np.int64)
        face_mask = np.zeros(cx_p.n, dtype=bool)
        face_mask[face_ids] = True
        reduced, rec, alive = _greedy_contract_to_face(cx_p, face_mask)
        assert (np.sort(alive) == face_ids).all()
        leftover = (reduced.d - cx_p.d[np.ix_(alive, alive)])
        if (leftover != 0).nnz:
            raise ReductionStuck("retract differential disagrees with "
                                 "the face")
        iso = _survivor_iso(cx_p, reduced, alive, short, cx_short,
                            frozen, [])
        recs.append(rec.then(iso))
    to_word, to_new = recs
    return new_word, to_word.reverse().then(to_new)
