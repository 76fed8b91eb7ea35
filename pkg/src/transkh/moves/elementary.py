"""Records for the elementary closure moves.

### CONVENTIONS
# Every constructor returns (new_word, record) with record.source the
# complex handed in and record.target the complex of the new word, so
# record.apply pushes cycles along the move.  Reductions (deletions,
# destabilizations) are built; insertions are their reversals.
#
# Survivor faces: every contraction here ends on a full cube face with
# all frozen letters in their parallel smoothing, optionally with a
# frozen label on the freed circle.  The face is identified with the
# cube of the shorter word by mapping segments (gap g, position p) of
# the short diagram to (B(g), p) of the long one, where B embeds the
# gaps; circles are matched by membership and signs are fixed by
# propagating one coefficient comparison across the cube and then
# asserting the whole chain-map equation.
"""

from collections import defaultdict

import numpy as np
import scipy.sparse as sp

from ..braid import BraidWord
from ..complexes import Complex, build_complex
from ..errors import (IndexOutOfRange, InvalidDestabilization,
                      PatternMismatch, ShapeMismatch)
from ..resolution import Resolution, smoothing_is_parallel
from .records import ChainMapRecord, contract_level, same_matrix


# ------------------------------------------------------------------
# generic signed isomorphism

def signed_iso_record(cx_src, cx_dst, dst_of_src, block_of_src):
    """Isomorphism record from an unsigned generator bijection.

    dst_of_src[i] = matching generator of cx_dst; block_of_src[i] groups
    generators that must share a sign (one cube vertex = one block).
    Signs are propagated over the block graph of the source differential
    and the full chain-map equation is asserted."""
    n = cx_src.n
    assert cx_dst.n == n
    dst_of_src = np.asarray(dst_of_src, dtype=np.int64)
    assert len(set(dst_of_src.tolist())) == n, "generator map not bijective"
    blocks = {}
    for i, b in enumerate(block_of_src):
        blocks.setdefault(int(b), []).append(i)
    # one sample entry per ordered block pair
    coo = cx_src.d.tocoo()
    samples = {}
    adj = defaultdict(list)
    for t, s, c in zip(coo.row, coo.col, coo.data):
        bs, bt = int(block_of_src[s]), int(block_of_src[t])
        if bs != bt and (bs, bt) not in samples:
            samples[(bs, bt)] = (int(s), int(t), int(c))
            adj[bs].append(bt)
            adj[bt].append(bs)
    eps = {}
    order = sorted(blocks)
    dd = cx_dst.d
    for b0 in order:
        if b0 in eps:
            continue
        eps[b0] = 1
        queue = [b0]
        while queue:
            b = queue.pop()
            for b2 in adj[b]:
                if b2 in eps:
                    continue
                key = (b, b2) if (b, b2) in samples else (b2, b)
                s, t, c = samples[key]
                c2 = int(dd[int(dst_of_src[t]), int(dst_of_src[s])])
                assert abs(c2) == abs(c), "coefficient magnitudes differ"
                ratio = 1 if c2 == c else -1
                # relation: eps[block(t)] * c = eps[block(s)] * c2
                bs2, bt2 = int(block_of_src[s]), int(block_of_src[t])
                if bs2 in eps:
                    eps[bt2] = eps[bs2] * ratio
                else:
                    eps[bs2] = eps[bt2] * ratio
                queue.append(b2)
    data = np.array([eps[int(b)] for b in block_of_src], dtype=np.int64)
    f = sp.csr_matrix((data, (dst_of_src, np.arange(n))), shape=(n, n))
    g = sp.csr_matrix((data, (np.arange(n), dst_of_src)), shape=(n, n))
    z_s = sp.csr_matrix((n, n), dtype=np.int64)
    rec = ChainMapRecord(cx_src, cx_dst, f, g, z_s, z_s.copy())
    rec.verify("full")
    return rec


class _ResCache:
    def __init__(self, word):
        self.word = word
        self.n = len(word.letters)
        self._store = {}

    def __call__(self, v):
        r = self._store.get(v)
        if r is None:
            bits = tuple((v >> j) & 1 for j in range(self.n))
            r = Resolution(self.word.strands, self.word.letters, bits)
            self._store[v] = r
        return r


def _match_circles(res_from, res_to, key_map, allow_unmatched_to=(),
                   on_keys=None):
    """perm[ci_from] = ci_to by mapping segment keys; unmatched target
    circles must be exactly allow_unmatched_to.  With on_keys the match
    only consults segments in that set (the others may be reshuffled)."""
    perm = []
    hit = set()
    for circ in res_from.circles:
        use = circ if on_keys is None else [s for s in circ if s in on_keys]
        assert use, "circle invisible to the matching keys"
        mapped = [key_map(s) for s in use]
        cj = res_to.circle_index[mapped[0]]
        assert all(res_to.circle_index[k] == cj for k in mapped), \
            "segment map splits a circle"
        assert cj not in hit, "segment map merges circles"
        hit.add(cj)
        perm.append(cj)
    assert set(range(res_to.n_circles)) - hit == set(allow_unmatched_to), \
        "unexpected unmatched circles"
    return perm


def _cube_bijection(cx_src, cx_dst, vertex_map, key_map, on_keys=None):
    """Unsigned generator bijection between two full cubes related by a
    relabeling of letters (same circle structure through key_map)."""
    cs, cd = cx_src.cube, cx_dst.cube
    n = cs.n
    res_s, res_d = _ResCache(BraidWord(cs.strands, cs.letters)), \
        _ResCache(BraidWord(cd.strands, cd.letters))
    dst = np.empty(cx_src.n, dtype=np.int64)
    block = np.empty(cx_src.n, dtype=np.int64)
    for v in range(1 << n):
        v2 = vertex_map(v)
        perm = _match_circles(res_s(v), res_d(v2), key_map,
                              on_keys=on_keys)
        c0 = res_s(v).n_circles
        masks = np.arange(1 << c0, dtype=np.int64)
        masks2 = np.zeros(1 << c0, dtype=np.int64)
        for ci, cj in enumerate(perm):
            masks2 |= ((masks >> ci) & 1) << cj
        lo = cs.v_offset[v]
        dst[lo:lo + (1 << c0)] = cd.v_offset[v2] + masks2
        block[lo:lo + (1 << c0)] = v
    return dst, block


# ------------------------------------------------------------------
# cyclic shift and distant transposition (planar isotopies of the
# closure; both are signed cube isomorphisms)

def conjugate_shift(word, cx, offset):
    """Move the first `offset` letters to the end."""
    n = len(word.letters)
    offset %= max(n, 1)
    new_word = word.conjugate(offset)
    cx_new = build_complex(new_word, cx.cube.theory, check=False)
    if n == 0 or offset == 0:
        rec = ChainMapRecord.identity(cx)
        rec = ChainMapRecord(cx, cx_new, rec.f, rec.g, rec.h, rec.k)
        return new_word, rec

    m = word.strands

    def vertex_map(v):
        out = 0
        for j in range(n):
            if (v >> ((j + offset) % n)) & 1:
                out |= 1 << j
        return out

    def key_map(key):
        g, p = key // m, key % m
        g2 = g - offset if g >= offset else g + n - offset
        return g2 * m + p

    dst, block = _cube_bijection(cx, cx_new, vertex_map, key_map)
    return new_word, signed_iso_record(cx, cx_new, dst, block)


def far_transposition(word, cx, pos):
    """Swap adjacent letters whose indices differ by at least 2."""
    letters = word.letters
    a, b = letters[pos], letters[pos + 1]
    if abs(abs(a) - abs(b)) < 2:
        raise PatternMismatch("letters at %d interact" % pos)
    new = list(letters)
    new[pos], new[pos + 1] = b, a
    new_word = BraidWord(word.strands, tuple(new))
    cx_new = build_complex(new_word, cx.cube.theory, check=False)
    n = len(letters)

    def vertex_map(v):
        ba, bb = (v >> pos) & 1, (v >> (pos + 1)) & 1
        out = v & ~((1 << pos) | (1 << (pos + 1)))
        return out | (bb << pos) | (ba << (pos + 1))

    # circles agree away from the gap between the two letters; the
    # subdivision of that gap reshuffles, so keep it out of the match
    m = word.strands
    on_keys = set(range(n * m)) - set(range((pos + 1) * m,
                                            (pos + 2) * m))
    dst, block = _cube_bijection(cx, cx_new, vertex_map, lambda k: k,
                                 on_keys=on_keys)
    return new_word, signed_iso_record(cx, cx_new, dst, block)


# ------------------------------------------------------------------
# contraction passes shared by stabilization and the two-letter cancel

def _contract_tracked(cx, level_list, kind):
    """contract_levels with pairs given in *original* indices; keeps the
    surviving original indices alongside the composite record."""
    rec = ChainMapRecord.identity(cx)
    cur = cx
    survivors = np.arange(cx.n)
    pos_of = {i: i for i in range(cx.n)}
    for pairs in level_list:
        if not pairs:
            continue
        cur_pairs = [(pos_of[a], pos_of[b]) for a, b in pairs]
        n_before = cur.n
        cur, step = contract_level(cur, cur_pairs, kind)
        drop = {a for a, _ in cur_pairs} | {b for _, b in cur_pairs}
        keep = np.array([i for i in range(n_before) if i not in drop],
                        dtype=np.int64)
        survivors = survivors[keep]
        pos_of = {int(orig): r for r, orig in enumerate(survivors)}
        rec = rec.then(step)
    return cur, rec, survivors


def _merge_sub_levels(cx, j, vertex_ok, u_key):
    """Levels of pairs (alpha at bit_j=0 with the u-circle labeled plus,
    beta = its merge image at bit_j=1), by decreasing vertex weight."""
    cube = cx.cube
    cache = _ResCache(BraidWord(cube.strands, cube.letters))
    levels = defaultdict(list)
    for v0 in range(1 << cube.n):
        if (v0 >> j) & 1 or not vertex_ok(v0):
            continue
        v1 = v0 | (1 << j)
        r0, r1 = cache(v0), cache(v1)
        kind, src, tgt, carry = r0.transition(r1, j)
        assert kind == "merge"
        u0 = r0.circle_index[u_key]
        assert u0 in src, "freed circle does not meet the site"
        other = src[0] if src[1] == u0 else src[1]
        (c,) = tgt
        w = bin(v0).count("1")
        for mask in range(1 << r0.n_circles):
            if not (mask >> u0) & 1:
                continue
            tmask = (mask >> other & 1) << c
            for ci, cj in carry:
                tmask |= ((mask >> ci) & 1) << cj
            levels[w].append((cube.index_of(v0, mask),
                              cube.index_of(v1, tmask)))
    return [levels[w] for w in sorted(levels, reverse=True)]


def _split_quot_levels(cx, j, vertex_ok, u_key):
    """Levels of pairs (alpha at bit_j=0, beta = its split image with the
    freed circle labeled minus), by increasing vertex weight."""
    cube = cx.cube
    cache = _ResCache(BraidWord(cube.strands, cube.letters))
    levels = defaultdict(list)
    for v0 in range(1 << cube.n):
        if (v0 >> j) & 1 or not vertex_ok(v0):
            continue
        v1 = v0 | (1 << j)
        r0, r1 = cache(v0), cache(v1)
        kind, src, tgt, carry = r0.transition(r1, j)
        assert kind == "split"
        u1 = r1.circle_index[u_key]
        assert u1 in tgt, "freed circle not created at the site"
        other = tgt[0] if tgt[1] == u1 else tgt[1]
        (a,) = src
        w = bin(v0).count("1")
        for mask in range(1 << r0.n_circles):
            tmask = (mask >> a & 1) << other
            for ci, cj in carry:
                tmask |= ((mask >> ci) & 1) << cj
            levels[w].append((cube.index_of(v0, mask),
                              cube.index_of(v1, tmask)))
    return [levels[w] for w in sorted(levels)]


def _face_word_dst(cx_big, survivors, word_small, cx_small, frozen_bits,
                   frozen_labels):
    """Unsigned bijection of a parallel-frozen face onto the cube of the
    word with the frozen letters deleted.

    survivors: original flat indices of the face generators, in the
    order of the face complex.  Returns (dst, block): dst[r] = flat
    generator of cx_small, block[r] = big cube vertex."""
    cube = cx_big.cube
    free = [q for q in range(cube.n) if q not in frozen_bits]
    assert tuple(cube.letters[q] for q in free) == word_small.letters, \
        "face letters do not match the short word"
    m_b, m_s = cube.strands, word_small.strands
    k = len(free)
    gap_of = ([free[g] for g in range(k)] + [free[-1] + 1]) if k else [0]

    def key_map(key):
        g, p = key // m_s, key % m_s
        return gap_of[g] * m_b + p

    cache_b = _ResCache(BraidWord(m_b, cube.letters))
    cache_s = _ResCache(word_small)
    cs = cx_small.cube
    pos_of = {int(orig): r for r, orig in enumerate(survivors)}
    assert len(pos_of) == cx_small.n, "face size mismatch"
    dst = np.empty(len(pos_of), dtype=np.int64)
    block = np.empty(len(pos_of), dtype=np.int64)
    seen = 0
    base_v = 0
    for q, bit in frozen_bits.items():
        base_v |= bit << q
    for vs in range(1 << k):
        vb = base_v
        for g in range(k):
            if (vs >> g) & 1:
                vb |= 1 << free[g]
        rb, rs = cache_b(vb), cache_s(vs)
        frozen_circles = []
        frozen_mask = 0
        for key, bit in frozen_labels:
            ci = rb.circle_index[key]
            frozen_circles.append(ci)
            frozen_mask |= bit << ci
        perm = _match_circles(rs, rb, key_map,
                              allow_unmatched_to=frozen_circles)
        for ms in range(1 << rs.n_circles):
            mb = frozen_mask
            for ci, cj in enumerate(perm):
                mb |= ((ms >> ci) & 1) << cj
            r = pos_of[cube.index_of(vb, mb)]
            dst[r] = cs.index_of(vs, ms)
            block[r] = vb
            seen += 1
    assert seen == len(pos_of)
    return dst, block


def _survivor_iso(cx_big, reduced, survivors, word_small, cx_small,
                  frozen_bits, frozen_labels):
    """Record reduced -> cx_small identifying a parallel-frozen face."""
    assert reduced.n == cx_small.n, "face size mismatch"
    dst, block = _face_word_dst(cx_big, survivors, word_small, cx_small,
                                frozen_bits, frozen_labels)
    return signed_iso_record(reduced, cx_small, dst, block)


def face_indices(cx, frozen_bits):
    """Flat indices (ascending) of the cube face with the given bits,
    and the face Complex with ambient gradings."""
    cube = cx.cube
    ids = []
    for v in range(1 << cube.n):
        if all((v >> q) & 1 == bit for q, bit in frozen_bits.items()):
            ids.append(np.arange(cube.v_offset[v], cube.v_offset[v + 1]))
    ids = np.concatenate(ids)
    d = cx.d.tocsr()[ids][:, ids].tocsc()
    face = Complex(cx.gr_h[ids], cx.gr_q[ids], d)
    return face, ids


# ------------------------------------------------------------------
# stabilization / destabilization at any word position

def destabilize_record(word, cx, pos, cx_small=None):
    """Remove the letter at `pos`, which must be the only letter on the
    top index.  Returns (short word, record C(word) -> C(short))."""
    letters = word.letters
    m = word.strands
    t = letters[pos]
    if abs(t) != m - 1 or m < 2:
        raise InvalidDestabilization("letter %d is not on the top index"
                                     % pos)
    if sum(1 for x in letters if abs(x) == m - 1) != 1:
        raise InvalidDestabilization("top index used more than once")
    short = BraidWord(m - 1, letters[:pos] + letters[pos + 1:])
    if cx_small is None:
        cx_small = build_complex(short, cx.cube.theory, check=False)
    top_key = 0 * m + (m - 1)          # segment (gap 0, position m)
    if t > 0:
        levels = _merge_sub_levels(cx, pos, lambda v: True, top_key)
        reduced, rec, survivors = _contract_tracked(cx, levels, "sub")
        frozen_bits, label_bit = {pos: 0}, 0
    else:
        levels = _split_quot_levels(cx, pos, lambda v: True, top_key)
        reduced, rec, survivors = _contract_tracked(cx, levels, "quot")
        frozen_bits, label_bit = {pos: 1}, 1
    iso = _survivor_iso(cx, reduced, survivors, short, cx_small,
                        frozen_bits, [(top_key, label_bit)])
    return short, rec.then(iso)


def stabilize_record(word, cx, pos, sign, cx_new=None):
    """Insert the new top letter at `pos`; the record is the reversed
    destabilization, so f is the filtered inclusion."""
    m = word.strands
    letters = word.letters[:pos] + (sign * m,) + word.letters[pos:]
    new_word = BraidWord(m + 1, letters)
    if cx_new is None:
        cx_new = build_complex(new_word, cx.cube.theory, check=False)
    back, rec = destabilize_record(new_word, cx_new, pos, cx_small=cx)
    assert back.letters == word.letters and back.strands == word.strands
    return new_word, rec.reverse()


# ------------------------------------------------------------------
# cancelling / inserting an adjacent inverse pair

def delete_rii_record(word, cx, pos, cx_small=None):
    """Delete letters (pos, pos+1) which must be inverse to each other
    on the same index."""
    letters = word.letters
    a, b = letters[pos], letters[pos + 1]
    if a != -b:
        raise PatternMismatch("letters at %d are not an inverse pair"
                              % pos)
    i = abs(a)
    m = word.strands
    short = BraidWord(m, letters[:pos] + letters[pos + 2:])
    if cx_small is None:
        cx_small = build_complex(short, cx.cube.theory, check=False)
    # parallel bits of the two letters; j_d is the letter whose set bit
    # is the parallel smoothing (flipping it merges the freed circle
    # away), j_e the one whose set bit is the cap/cup (flipping it
    # splits the freed circle off)
    p1 = 0 if a > 0 else 1
    p2 = 1 - p1
    j_d = pos if p1 == 1 else pos + 1
    j_e = pos + 1 if p1 == 1 else pos
    u_key = (pos + 1) * m + (i - 1)            # freed circle between caps
    lv = _merge_sub_levels(cx, j_d, lambda v: (v >> j_e) & 1, u_key)
    reduced, rec_d, survivors = _contract_tracked(cx, lv, "sub")
    pos_of = {int(orig): r for r, orig in enumerate(survivors)}
    lv_e = [[(pos_of[a2], pos_of[b2]) for a2, b2 in level]
            for level in _split_quot_levels(
                cx, j_e, lambda v: not (v >> j_d) & 1, u_key)]
    reduced2, rec_e, surv2 = _contract_tracked(reduced, lv_e, "quot")
    survivors = survivors[surv2]
    iso = _survivor_iso(cx, reduced2, survivors, short, cx_small,
                        {pos: p1, pos + 1: p2}, [])
    return short, rec_d.then(rec_e).then(iso)


def insert_rii_record(word, cx, pos, index, orientation, cx_new=None):
    """Insert the pair (sigma_index^orientation, sigma_index^-orientation)
    at `pos`; reversed deletion."""
    m = word.strands
    if not 1 <= index <= m - 1:
        raise IndexOutOfRange("index %d out of range" % index)
    assert orientation in (+1, -1)
    pair = (orientation * index, -orientation * index)
    letters = word.letters[:pos] + pair + word.letters[pos:]
    new_word = BraidWord(m, letters)
    if cx_new is None:
        cx_new = build_complex(new_word, cx.cube.theory, check=False)
    back, rec = delete_rii_record(new_word, cx_new, pos, cx_small=cx)
    assert back.letters == word.letters
    return new_word, rec.reverse()
