"""Filtered chain complexes from cubes of resolutions.

### CONVENTIONS
# Vertex v of the cube is an n-bit int, bit j = smoothing bit of letter j.
# Generator = (vertex, label mask); label-mask bit a is the label of circle
# a of Resolution(strands, letters, bits(v)) in its deterministic order.
# Flat index = v_offset[v] + label_mask, so generators are contiguous per
# vertex and ordered by label mask inside a vertex.
#
# The differential d is a scipy CSC matrix, column s = d(generator s);
# edge v -> v|1<<j carries sign (-1)^(number of set bits of v below j).
#
# Gradings: gr_h = |v| - n_minus,
#           gr_q = |v| + (#plus - #minus labels) + n_plus - 2 n_minus.
# The filtration by gr_q is decreasing: F_m = span of gr_q >= m; every
# theory here has d non-decreasing in gr_q (checked at build time).
"""

import numpy as np
import scipy.sparse as sp

from .errors import TooLarge, FiltrationViolation
from .frobenius import MERGE, SPLIT, THEORIES
from .resolution import Resolution, oriented_bits

MAX_GENERATORS = 1 << 22
COEFF_GUARD = 1 << 40


def bits_of(v, n):
    return tuple((v >> j) & 1 for j in range(n))


class CubeData:
    """Indexing metadata tying flat generators back to (vertex, labels)."""

    def __init__(self, strands, letters, v_offset, n_circ, theory):
        self.strands = strands
        self.letters = tuple(letters)
        self.n = len(letters)
        self.v_offset = v_offset          # len 2^n + 1, cumulative
        self.n_circ = n_circ
        self.theory = theory
        self.n_plus = sum(1 for t in letters if t > 0)
        self.n_minus = self.n - self.n_plus

    def index_of(self, v, mask):
        assert 0 <= mask < (1 << int(self.n_circ[v]))
        return int(self.v_offset[v]) + mask

    def vertex_of(self, idx):
        v = int(np.searchsorted(self.v_offset, idx, side="right")) - 1
        return v, idx - int(self.v_offset[v])

    def resolution(self, v):
        return Resolution(self.strands, self.letters, bits_of(v, self.n))


class Complex:
    """Finitely generated filtered complex over the integers."""

    def __init__(self, gr_h, gr_q, d, cube=None):
        self.gr_h = np.asarray(gr_h, dtype=np.int64)
        self.gr_q = np.asarray(gr_q, dtype=np.int64)
        self.d = d.tocsc()
        self.cube = cube
        assert self.d.shape == (self.n, self.n)

    @property
    def n(self):
        return len(self.gr_h)

    def __repr__(self):
        return "Complex(n=%d, nnz=%d)" % (self.n, self.d.nnz)

    def check_d_squared(self):
        sq = self.d @ self.d
        sq.eliminate_zeros()
        assert sq.nnz == 0, "d^2 != 0"

    def check_filtered(self):
        """d must raise gr_h by one and never lower gr_q."""
        coo = self.d.tocoo()
        if coo.nnz == 0:
            return
        if not np.all(self.gr_h[coo.row] == self.gr_h[coo.col] + 1):
            raise FiltrationViolation("differential is not degree +1")
        if not np.all(self.gr_q[coo.row] >= self.gr_q[coo.col]):
            raise FiltrationViolation("differential drops quantum grading")

    def check_coefficients(self):
        if self.d.nnz and int(abs(self.d.data).max()) >= COEFF_GUARD:
            raise TooLarge("coefficient overflow guard tripped")

    def window_mask(self, q_min=None, q_max=None, h=None):
        """Boolean generator mask: q_min <= gr_q < q_max (either side
        open when None), optionally restricted to one homological degree."""
        m = np.ones(self.n, dtype=bool)
        if q_min is not None:
            m &= self.gr_q >= q_min
        if q_max is not None:
            m &= self.gr_q < q_max
        if h is not None:
            m &= self.gr_h == h
        return m


def build_complex(word, theory="def", check=True):
    """Full cube complex of the closure of `word` (a BraidWord)."""
    assert theory in THEORIES
    letters, m = word.letters, word.strands
    n = len(letters)
    if n > 24:
        raise TooLarge("2^%d cube vertices" % n)
    nv = 1 << n
    resolutions = [Resolution(m, letters, bits_of(v, n)) for v in range(nv)]
    n_circ = np.array([r.n_circles for r in resolutions], dtype=np.int64)
    v_offset = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(1 << n_circ, out=v_offset[1:])
    total = int(v_offset[-1])
    if total > MAX_GENERATORS:
        raise TooLarge("%d generators" % total)

    n_plus = sum(1 for t in letters if t > 0)
    n_minus = n - n_plus
    gen_vertex = np.repeat(np.arange(nv, dtype=np.int64), 1 << n_circ)
    gen_labels = np.arange(total, dtype=np.int64) - v_offset[gen_vertex]
    pc_v = np.bitwise_count(gen_vertex).astype(np.int64)
    pc_l = np.bitwise_count(gen_labels).astype(np.int64)
    gr_h = pc_v - n_minus
    gr_q = pc_v + (2 * pc_l - n_circ[gen_vertex]) + n_plus - 2 * n_minus

    rows, cols, data = [], [], []
    merge_tab = MERGE[theory]
    split_tab = SPLIT[theory]
    for v in range(nv):
        res0 = resolutions[v]
        c0 = res0.n_circles
        masks = np.arange(1 << c0, dtype=np.int64)
        for j in range(n):
            if (v >> j) & 1:
                continue
            v1 = v | (1 << j)
            res1 = resolutions[v1]
            sign = -1 if (bin(v & ((1 << j) - 1)).count("1") & 1) else 1
            kind, src, tgt, carry = res0.transition(res1, j)
            base_t = np.zeros(1 << c0, dtype=np.int64)
            for ci, cj in carry:
                base_t |= ((masks >> ci) & 1) << cj
            if kind == "merge":
                a, b = src
                (c,) = tgt
                ba = (masks >> a) & 1
                bb = (masks >> b) & 1
                for (wa, wb), outs in merge_tab.items():
                    if not outs:
                        continue
                    sel = np.nonzero((ba == wa) & (bb == wb))[0]
                    if not sel.size:
                        continue
                    for bc, coeff in outs:
                        rows.append(v_offset[v1] + base_t[sel] + (bc << c))
                        cols.append(v_offset[v] + masks[sel])
                        data.append(np.full(sel.size, sign * coeff,
                                            dtype=np.int64))
            else:
                (a,) = src
                t1, t2 = tgt
                ba = (masks >> a) & 1
                for wa, outs in split_tab.items():
                    sel = np.nonzero(ba == wa)[0]
                    if not sel.size:
                        continue
                    for (b1, b2), coeff in outs:
                        rows.append(v_offset[v1] + base_t[sel]
                                    + (b1 << t1) + (b2 << t2))
                        cols.append(v_offset[v] + masks[sel])
                        data.append(np.full(sel.size, sign * coeff,
                                            dtype=np.int64))
    if rows:
        d = sp.coo_matrix(
            (np.concatenate(data),
             (np.concatenate(rows), np.concatenate(cols))),
            shape=(total, total), dtype=np.int64).tocsc()
    else:
        d = sp.csc_matrix((total, total), dtype=np.int64)
    cube = CubeData(m, letters, v_offset, n_circ, theory)
    cx = Complex(gr_h, gr_q, d, cube)
    if check:
        cx.check_d_squared()
        cx.check_filtered()
    return cx


# ------------------------------------------------------------------
# chains: {flat index: coeff} on a Complex, or {(vertex, mask): coeff}
# on a cube that may not be materialized.

def apply_matrix(mat, chain):
    """mat @ chain for a CSC matrix and a sparse dict chain."""
    out = {}
    indptr, indices, dat = mat.indptr, mat.indices, mat.data
    for col, co in chain.items():
        for k in range(indptr[col], indptr[col + 1]):
            r = int(indices[k])
            out[r] = out.get(r, 0) + co * int(dat[k])
    return {r: v for r, v in out.items() if v}


def add_chains(a, b, scale=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v}


def flatten_chain(cx, chain_vm):
    assert cx.cube is not None
    return {cx.cube.index_of(v, mask): co
            for (v, mask), co in chain_vm.items()}


def unflatten_chain(cx, chain):
    assert cx.cube is not None
    return {cx.cube.vertex_of(idx): co for idx, co in chain.items()}


def chain_gradings(cx, chain):
    """(set of gr_h values, min gr_q) over the support."""
    assert chain
    hs = {int(cx.gr_h[i]) for i in chain}
    qmin = min(int(cx.gr_q[i]) for i in chain)
    return hs, qmin


# ------------------------------------------------------------------
# lazy cube: evaluate the differential generator-by-generator without
# building the full complex (used for invariant chains on large words).

class DiagramCube:
    def __init__(self, word, theory="def"):
        assert theory in THEORIES
        self.word = word
        self.theory = theory
        self.n = len(word.letters)
        self._res = {}

    def resolution(self, v):
        r = self._res.get(v)
        if r is None:
            r = Resolution(self.word.strands, self.word.letters,
                           bits_of(v, self.n))
            self._res[v] = r
        return r

    def oriented_vertex(self):
        bits = oriented_bits(self.word.letters)
        return sum(b << j for j, b in enumerate(bits))

    def delta_chain(self, chain_vm):
        """Differential of {(v, mask): coeff}, same representation."""
        out = {}
        for (v, mask), co in chain_vm.items():
            res0 = self.resolution(v)
            for j in range(self.n):
                if (v >> j) & 1:
                    continue
                v1 = v | (1 << j)
                res1 = self.resolution(v1)
                sign = -1 if (bin(v & ((1 << j) - 1)).count("1") & 1) else 1
                kind, src, tgt, carry = res0.transition(res1, j)
                tbase = 0
                for ci, cj in carry:
                    tbase |= ((mask >> ci) & 1) << cj
                if kind == "merge":
                    a, b = src
                    (c,) = tgt
                    outs = MERGE[self.theory][((mask >> a) & 1,
                                               (mask >> b) & 1)]
                    for bc, coeff in outs:
                        key = (v1, tbase | (bc << c))
                        out[key] = out.get(key, 0) + sign * coeff * co
                else:
                    (a,) = src
                    t1, t2 = tgt
                    outs = SPLIT[self.theory][(mask >> a) & 1]
                    for (b1, b2), coeff in outs:
                        key = (v1, tbase | (b1 << t1) | (b2 << t2))
                        out[key] = out.get(key, 0) + sign * coeff * co
        return {k: c for k, c in out.items() if c}
