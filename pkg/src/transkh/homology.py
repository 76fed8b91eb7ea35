"""Sparse integer linear algebra for the filtered complexes.

### CONVENTIONS
# Everything is exact: unit-pivot (+-1) sparse elimination over the
# integers first, then a small dense residual handled by Smith normal
# form (ring="int") or fraction-free Gauss (ring="rational").  Unit-pivot
# cancellation is a Morse-style pair removal, so it preserves homology
# and integer solvability; witnesses are reconstructed by replaying the
# elimination trace backwards.
#
# A "window" q_min <= gr_q < q_max means the subquotient complex
# F_{q_min} / F_{q_max}; both masks apply to sources and targets, which
# is a complex because the differential never lowers gr_q.
"""

import heapq
from fractions import Fraction

import numpy as np

from .errors import NotACycle
from .complexes import apply_matrix


# ------------------------------------------------------------------
# sparse elimination

class _System:
    """Mutable sparse matrix with mirrored row/col dicts and a lazy heap
    of unit-entry pivot candidates (Markowitz-ish cost)."""

    def __init__(self):
        self.rows = {}
        self.cols = {}
        self.heap = []

    def add(self, r, c, v):
        if v == 0:
            return
        row = self.rows.setdefault(r, {})
        nv = row.get(c, 0) + v
        if nv:
            row[c] = nv
            self.cols.setdefault(c, {})[r] = nv
            if nv in (1, -1):
                cost = (len(row) - 1) * (len(self.cols[c]) - 1)
                heapq.heappush(self.heap, (cost, r, c))
        else:
            del row[c]
            del self.cols[c][r]

    def get(self, r, c):
        return self.rows.get(r, {}).get(c, 0)

    def _drop_line(self, table, mirror, key):
        line = table.pop(key, None)
        if line:
            for other in line:
                del mirror[other][key]

    def cancel(self, r, c, trace=None, z=None):
        """Eliminate pivot (r, c); in square mode this removes both
        generators entirely (Morse pair), in solve mode row r is the
        recorded equation and col c the determined variable."""
        u = self.rows[r][c]
        assert u in (1, -1)
        row_items = [(c2, v) for c2, v in self.rows[r].items() if c2 != c]
        col_items = [(r2, v) for r2, v in self.cols[c].items() if r2 != r]
        if trace is not None:
            zt = z.pop(r, 0)
            trace.append((r, c, u, row_items, zt))
            if zt:
                for r2, vr in col_items:
                    nz = z.get(r2, 0) - u * zt * vr
                    if nz:
                        z[r2] = nz
                    else:
                        z.pop(r2, None)
        self._drop_line(self.rows, self.cols, r)
        self._drop_line(self.cols, self.rows, c)
        self._drop_line(self.rows, self.cols, c)
        self._drop_line(self.cols, self.rows, r)
        for r2, vr in col_items:
            for c2, vc in row_items:
                self.add(r2, c2, -u * vr * vc)

    def eliminate(self, trace=None, z=None):
        heap = self.heap
        while heap:
            cost, r, c = heapq.heappop(heap)
            v = self.get(r, c)
            if v not in (1, -1):
                continue
            cur = (len(self.rows[r]) - 1) * (len(self.cols[c]) - 1)
            if heap and cur > heap[0][0] + 4:
                heapq.heappush(heap, (cur, r, c))
                continue
            self.cancel(r, c, trace, z)


def _build_system(d_csc, src_ids, tgt_ids):
    sys_ = _System()
    in_tgt = {}
    for t in tgt_ids:
        in_tgt[int(t)] = True
    indptr, indices, data = d_csc.indptr, d_csc.indices, d_csc.data
    for s in src_ids:
        s = int(s)
        for k in range(indptr[s], indptr[s + 1]):
            r = int(indices[k])
            if r in in_tgt:
                sys_.add(r, s, int(data[k]))
    return sys_


# ------------------------------------------------------------------
# dense exact kernels

def snf_with_transforms(rows):
    """Smith normal form of an integer matrix (list of lists).

    Returns (diag, U, V) with U*A*V diagonal = diag (padded with zeros),
    U and V unimodular, diag entries positive and each dividing the next.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, q):      # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def addmul_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    k = 0
    while k < min(m, n):
        # find smallest nonzero entry in the remaining block
        piv = None
        best = None
        for i in range(k, m):
            for j in range(k, n):
                a = abs(A[i][j])
                if a and (best is None or a < best):
                    best, piv = a, (i, j)
        if piv is None:
            break
        swap_rows(k, piv[0])
        swap_cols(k, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(k + 1, m):
                if A[i][k]:
                    q = A[i][k] // A[k][k]
                    addmul_row(i, k, -q)
                    if A[i][k]:
                        swap_rows(i, k)
                        dirty = True
            for j in range(k + 1, n):
                if A[k][j]:
                    q = A[k][j] // A[k][k]
                    addmul_col(j, k, -q)
                    if A[k][j]:
                        swap_cols(j, k)
                        dirty = True
        # divisibility of the rest by the pivot
        p = A[k][k]
        fix = None
        for i in range(k + 1, m):
            for j in range(k + 1, n):
                if A[i][j] % p:
                    fix = i
                    break
            if fix is not None:
                break
        if fix is not None:
            addmul_row(k, fix, 1)
            continue
        if p < 0:
            A[k] = [-a for a in A[k]]
            U[k] = [-a for a in U[k]]
        k += 1
    diag = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    return diag, U, V


def solve_dense_int(rows, b):
    """One integer solution x of A x = b, or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return [0] * n
    diag, U, V = snf_with_transforms(rows)
    y = [sum(U[i][j] * b[j] for j in range(m)) for i in range(m)]
    r = len(diag)
    t = []
    for i in range(m):
        if i < r:
            if y[i] % diag[i]:
                return None
            t.append(y[i] // diag[i])
        elif y[i]:
            return None
    t += [0] * (n - len(t))
    return [sum(V[i][j] * t[j] for j in range(n)) for i in range(n)]


def solve_dense_rational(rows, b):
    """One rational solution of A x = b, or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    M = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(b[i])]
         for i in range(m)]
    piv_of_col = [None] * n
    row = 0
    for col in range(n):
        sel = next((r for r in range(row, m) if M[r][col]), None)
        if sel is None:
            continue
        M[row], M[sel] = M[sel], M[row]
        pv = M[row][col]
        M[row] = [x / pv for x in M[row]]
        for r in range(m):
            if r != row and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b2 for a, b2 in zip(M[r], M[row])]
        piv_of_col[col] = row
        row += 1
    for r in range(row, m):
        if M[r][n]:
            return None
    x = [Fraction(0)] * n
    for col, pr in enumerate(piv_of_col):
        if pr is not None:
            x[col] = M[pr][n]
    return x


def rational_rank(rows):
    m = len(rows)
    n = len(rows[0]) if m else 0
    M = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    for col in range(n):
        sel = next((r for r in range(rank, m) if M[r][col]), None)
        if sel is None:
            continue
        M[rank], M[sel] = M[sel], M[rank]
        pv = M[rank][col]
        for r in range(rank + 1, m):
            if M[r][col]:
                f = M[r][col] / pv
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


# ------------------------------------------------------------------
# boundary solving with witness

def solve_boundary_map(d_csc, src_ids, tgt_ids, z, ring="int"):
    """Find x supported on src_ids with (d x) restricted to tgt_ids == z.

    z: {target id: coeff}, must be supported on tgt_ids.  Returns the
    witness dict {source id: coeff} or None."""
    z = {int(r): v for r, v in z.items() if v}
    sys_ = _build_system(d_csc, src_ids, tgt_ids)
    tgt_set = set(int(t) for t in tgt_ids)
    assert all(r in tgt_set for r in z), "rhs outside target window"
    trace = []
    zz = dict(z)
    sys_.eliminate(trace=trace, z=zz)
    # residual dense solve
    res_rows = sorted(r for r, d_ in sys_.rows.items() if d_)
    res_cols = sorted(c for c, d_ in sys_.cols.items() if d_)
    cancelled_rows = {t[0] for t in trace}
    # rhs left on rows with no remaining coefficients -> unsolvable
    for r, v in zz.items():
        if v and r not in res_rows:
            assert r not in cancelled_rows
            return None
    col_pos = {c: i for i, c in enumerate(res_cols)}
    dense = [[sys_.rows[r].get(c, 0) for c in res_cols] for r in res_rows]
    b = [zz.get(r, 0) for r in res_rows]
    if ring == "int":
        sol = solve_dense_int(dense, b)
    else:
        sol = solve_dense_rational(dense, b)
    if sol is None:
        return None
    x = {c: sol[i] for c, i in col_pos.items() if sol[i]}
    # back-substitution through the trace
    for r, c, u, row_items, zt in reversed(trace):
        dot = 0
        for c2, vc in row_items:
            xv = x.get(c2)
            if xv:
                dot += vc * xv
        val = u * (zt - dot)
        if val:
            x[c] = val
    return {c: v for c, v in x.items() if v}


def find_bounding_chain(cx, z, q_min=None, q_max=None, ring="int",
                        src_mask=None, check=True):
    """Witness x with d x = z in the window F_{q_min}/F_{q_max}, or None.

    Entries of z above the window (gr_q >= q_max) are quotiented away;
    entries below q_min are an error.  src_mask (bool array) optionally
    restricts the support of the witness further."""
    z = {int(i): v for i, v in z.items() if v}
    if q_max is not None:
        z = {i: v for i, v in z.items() if cx.gr_q[i] < q_max}
    if not z:
        return {}
    if q_min is not None:
        assert all(cx.gr_q[i] >= q_min for i in z), "chain below the window"
    hs = {int(cx.gr_h[i]) for i in z}
    assert len(hs) == 1, "rhs must be homogeneous in gr_h"
    h = hs.pop()
    if check:
        dz = apply_matrix(cx.d, z)
        if q_max is not None:
            dz = {i: v for i, v in dz.items() if cx.gr_q[i] < q_max}
        if dz:
            raise NotACycle("rhs is not a cycle in the window")
    tgt = np.nonzero(cx.window_mask(q_min, q_max, h=h))[0]
    src_bool = cx.window_mask(q_min, q_max, h=h - 1)
    if src_mask is not None:
        src_bool &= src_mask
    src = np.nonzero(src_bool)[0]
    x = solve_boundary_map(cx.d, src, tgt, z, ring=ring)
    if x is not None and check:
        dx = apply_matrix(cx.d, {i: v for i, v in x.items()})
        if q_max is not None:
            dx = {i: v for i, v in dx.items() if cx.gr_q[i] < q_max}
        assert dx == z, "witness re-check failed"
    return x


def class_vanishes(cx, z, q_min=None, q_max=None, ring="int"):
    return find_bounding_chain(cx, z, q_min, q_max, ring=ring) is not None


# ------------------------------------------------------------------
# homology groups

def homology_groups(cx, mask=None, ring="int"):
    """dict gr_h -> (free rank, tuple of torsion orders) of the (masked
    subquotient) complex; zero groups omitted."""
    if mask is None:
        ids = np.arange(cx.n)
    else:
        ids = np.nonzero(mask)[0]
    sys_ = _build_system(cx.d, ids, ids)
    alive = set(int(i) for i in ids)
    trace = []
    sys_.eliminate(trace=trace, z={})
    for r, c, _, _, _ in trace:
        alive.discard(r)
        alive.discard(c)
    counts = {}
    for i in alive:
        counts[int(cx.gr_h[i])] = counts.get(int(cx.gr_h[i]), 0) + 1
    by_h = {}
    for i in alive:
        by_h.setdefault(int(cx.gr_h[i]), []).append(i)
    degrees = sorted(by_h)
    rank_out = {}
    tors_in = {}
    for h in degrees:
        rows_ids = by_h.get(h + 1, [])
        cols_ids = by_h[h]
        dense = [[sys_.rows.get(r, {}).get(c, 0) for c in cols_ids]
                 for r in rows_ids]
        if not rows_ids or not cols_ids:
            rank_out[h] = 0
            continue
        if ring == "int":
            diag, _, _ = snf_with_transforms(dense)
            rank_out[h] = len(diag)
            tors_in[h + 1] = tuple(sorted(abs(e) for e in diag
                                          if abs(e) > 1))
        else:
            rank_out[h] = rational_rank(dense)
    out = {}
    for h in degrees:
        free = counts[h] - rank_out.get(h, 0) - rank_out.get(h - 1, 0)
        torsion = tors_in.get(h, ()) if ring == "int" else ()
        if free or torsion:
            out[h] = (free, torsion)
    return out


def homology_bigraded(cx, ring="int"):
    """Bigraded groups for a quantum-homogeneous differential:
    dict (gr_h, gr_q) -> (free rank, torsion orders)."""
    coo = cx.d.tocoo()
    assert np.all(cx.gr_q[coo.row] == cx.gr_q[coo.col]), \
        "differential is not quantum-homogeneous"
    out = {}
    for q in sorted(set(int(v) for v in cx.gr_q)):
        groups = homology_groups(cx, mask=cx.gr_q == q, ring=ring)
        for h, val in groups.items():
            out[(h, q)] = val
    return out
