"""Filtered homotopy-equivalence records and elimination engines.

### CONVENTIONS
# A record packs a homotopy equivalence between filtered complexes:
#   f: source -> target,  g: target -> source   (chain maps, degree 0)
#   h: source -> source,  k: target -> target   (degree -1)
# with  Id_source - g f = d h + h d  and  Id_target - f g = d k + k d,
# all four maps non-decreasing in gr_q.  The two homotopy identities are
# independent; verify() checks both.
#
# Composition (A->B) then (B->C): f = f2 f1, g = g1 g2,
# h = h1 + g1 h2 f1, k = k2 + f2 k1 g2.  Reversal swaps f/g and h/k.
#
# Elimination always cancels a source generator alpha against a target
# generator beta with unit pairing <d alpha, beta> = +-1 and equal gr_q
# (unequal gradings would break filteredness of the correction terms).
"""

import numpy as np
import scipy.sparse as sp

from ..complexes import Complex, apply_matrix
from ..errors import NotCancellable, FiltrationViolation


def _csr(m):
    m = m.tocsr()
    m.eliminate_zeros()
    return m


def same_matrix(a, b):
    c = (a - b).tocsr()
    c.eliminate_zeros()
    return c.nnz == 0


def _check_degrees(mat, gr_row_h, gr_col_h, gr_row_q, gr_col_q, dh, what):
    coo = mat.tocoo()
    if coo.nnz == 0:
        return
    if not np.all(gr_row_h[coo.row] == gr_col_h[coo.col] + dh):
        raise FiltrationViolation("%s has wrong homological degree" % what)
    if not np.all(gr_row_q[coo.row] >= gr_col_q[coo.col]):
        raise FiltrationViolation("%s drops quantum grading" % what)


class ChainMapRecord:
    def __init__(self, source, target, f, g, h, k):
        self.source = source
        self.target = target
        self.f = _csr(f)
        self.g = _csr(g)
        self.h = _csr(h)
        self.k = _csr(k)
        assert self.f.shape == (target.n, source.n)
        assert self.g.shape == (source.n, target.n)
        assert self.h.shape == (source.n, source.n)
        assert self.k.shape == (target.n, target.n)

    def __repr__(self):
        return "ChainMapRecord(%d -> %d)" % (self.source.n, self.target.n)

    @classmethod
    def identity(cls, cx):
        eye = sp.identity(cx.n, dtype=np.int64, format="csr")
        z = sp.csr_matrix((cx.n, cx.n), dtype=np.int64)
        return cls(cx, cx, eye, eye, z, z)

    def reverse(self):
        return ChainMapRecord(self.target, self.source,
                              self.g, self.f, self.k, self.h)

    def then(self, other):
        """Compose with a record whose source is our target."""
        assert other.source is self.target
        f = other.f @ self.f
        g = self.g @ other.g
        h = self.h + self.g @ other.h @ self.f
        k = other.k + other.f @ self.k @ other.g
        return ChainMapRecord(self.source, other.target, f, g, h, k)

    def apply(self, chain):
        return apply_matrix(self.f.tocsc(), chain)

    def pull(self, chain):
        return apply_matrix(self.g.tocsc(), chain)

    def verify(self, level="full"):
        s, t = self.source, self.target
        _check_degrees(self.f, t.gr_h, s.gr_h, t.gr_q, s.gr_q, 0, "f")
        _check_degrees(self.g, s.gr_h, t.gr_h, s.gr_q, t.gr_q, 0, "g")
        _check_degrees(self.h, s.gr_h, s.gr_h, s.gr_q, s.gr_q, -1, "h")
        _check_degrees(self.k, t.gr_h, t.gr_h, t.gr_q, t.gr_q, -1, "k")
        if level != "full":
            return
        ds, dt = s.d.tocsr(), t.d.tocsr()
        assert same_matrix(self.f @ ds, dt @ self.f), "f not a chain map"
        assert same_matrix(self.g @ dt, ds @ self.g), "g not a chain map"
        eye_s = sp.identity(s.n, dtype=np.int64, format="csr")
        eye_t = sp.identity(t.n, dtype=np.int64, format="csr")
        assert same_matrix(eye_s - self.g @ self.f,
                           ds @ self.h + self.h @ ds), \
            "source homotopy identity fails"
        assert same_matrix(eye_t - self.f @ self.g,
                           dt @ self.k + self.k @ dt), \
            "target homotopy identity fails"

    def is_strict_retraction(self):
        """fg = Id, k = 0, fh = 0 -- the shape the cone comparison needs."""
        eye_t = sp.identity(self.target.n, dtype=np.int64, format="csr")
        return (self.k.nnz == 0 and same_matrix(self.f @ self.g, eye_t)
                and (self.f @ self.h).nnz == 0)

    def is_strict_inclusion(self):
        eye_t = sp.identity(self.target.n, dtype=np.int64, format="csr")
        return (self.k.nnz == 0 and same_matrix(self.f @ self.g, eye_t)
                and (self.h @ self.g).nnz == 0)


# ------------------------------------------------------------------
# single-pair elimination (the lemma, stated for one pair)

def cancel_pair(cx, alpha, beta):
    """Cancel generator pair (alpha, beta) with unit pairing.

    Returns (reduced Complex, ChainMapRecord cx -> reduced).  Raises
    NotCancellable when the pairing is not a unit or the quantum
    gradings differ (either would break the filtered structure)."""
    alpha, beta = int(alpha), int(beta)
    d = cx.d
    u = int(d[beta, alpha])
    if u not in (1, -1):
        raise NotCancellable("pairing <d a, b> = %d is not a unit" % u)
    if cx.gr_q[alpha] != cx.gr_q[beta]:
        raise NotCancellable("pair has unequal quantum gradings")
    assert cx.gr_h[beta] == cx.gr_h[alpha] + 1
    n = cx.n
    keep = np.array([i for i in range(n) if i not in (alpha, beta)],
                    dtype=np.int64)
    m = len(keep)
    pos = -np.ones(n, dtype=np.int64)
    pos[keep] = np.arange(m)
    # sparse column of d(alpha) and row into beta, restricted to keep
    col = d[:, [alpha]].tocoo()
    q_idx = np.array([pos[r] for r in col.row if r != beta],
                     dtype=np.int64)
    q_val = np.array([v for r, v in zip(col.row, col.data) if r != beta],
                     dtype=np.int64)
    row = d.tocsr()[[beta], :].tocoo()
    r_idx = np.array([pos[c] for c in row.col if c != alpha],
                     dtype=np.int64)
    r_val = np.array([v for c, v in zip(row.col, row.data) if c != alpha],
                     dtype=np.int64)
    dd = d[keep][:, keep].tocsr()
    # reduced differential: d' = d - u^-1 (d alpha) (row into beta)
    if len(q_idx) and len(r_idx):
        fr = np.repeat(q_idx, len(r_idx))
        fc = np.tile(r_idx, len(q_idx))
        fv = -u * np.repeat(q_val, len(r_idx)) * np.tile(r_val, len(q_idx))
        dd = (dd + sp.csr_matrix((fv, (fr, fc)), shape=(m, m))).tocsr()
        dd.eliminate_zeros()
    reduced = Complex(cx.gr_h[keep], cx.gr_q[keep], dd)
    reduced.check_filtered()
    proj = sp.csr_matrix(
        (np.ones(m, dtype=np.int64), (np.arange(m), keep)), shape=(m, n))
    inj = proj.T.tocsr()
    # f(x) = proj(x) - u <x, beta> proj(d alpha)
    f = proj - u * sp.csr_matrix(
        (q_val, (q_idx, np.full(len(q_idx), beta))), shape=(m, n))
    # g(x) = inj(x) - u <d inj(x), beta> alpha
    g = inj - u * sp.csr_matrix(
        (r_val, (np.full(len(r_idx), alpha), r_idx)), shape=(n, m))
    h = sp.csr_matrix(([u], ([alpha], [beta])), shape=(n, n),
                      dtype=np.int64)
    k = sp.csr_matrix((m, m), dtype=np.int64)
    rec = ChainMapRecord(cx, reduced, f, g, h, k)
    return reduced, rec


# ------------------------------------------------------------------
# batched disjoint-pair elimination
#
# One "level" cancels many disjoint pairs at once.  Two shapes keep the
# bookkeeping exact and the reduced differential a plain restriction:
#
#   kind="sub":  d(alpha_i) = s_i beta_i exactly and d(beta_i) = 0
#                (the pairs span a subcomplex; f is the projection).
#   kind="quot": nothing outside the pair maps into alpha_i or beta_i
#                (the pairs span a quotient piece; g is the inclusion).

def contract_level(cx, pairs, kind):
    """pairs: list of (alpha, beta); returns (reduced, record)."""
    assert kind in ("sub", "quot")
    n = cx.n
    d = cx.d
    dr = d.tocsr()
    alphas = np.array([a for a, _ in pairs], dtype=np.int64)
    betas = np.array([b for _, b in pairs], dtype=np.int64)
    both = np.concatenate([alphas, betas])
    assert len(set(both.tolist())) == len(both), "pairs overlap"
    signs = []
    for a, b in pairs:
        u = int(d[b, a])
        if u not in (1, -1):
            raise NotCancellable("pairing %d at (%d, %d)" % (u, a, b))
        if cx.gr_q[a] != cx.gr_q[b]:
            raise NotCancellable("unequal gr_q at (%d, %d)" % (a, b))
        signs.append(u)
    col_nnz = np.diff(d.indptr)
    row_nnz = np.diff(dr.indptr)
    if kind == "sub":
        # d column of alpha = single entry at beta; column of beta empty
        if not (np.all(col_nnz[alphas] == 1) and np.all(col_nnz[betas] == 0)):
            raise NotCancellable("level is not a subcomplex family")
    else:
        # row of alpha empty; row of beta = single entry (the pairing)
        if not (np.all(row_nnz[alphas] == 0) and np.all(row_nnz[betas] == 1)):
            raise NotCancellable("level is not a quotient family")
    drop = set(both.tolist())
    keep = np.array([i for i in range(n) if i not in drop], dtype=np.int64)
    pos = -np.ones(n, dtype=np.int64)
    pos[keep] = np.arange(len(keep))
    reduced = Complex(cx.gr_h[keep], cx.gr_q[keep], d[keep][:, keep])
    m = len(keep)
    proj = sp.csr_matrix(
        (np.ones(m, dtype=np.int64), (np.arange(m), keep)), shape=(m, n))
    inj = proj.T.tocsr()
    # h(beta_i) = s_i alpha_i
    h = sp.csr_matrix((np.array(signs, dtype=np.int64), (alphas, betas)),
                      shape=(n, n))
    if kind == "sub":
        f = proj
        # g(x) = x - sum s_i <d x, beta_i> alpha_i
        rows_b = dr[betas][:, keep]                   # (#pairs, m)
        corr = sp.csr_matrix(
            (np.array(signs, dtype=np.int64),
             (alphas, np.arange(len(pairs)))), shape=(n, len(pairs)))
        g = inj - corr @ rows_b
    else:
        g = inj
        # f(beta_i) = -s_i (d alpha_i) restricted to keep
        cols_a = d[keep][:, alphas]                   # (m, #pairs)
        pick = sp.csr_matrix(
            (np.array(signs, dtype=np.int64),
             (np.arange(len(pairs)), betas)), shape=(len(pairs), n))
        f = proj - cols_a @ pick
    k = sp.csr_matrix((m, m), dtype=np.int64)
    rec = ChainMapRecord(cx, reduced, f, g, h, k)
    return reduced, rec


def contract_levels(cx, level_list, kind):
    """Contract a list of levels in order, composing the records."""
    rec = ChainMapRecord.identity(cx)
    cur = cx
    for pairs in level_list:
        if not pairs:
            continue
        cur, step = contract_level(cur, pairs, kind)
        rec = rec.then(step)
    return cur, rec


# ------------------------------------------------------------------
# mapping cones and transporting contractions through them

def build_cone(cx_a, cx_b, edge):
    """Cone of an anti-chain map edge: A -> B (d_B e = -e d_A); the
    gradings are taken from the two pieces as given (cube faces already
    carry the right shifted gradings).

    Returns (cone Complex, a_ids, b_ids)."""
    e = edge.tocsr()
    assert e.shape == (cx_b.n, cx_a.n)
    assert same_matrix(cx_b.d.tocsr() @ e, -(e @ cx_a.d.tocsr())), \
        "edge block is not an anti-chain map"
    d = sp.bmat([[cx_a.d, None], [e, cx_b.d]], format="csc", dtype=np.int64)
    gr_h = np.concatenate([cx_a.gr_h, cx_b.gr_h])
    gr_q = np.concatenate([cx_a.gr_q, cx_b.gr_q])
    cone = Complex(gr_h, gr_q, d)
    return cone, np.arange(cx_a.n), cx_a.n + np.arange(cx_b.n)


def cone_comparison_target(cx_a, edge, rec):
    """Transport Cone(e: A -> B) to Cone(f e: A -> B') along a strict
    retraction record of B.  Needs rec.k = 0, f g = Id, f h = 0."""
    assert rec.is_strict_retraction()
    b, b2 = rec.source, rec.target
    e2 = rec.f @ edge.tocsr()
    cone1, a1, _ = build_cone(cx_a, b, edge)
    cone2, _, _ = build_cone(cx_a, b2, e2)
    eye_a = sp.identity(cx_a.n, dtype=np.int64, format="csr")
    za = sp.csr_matrix((cx_a.n, cx_a.n), dtype=np.int64)
    f = sp.bmat([[eye_a, None], [None, rec.f]], format="csr")
    g = sp.bmat([[eye_a, None], [-rec.h @ edge.tocsr(), rec.g]],
                format="csr")
    h = sp.bmat([[za, None], [None, rec.h]], format="csr")
    k = sp.csr_matrix((cone2.n, cone2.n), dtype=np.int64)
    return cone1, cone2, ChainMapRecord(cone1, cone2, f, g, h, k)


def cone_comparison_source(cx_a, edge, rec):
    """Transport Cone(e: B -> A) to Cone(e g: B' -> A) along a strict
    inclusion-type record of B.  Needs rec.k = 0, f g = Id, h g = 0."""
    assert rec.is_strict_inclusion()
    b, b2 = rec.source, rec.target
    e2 = edge.tocsr() @ rec.g
    cone1, _, _ = build_cone(b, cx_a, edge)
    cone2, _, _ = build_cone(b2, cx_a, e2)
    eye_a = sp.identity(cx_a.n, dtype=np.int64, format="csr")
    za = sp.csr_matrix((cx_a.n, cx_a.n), dtype=np.int64)
    f = sp.bmat([[rec.f, None], [-edge.tocsr() @ rec.h, eye_a]],
                format="csr")
    g = sp.bmat([[rec.g, None], [None, eye_a]], format="csr")
    h = sp.bmat([[rec.h, None], [None, za]], format="csr")
    k = sp.csr_matrix((cone2.n, cone2.n), dtype=np.int64)
    return cone1, cone2, ChainMapRecord(cone1, cone2, f, g, h, k)
