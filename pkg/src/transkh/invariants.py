"""Transverse invariants of braid closures.

### CONVENTIONS
# The oriented resolution of a braid word on m strands is m concentric
# circles, one per strand position, position 1 outermost (the closure
# wraps around the right).  The canonical cycle labels circle at
# position p by a parity count: for the right-handed representative the
# count is p, for the left-handed twin it is p-1.  Even count = plain
# "minus" label; odd count = the twisted label minus - plus.  With
# flip_labels the parities swap (the other uniform choice).
#
# The lowest-order part of either cycle is the all-minus generator, so
# min gr_q = n_plus - n_minus - strands = self-linking, and the cycle
# sits in homological degree 0.
#
# Window classes: for p <= 0 < q the canonical cycle represents a class
# in F_{sl+2p} / F_{sl+2q}; the difference of the two twins lies two
# filtration steps higher and is taken in windows with p <= 1 < q.
"""

import numpy as np

from .complexes import DiagramCube, apply_matrix, flatten_chain
from .errors import WindowInvalid, MultiComponent
from .homology import find_bounding_chain, homology_bigraded
from .resolution import oriented_bits, oriented_resolution, strand_position


def oriented_vertex(word):
    bits = oriented_bits(word.letters)
    return sum(b << j for j, b in enumerate(bits))


def transverse_cycle(word, sign=+1, flip=False):
    """Canonical cycle as {(vertex, label mask): coeff}.

    sign=+1 / -1 selects the two twins; they differ by one parity shift
    on every circle."""
    assert sign in (+1, -1)
    res = oriented_resolution(word.strands, word.letters)
    v = oriented_vertex(word)
    twisted = []        # circle indices carrying minus - plus
    for ci in range(res.n_circles):
        p = strand_position(res, ci)
        count = p if sign > 0 else p - 1
        odd = bool(count & 1)
        if flip:
            odd = not odd
        if odd:
            twisted.append(ci)
    chain = {}
    for sub in range(1 << len(twisted)):
        mask = 0
        for a, ci in enumerate(twisted):
            if (sub >> a) & 1:
                mask |= 1 << ci
        coeff = -1 if (bin(sub).count("1") & 1) else 1
        chain[(v, mask)] = coeff
    return chain


def transverse_difference(word, flip=False):
    """The twin difference (right-handed minus left-handed cycle); its
    lowest part sits at gr_q = sl + 2."""
    plus = transverse_cycle(word, +1, flip)
    minus = transverse_cycle(word, -1, flip)
    out = dict(plus)
    for k, v in minus.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def combination_cycle(word, alpha, beta, flip=False):
    """alpha * (right twin) + beta * (left twin)."""
    plus = transverse_cycle(word, +1, flip)
    minus = transverse_cycle(word, -1, flip)
    out = {}
    for k, v in plus.items():
        out[k] = out.get(k, 0) + alpha * v
    for k, v in minus.items():
        out[k] = out.get(k, 0) + beta * v
    return {k: v for k, v in out.items() if v}


def cycle_gradings(word, chain):
    """(gr_h values, min gr_q, max gr_q) of a {(v, mask): coeff} chain."""
    n = len(word.letters)
    n_plus = word.n_plus
    n_minus = word.n_minus
    cube = DiagramCube(word)
    hs, qs = set(), []
    for (v, mask), co in chain.items():
        assert co
        c = cube.resolution(v).n_circles
        pv = bin(v).count("1")
        pl = bin(mask).count("1")
        hs.add(pv - n_minus)
        qs.append(pv + (2 * pl - c) + n_plus - 2 * n_minus)
    return hs, min(qs), max(qs)


def is_cycle(word, chain, theory="def"):
    cube = DiagramCube(word, theory)
    return not cube.delta_chain(chain)


def window_bounds(word, p, q):
    """Quantum window [sl+2p, sl+2q) for a class of the canonical cycle."""
    if not (p <= 0 < q):
        raise WindowInvalid("window needs p <= 0 < q, got (%d, %d)"
                            % (p, q))
    sl = word.self_linking
    return sl + 2 * p, sl + 2 * q


def diff_window_bounds(word, p, q):
    if not (p <= 1 < q):
        raise WindowInvalid("difference window needs p <= 1 < q, "
                            "got (%d, %d)" % (p, q))
    sl = word.self_linking
    return sl + 2 * p, sl + 2 * q


def window_class_vanishes(cx, word, chain_vm, p, q, ring="int",
                          difference=False):
    """Is the class of the chain zero in F_{sl+2p}/F_{sl+2q}?"""
    if difference:
        lo, hi = diff_window_bounds(word, p, q)
    else:
        lo, hi = window_bounds(word, p, q)
    z = flatten_chain(cx, chain_vm)
    return find_bounding_chain(cx, z, q_min=lo, q_max=hi,
                               ring=ring) is not None


def s_invariant(word, cx=None, ring="rational"):
    """Slice-style concordance invariant from the deformed theory:
    sl - 1 + 2 min{q >= 1 : class nonzero below filtration sl+2q}."""
    from .complexes import build_complex
    if not word.is_knot():
        raise MultiComponent("s-invariant needs a knot closure")
    if cx is None:
        cx = build_complex(word, "def")
    sl = word.self_linking
    psi = flatten_chain(cx, transverse_cycle(word, +1))
    q_top = int(cx.gr_q.max())
    q = 1
    while sl + 2 * q <= q_top + 2:
        if find_bounding_chain(cx, psi, q_max=sl + 2 * q,
                               ring=ring) is None:
            return sl - 1 + 2 * q
        q += 1
    raise AssertionError("canonical class vanished in every window")


def triviality_obstruction(word, cx_kh=None):
    """Undeformed groups in homological degree -1 below the self-linking
    grading.  When they all vanish, no correction term can kill the
    lowest-order class, so the first window class is forced nonzero.

    Returns (vanishes, {(h, q): (rank, torsion)} of the offending part).
    """
    from .complexes import build_complex
    if cx_kh is None:
        cx_kh = build_complex(word, "kh")
    sl = word.self_linking
    groups = homology_bigraded(cx_kh)
    bad = {k: v for k, v in groups.items()
           if k[0] == -1 and k[1] < sl}
    return (not bad, bad)
