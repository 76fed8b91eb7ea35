"""Grid diagrams, braid extraction, classical invariants, and the
square-move rewrite that realizes a negative flype on the closure.

### CONVENTIONS
# A grid of size n has one X and one O in every row and column:
# xs[c] / os[c] = row of the X / O in column c, rows counted bottom-up.
# The link joins O to X horizontally in every row and X to O
# vertically in every column, verticals crossing over horizontals.
#
# Braid extraction: every downward vertical segment is replaced by two
# upward rays (out of its X, into its O); sweeping the rows bottom to
# top, each horizontal jump drags a strand under the verticals it
# passes (rightward jumps give negative letters, leftward positive).
# The strand count is the number of downward columns.
#
# Front reading: rotating the grid 45 degrees counterclockwise turns
# corners traversed with tangents {north, east} into up cusps and
# {south, west} into down cusps; the other corners are smooth.
#   tb = writhe - (#cusps)/2,  rot = (#down - #up)/2,
# and tb - rot equals the self-linking number of the extracted braid
# closure (convention locked in by the 2x2 unknot test).
#
# The square-move templates are fixed 5x7 marker stencils; the two
# patterns use the same cells with equal per-row and per-column marker
# budgets, so swapping them inside any grid keeps it a grid.  The
# source extracts to a closure word of shape  A s_m s_m B s_m^-1  and
# the target to  s_m A s_m^-1 B s_m  (equal up to cyclic shifts), the
# two sides of a negative flype with twist 2.
#
# File format: one line "n", then xs and os as n space-separated
# 0-indexed integers, one line each.
"""

from bisect import bisect_left, insort
from dataclasses import dataclass
from fractions import Fraction

from .braid import BraidWord
from .errors import (MalformedGrid, MultiComponent, PatternMismatch,
                     ShapeMismatch)


@dataclass(frozen=True)
class GridDiagram:
    n: int
    xs: tuple
    os: tuple

    def __post_init__(self):
        n, xs, os_ = self.n, self.xs, self.os
        if n < 2 or len(xs) != n or len(os_) != n:
            raise MalformedGrid("need n >= 2 with n entries in xs and os")
        if sorted(xs) != list(range(n)) or sorted(os_) != list(range(n)):
            raise MalformedGrid("xs and os must be permutations of 0..n-1")
        if any(a == b for a, b in zip(xs, os_)):
            raise MalformedGrid("a column may not carry X and O in the "
                                "same row")


def parse_grid(text):
    lines = [ln for ln in text.splitlines() if ln.split("#", 1)[0].strip()]
    try:
        n = int(lines[0])
        xs = tuple(int(t) for t in lines[1].split())
        os_ = tuple(int(t) for t in lines[2].split())
    except (IndexError, ValueError) as exc:
        raise MalformedGrid("grid file needs n, xs, os lines (%s)" % exc)
    return GridDiagram(n, xs, os_)


def format_grid(g):
    return "%d\n%s\n%s\n" % (g.n, " ".join(map(str, g.xs)),
                             " ".join(map(str, g.os)))


def component_count(g):
    seen, count = set(), 0
    for c0 in range(g.n):
        if c0 in seen:
            continue
        count += 1
        c = c0
        while c not in seen:
            seen.add(c)
            c = g.xs.index(g.os[c])
    return count


# ------------------------------------------------------------------
# braid extraction

def braid_from_grid(g):
    """The ascending closure braid of the grid, read bottom to top."""
    n = g.n
    down = sorted(c for c in range(n) if g.os[c] < g.xs[c])
    active = list(down)
    letters = []
    for r in range(n):
        co, cx = g.os.index(r), g.xs.index(r)
        pos = bisect_left(active, co)
        assert pos < len(active) and active[pos] == co, \
            "mover column is not active"
        active.pop(pos)
        tgt = bisect_left(active, cx)
        if tgt > pos:
            letters.extend(-(j + 1) for j in range(pos, tgt))
        else:
            letters.extend(j for j in range(pos, tgt, -1))
        insort(active, cx)
    assert active == down, "sweep did not return to the closure strands"
    return BraidWord(max(len(down), 1), tuple(letters))


# ------------------------------------------------------------------
# classical invariants

def _tangents(g):
    """Orientation tangents: verticals run X to O, horizontals O to X."""
    dv = ["N" if g.os[c] > g.xs[c] else "S" for c in range(g.n)]
    dh = ["E" if g.xs.index(r) > g.os.index(r) else "W"
          for r in range(g.n)]
    return dv, dh


def grid_writhe(g):
    dv, dh = _tangents(g)
    spans_h = []
    for r in range(g.n):
        co, cx = g.os.index(r), g.xs.index(r)
        spans_h.append((min(co, cx), max(co, cx)))
    w = 0
    for c in range(g.n):
        rlo, rhi = sorted((g.xs[c], g.os[c]))
        for r in range(rlo + 1, rhi):
            clo, chi = spans_h[r]
            if clo < c < chi:
                w += 1 if (dv[c] == "N") != (dh[r] == "E") else -1
    return w


def classical_invariants(g):
    """(tb, rot) of the front obtained by the 45-degree rotation."""
    if component_count(g) != 1:
        raise MultiComponent("classical invariants need a single "
                             "component")
    dv, dh = _tangents(g)
    up = down = 0
    for c in range(g.n):
        for pair in ({dh[g.xs[c]], dv[c]}, {dv[c], dh[g.os[c]]}):
            if pair == {"N", "E"}:
                up += 1
            elif pair == {"S", "W"}:
                down += 1
    assert (up + down) % 2 == 0
    tb = grid_writhe(g) - (up + down) // 2
    rot = (down - up) // 2
    return tb, rot


def stabilize_marker(g, c, corner):
    """Split the X of column c into a 2x2 elbow whose empty cell sits
    at the named corner; the zigzag oracle for the classical
    invariants."""
    assert corner in ("NW", "NE", "SW", "SE")
    r = g.xs[c]
    up, right = corner[0] == "N", corner[1] == "E"
    e_r, o_r = (r + 1, r) if up else (r, r + 1)
    e_c, o_c = (c + 1, c) if right else (c, c + 1)
    n2 = g.n + 1
    xs2, os2 = [None] * n2, [None] * n2
    for col in range(g.n):
        nc = col + 1 if col > c else col
        if col != c:
            row = g.xs[col]
            xs2[nc] = row + 1 if row > r else row
        row = g.os[col]
        target_c = nc if col != c else e_c
        os2[target_c] = e_r if row == r else (row + 1 if row > r else row)
    xs2[o_c], xs2[e_c] = e_r, o_r
    os2[o_c] = o_r
    return GridDiagram(n2, tuple(xs2), tuple(os2))


# ------------------------------------------------------------------
# encoding braids as grids

def _emit_crossing(slots, used, letter):
    """Realize one crossing as a horizontal jump; mutates slots, used;
    returns the (o_col, x_col) of the new row."""
    i = abs(letter)
    assert 1 <= i < len(slots)
    cols = sorted(slots)
    if letter > 0:
        # right strand jumps left under the left strand
        src, crossed = slots[i], slots[i - 1]
        j = cols.index(crossed)
        lo = cols[j - 1] if j else crossed - 10
        land = (lo + crossed) / 2
        while land in used:
            land = (land + lo) / 2
        slots[i], slots[i - 1] = slots[i - 1], land
    else:
        src, crossed = slots[i - 1], slots[i]
        j = cols.index(crossed)
        hi = cols[j + 1] if j + 1 < len(cols) else crossed + 10
        land = (crossed + hi) / 2
        while land in used:
            land = (land + hi) / 2
        slots[i - 1], slots[i] = slots[i], land
    used.add(land)
    return (src, land)


def _exit_rows(slots, targets, used):
    """Horizontal jumps parking slot j at targets[j] without crossing
    any active vertical: conflicts jog first, then left-movers in
    increasing and right-movers in decreasing slot order."""
    rows = []

    def check_clear(a, b):
        lo, hi = min(a, b), max(a, b)
        assert not any(lo < col < hi for col in slots), \
            "exit jump would cross an active strand"

    for j in range(len(slots)):
        if slots[j] == targets[j]:
            cols = sorted(slots)
            p = cols.index(slots[j])
            hi = cols[p + 1] if p + 1 < len(cols) else slots[j] + 10
            land = (slots[j] + hi) / 2
            while land in used:
                land = (land + slots[j]) / 2
            used.add(land)
            rows.append((slots[j], land))
            slots[j] = land
    order = [j for j in range(len(slots)) if targets[j] < slots[j]] + \
        [j for j in sorted(range(len(slots)), reverse=True)
         if targets[j] > slots[j]]
    for j in order:
        check_clear(slots[j], targets[j])
        rows.append((slots[j], targets[j]))
        slots[j] = targets[j]
    return rows


def _rows_to_grid(rows):
    cols = sorted({c for pair in rows for c in pair})
    rank = {c: k for k, c in enumerate(cols)}
    assert len(cols) == len(rows), "every column needs one X and one O"
    xs2, os2 = [None] * len(rows), [None] * len(rows)
    for r, (oc, xc) in enumerate(rows):
        os2[rank[oc]] = r
        xs2[rank[xc]] = r
    return GridDiagram(len(rows), tuple(xs2), tuple(os2))


def grid_from_braid(word):
    """A grid whose extracted closure braid is exactly the given word."""
    m = word.strands
    slots = [Fraction(10 * (j + 1)) for j in range(m)]
    targets = list(slots)
    used = set(slots)
    rows = [_emit_crossing(slots, used, t) for t in word.letters]
    rows.extend(_exit_rows(slots, targets, used))
    g = _rows_to_grid(rows)
    back = braid_from_grid(g)
    assert back.letters == word.letters and back.strands == word.strands
    return g


# ------------------------------------------------------------------
# the square move

SQUARE_ROWS, SQUARE_COLS = 5, 7
# relative columns 0..6; both stencils place one O and one X in each
# of the five rows and agree on which columns carry an X, an O, or
# both, so the swap preserves the grid axioms
SQUARE_SOURCE = (
    (0, 4, "O"), (0, 6, "X"),
    (1, 6, "O"), (1, 2, "X"),
    (2, 5, "O"), (2, 0, "X"),
    (3, 2, "O"), (3, 3, "X"),
    (4, 0, "O"), (4, 1, "X"),
)
SQUARE_TARGET = (
    (0, 5, "O"), (0, 1, "X"),
    (1, 4, "O"), (1, 6, "X"),
    (2, 6, "O"), (2, 0, "X"),
    (3, 0, "O"), (3, 2, "X"),
    (4, 2, "O"), (4, 3, "X"),
)


def _block_cells(g, r0, c0):
    cells = {}
    for dc in range(SQUARE_COLS):
        for label, perm in (("X", g.xs), ("O", g.os)):
            r = perm[c0 + dc]
            if r0 <= r < r0 + SQUARE_ROWS:
                cells[(r - r0, dc, label)] = True
    return frozenset(cells)


def sz_plus_rewrite(g, loc):
    """Swap the square-move stencil found at loc = (row, col); matching
    either stencil rewrites to the other one.  tb, rot and the
    component count are preserved."""
    r0, c0 = loc
    if not (0 <= r0 <= g.n - SQUARE_ROWS and 0 <= c0 <= g.n - SQUARE_COLS):
        raise PatternMismatch("stencil does not fit at %r" % (loc,))
    have = _block_cells(g, r0, c0)
    src = frozenset((r, c, t) for r, c, t in SQUARE_SOURCE)
    tgt = frozenset((r, c, t) for r, c, t in SQUARE_TARGET)
    if have == src:
        new = SQUARE_TARGET
    elif have == tgt:
        new = SQUARE_SOURCE
    else:
        raise PatternMismatch("no square-move stencil at %r" % (loc,))
    xs2, os2 = list(g.xs), list(g.os)
    for dc in range(SQUARE_COLS):
        for perm, label in ((xs2, "X"), (os2, "O")):
            if r0 <= perm[c0 + dc] < r0 + SQUARE_ROWS:
                perm[c0 + dc] = None
    for dr, dc, label in new:
        (xs2 if label == "X" else os2)[c0 + dc] = r0 + dr
    out = GridDiagram(g.n, tuple(xs2), tuple(os2))
    assert component_count(out) == component_count(g)
    if component_count(g) == 1:
        assert classical_invariants(out) == classical_invariants(g), \
            "square move must preserve tb and rot"
    return out


def find_square_move(g):
    """All (loc, which) where a stencil matches."""
    src = frozenset(SQUARE_SOURCE)
    tgt = frozenset(SQUARE_TARGET)
    out = []
    for r0 in range(g.n - SQUARE_ROWS + 1):
        for c0 in range(g.n - SQUARE_COLS + 1):
            have = _block_cells(g, r0, c0)
            if have == src:
                out.append(((r0, c0), "source"))
            elif have == tgt:
                out.append(((r0, c0), "target"))
    return out


def square_move_pair(b_letters, m):
    """(G1, G2, loc): grids identical outside the stencil block, whose
    extracted braids are the two sides of the twist-2 negative flype
    with A empty and the given B on the lower m strands."""
    assert m >= 1
    assert all(1 <= abs(t) <= m - 1 for t in b_letters), \
        "B must avoid the flyped strand pair"
    base = Fraction(10 * m)
    L2, E1, L1, E2 = base - 4, base - 3, base - 2, base - 1
    p, q, r1 = base, base + 10, base + 14
    park1 = Fraction(10 * (m - 1) + 2)
    park2 = Fraction(10 * (m - 1) + 3)
    box1 = [(p, r1), (r1, L1), (q, L2), (L1, E2), (L2, E1)]
    box2 = [(q, E1), (p, r1), (r1, L2), (L2, L1), (L1, E2)]
    jogs = [(E1, park1), (E2, park2)]

    slots = [Fraction(10 * (j + 1)) for j in range(m - 1)] + [park1, park2]
    targets = [Fraction(10 * (j + 1)) for j in range(m - 1)] + [p, q]
    used = {L2, E1, L1, E2, p, q, r1, park1, park2} | set(slots)
    shared = [_emit_crossing(slots, used, t) for t in b_letters]
    shared.extend(_exit_rows(slots, targets, used))
    g1 = _rows_to_grid(box1 + jogs + shared)
    g2 = _rows_to_grid(box2 + jogs + shared)
    cols = sorted({c for pair in (box1 + jogs + shared) for c in pair})
    loc = (0, cols.index(L2))
    return g1, g2, loc


# ------------------------------------------------------------------
# flype shapes of extracted braids

def _rotations(letters):
    n = len(letters)
    return [letters[i:] + letters[:i] for i in range(max(n, 1))]


def _parse_source_shape(letters):
    """(A, B, m) decompositions of a cyclic word of shape
    A [m m] B [-m]."""
    out = []
    if not letters:
        return out
    m = max(abs(t) for t in letters)
    if letters.count(m) != 2 or letters.count(-m) != 1:
        return out
    for w in _rotations(letters):
        if w[-1] != -m:
            continue
        body = w[:-1]
        for a in range(len(body) - 1):
            if body[a] == m and body[a + 1] == m:
                A, B = body[:a], body[a + 2:]
                if all(abs(t) < m for t in A + B):
                    out.append((A, B, m))
    return out


def _parse_target_shape(letters):
    """(A, B, m) decompositions of a cyclic word of shape
    [m] A [-m] B [m]."""
    out = []
    if not letters:
        return out
    m = max(abs(t) for t in letters)
    if letters.count(m) != 2 or letters.count(-m) != 1:
        return out
    for w in _rotations(letters):
        if w[0] != m or w[-1] != m:
            continue
        j = w.index(-m)
        A, B = w[1:j], w[j + 1:-1]
        if all(abs(t) < m for t in A + B):
            out.append((A, B, m))
    return out


def verify_flype_sz(g1, g2):
    """Certify that the two grids present the two sides of a twist-2
    negative flype: extracted closure braids match the source/target
    shapes with common A, B (either way around), and the classical
    invariants agree with the self-linking number."""
    w1, w2 = braid_from_grid(g1), braid_from_grid(g2)
    matches = []
    for wa, wb, flip in ((w1, w2, False), (w2, w1, True)):
        src = _parse_source_shape(list(wa.letters))
        tgt = _parse_target_shape(list(wb.letters))
        for A1, B1, m1 in src:
            for A2, B2, m2 in tgt:
                if m1 == m2 and A1 == A2 and B1 == B2:
                    matches.append((A1, B1, m1, flip))
    if not matches:
        raise ShapeMismatch(
            "closure braids %r and %r do not form a flype pair"
            % (list(w1.letters), list(w2.letters)))
    A, B, m, flip = matches[0]
    checks = {"components": component_count(g1) == 1
              and component_count(g2) == 1}
    report = {
        "theorem": "flype-square-move",
        "inputs": {"grid1": format_grid(g1).strip().split("\n"),
                   "grid2": format_grid(g2).strip().split("\n")},
        "ok": True,
        "m": m, "A": list(A), "B": list(B),
        "swapped": flip,
        "words": [list(w1.letters), list(w2.letters)],
        "strands": [w1.strands, w2.strands],
    }
    if checks["components"]:
        tb1, rot1 = classical_invariants(g1)
        tb2, rot2 = classical_invariants(g2)
        checks["tb_rot_equal"] = (tb1, rot1) == (tb2, rot2)
        checks["tb_rot_sl"] = (tb1 - rot1 == w1.self_linking
                               and tb2 - rot2 == w2.self_linking)
        report["tb"], report["rot"] = tb1, rot1
        if not (checks["tb_rot_equal"] and checks["tb_rot_sl"]):
            raise ShapeMismatch("classical invariants disagree: %r"
                                % checks)
    report["checks"] = checks
    return report
