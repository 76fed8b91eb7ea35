"""Planar resolutions of braid closures.

### CONVENTIONS
# A braid word with n letters on m strands is drawn bottom-to-top; letter
# j (0-based) sits between horizontal gap j and gap j+1.  A *segment* is
# the vertical arc at strand position p (1-based) across gap g (0..n);
# we key it by the int  g*m + (p-1)  so sorting by key is sorting by
# (gap, position).  The closure joins gap n to gap 0 at every position
# (wrapping around the right side of the diagram, so the position-1
# circle of the oriented resolution is outermost).
#
# Smoothing bit at a positive letter: 0 = parallel strands (the oriented
# smoothing), 1 = cap/cup.  At a negative letter the roles swap: 0 =
# cap/cup, 1 = parallel.  Hence the all-zero vertex of a positive word is
# its oriented resolution, and in general the oriented resolution has
# bit 1 exactly at the negative letters.
"""

from .errors import ShapeMismatch


def smoothing_is_parallel(letter, bit):
    assert letter != 0 and bit in (0, 1)
    return (bit == 0) == (letter > 0)


def oriented_bits(letters):
    return tuple(0 if t > 0 else 1 for t in letters)


class Resolution:
    """One full smoothing of a braid closure, with its circles.

    circles are tuples of segment keys, sorted; the circle list is ordered
    by smallest key, which makes generator ordering reproducible.
    """

    def __init__(self, strands, letters, bits):
        n = len(letters)
        assert len(bits) == n
        self.strands = strands
        self.letters = tuple(letters)
        self.bits = tuple(bits)
        m = strands
        size = (n + 1) * m
        parent = list(range(size))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                if ra > rb:
                    ra, rb = rb, ra
                parent[rb] = ra

        for g in range(n):
            t = letters[g]
            i = abs(t)
            base, nxt = g * m, (g + 1) * m
            if smoothing_is_parallel(t, bits[g]):
                lo, hi = 0, 0          # every position passes through
            else:
                union(base + i - 1, base + i)        # cap below
                union(nxt + i - 1, nxt + i)          # cup above
                lo, hi = i, i + 1
            for p in range(1, m + 1):
                if lo <= p <= hi:
                    continue
                union(base + p - 1, nxt + p - 1)
        top = n * m
        for p in range(m):
            union(top + p, p)

        groups = {}
        for a in range(size):
            groups.setdefault(find(a), []).append(a)
        self.circles = tuple(tuple(sorted(g)) for g in
                             sorted(groups.values(), key=min))
        self.n_circles = len(self.circles)
        self.circle_index = {}
        for ci, circ in enumerate(self.circles):
            for a in circ:
                self.circle_index[a] = ci

    def __repr__(self):
        return "Resolution(m=%d, bits=%s, circles=%d)" % (
            self.strands, "".join(map(str, self.bits)), self.n_circles)

    def segment(self, gap, pos):
        return gap * self.strands + (pos - 1)

    def site_segments(self, j):
        """The four segment keys around letter j's smoothing site."""
        i = abs(self.letters[j])
        return (self.segment(j, i), self.segment(j, i + 1),
                self.segment(j + 1, i), self.segment(j + 1, i + 1))

    def transition(self, other, j):
        """Circle bookkeeping for flipping bit j (self -> other).

        Returns (kind, src, tgt, carry): kind 'merge' or 'split'; src/tgt
        the affected circle indices on each side; carry pairs (src_ci,
        tgt_ci) for circles untouched by the flip."""
        assert self.letters == other.letters and self.strands == other.strands
        assert self.bits[j] != other.bits[j]
        assert all(a == b for q, (a, b) in
                   enumerate(zip(self.bits, other.bits)) if q != j)
        site = self.site_segments(j)
        src = tuple(sorted({self.circle_index[s] for s in site}))
        tgt = tuple(sorted({other.circle_index[s] for s in site}))
        if len(src) == 2:
            assert len(tgt) == 1, "reconnection must merge or split"
            kind = "merge"
        else:
            assert len(src) == 1 and len(tgt) == 2
            kind = "split"
        carry = []
        for ci, circ in enumerate(self.circles):
            if ci in src:
                continue
            cj = other.circle_index[circ[0]]
            assert self.circles[ci] == other.circles[cj]
            carry.append((ci, cj))
        return kind, src, tgt, carry


def oriented_resolution(strands, letters):
    """The oriented smoothing: m concentric circles, one per position."""
    res = Resolution(strands, letters, oriented_bits(letters))
    if res.n_circles != strands:
        raise ShapeMismatch("oriented resolution should have one circle "
                            "per strand, got %d" % res.n_circles)
    for p in range(1, strands + 1):
        # circle index p-1 is the vertical line at position p
        assert res.circle_index[res.segment(0, p)] == p - 1
    return res


def strand_position(res, ci):
    """Strand position of circle ci in an oriented resolution (depth+1:
    position 1 is outermost)."""
    key = res.circles[ci][0]
    return key % res.strands + 1


def match_circles_by_segments(res_from, res_to, key_map):
    """Match circles of res_from to circles of res_to when the underlying
    diagrams are the same up to a relabeling of segment keys.

    key_map: callable old_key -> new_key taking segments of res_from into
    segments of res_to.  Requires an exact bijection of circles (every
    mapped segment set must equal its target circle).  Returns the list
    perm with perm[ci_from] = ci_to."""
    if res_from.n_circles != res_to.n_circles:
        raise ShapeMismatch("circle counts differ: %d vs %d"
                            % (res_from.n_circles, res_to.n_circles))
    perm = []
    for circ in res_from.circles:
        mapped = sorted(key_map(s) for s in circ)
        ci_to = res_to.circle_index[mapped[0]]
        if tuple(mapped) != res_to.circles[ci_to]:
            raise ShapeMismatch("segment map does not carry circles to "
                                "circles")
        perm.append(ci_to)
    assert sorted(perm) == list(range(res_to.n_circles))
    return perm
