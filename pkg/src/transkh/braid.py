"""Braid words and their closures.

### CONVENTIONS
# A letter is a nonzero int: t encodes generator |t| with sign(t), acting on
# strand positions |t| and |t|+1 (1-based).  Positive letter = the strand in
# the lower-numbered position crosses over.
# Strand positions run 1..m left to right.  The closure wraps around the
# right-hand side, so position 1's circle is the outermost one in any
# oriented resolution.
# Self-linking number of the closure: sl = writhe - strands.
"""

from dataclasses import dataclass

from .errors import (IndexOutOfRange, InvalidDestabilization, LengthMismatch,
                     MultiComponent)


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple

    def __post_init__(self):
        if self.strands < 1:
            raise IndexOutOfRange("need at least one strand")
        object.__setattr__(self, "letters", tuple(int(t) for t in self.letters))
        for t in self.letters:
            if t == 0 or abs(t) > self.strands - 1:
                raise IndexOutOfRange(
                    "letter %r out of range for %d strands" % (t, self.strands))

    def __repr__(self):
        return "BraidWord(%d; %s)" % (self.strands, format_word(self))

    def __len__(self):
        return len(self.letters)

    # --- counting

    @property
    def writhe(self):
        return sum(1 if t > 0 else -1 for t in self.letters)

    @property
    def n_plus(self):
        return sum(1 for t in self.letters if t > 0)

    @property
    def n_minus(self):
        return sum(1 for t in self.letters if t < 0)

    @property
    def self_linking(self):
        return self.writhe - self.strands

    # --- closure combinatorics

    def permutation(self):
        """perm[p] = final position of the strand entering at position p
        (0-based)."""
        pos = list(range(self.strands))    # pos[p] = strand currently at p
        for t in self.letters:
            i = abs(t) - 1
            pos[i], pos[i + 1] = pos[i + 1], pos[i]
        perm = [0] * self.strands
        for p, s in enumerate(pos):
            perm[s] = p
        return tuple(perm)

    def components(self):
        """Cycles of the closure permutation, as sorted tuples of 0-based
        starting positions, ordered by smallest element."""
        perm = self.permutation()
        seen = [False] * self.strands
        out = []
        for p in range(self.strands):
            if seen[p]:
                continue
            cyc = []
            q = p
            while not seen[q]:
                seen[q] = True
                cyc.append(q)
                q = perm[q]
            out.append(tuple(sorted(cyc)))
        return out

    def is_knot(self):
        return len(self.components()) == 1

    def component_data(self):
        """Per-component writhe/strand/self-linking plus pairwise linking
        numbers.  Walking the word with an occupancy vector: a crossing
        between positions occupied by the same component counts toward that
        component's own writhe, otherwise toward the pair's linking number.
        Satisfies sl(total) = sum sl_i + 2 * sum_{i<j} lk_ij.
        """
        comps = self.components()
        comp_of = {}
        for ci, cyc in enumerate(comps):
            for p in cyc:
                comp_of[p] = ci
        occ = [comp_of[p] for p in range(self.strands)]
        own = [0] * len(comps)
        cross = {}
        for t in self.letters:
            i = abs(t) - 1
            s = 1 if t > 0 else -1
            a, b = occ[i], occ[i + 1]
            if a == b:
                own[a] += s
            else:
                key = (min(a, b), max(a, b))
                cross[key] = cross.get(key, 0) + s
            occ[i], occ[i + 1] = occ[i + 1], occ[i]
        lk = {}
        for key, tot in cross.items():
            assert tot % 2 == 0, "pairwise crossing count must be even"
            lk[key] = tot // 2
        data = []
        for ci, cyc in enumerate(comps):
            data.append({
                "positions": cyc,
                "strands": len(cyc),
                "writhe": own[ci],
                "self_linking": own[ci] - len(cyc),
            })
        return data, lk

    # --- moves at the word level

    def conjugate(self, offset):
        """Cyclic rotation: move the first `offset` letters to the end."""
        n = len(self.letters)
        if n == 0:
            return self
        offset %= n
        return BraidWord(self.strands,
                         self.letters[offset:] + self.letters[:offset])

    def stabilize(self, sign):
        """Append sigma_m^{sign} on a fresh strand (m = current count)."""
        assert sign in (1, -1)
        return BraidWord(self.strands + 1, self.letters + (sign * self.strands,))

    def destabilize(self):
        """Inverse of stabilize.  Strict: the top-index letter must be the
        last letter and occur exactly once.  Returns (word, sign)."""
        if self.strands < 2 or not self.letters:
            raise InvalidDestabilization("nothing to destabilize")
        top = self.strands - 1
        if abs(self.letters[-1]) != top:
            raise InvalidDestabilization("last letter does not use the top strand")
        if sum(1 for t in self.letters if abs(t) == top) != 1:
            raise InvalidDestabilization("top strand is used more than once")
        sign = 1 if self.letters[-1] > 0 else -1
        return BraidWord(self.strands - 1, self.letters[:-1]), sign

    def mirror(self):
        """Mirror image of the closure: negate every crossing."""
        return BraidWord(self.strands, tuple(-t for t in self.letters))


# --- text form ("1,1,-2")

def parse_word(text, strands=None):
    text = text.strip()
    if text in ("", "-"):
        letters = ()
    else:
        try:
            letters = tuple(int(p) for p in text.replace(" ", "").split(","))
        except ValueError:
            raise LengthMismatch("cannot parse braid word %r" % text)
    if any(t == 0 for t in letters):
        raise IndexOutOfRange("letter 0 is not a generator")
    need = max((abs(t) for t in letters), default=0) + 1
    if strands is None:
        strands = max(need, 1)
    return BraidWord(strands, letters)


def format_word(word):
    return ",".join(str(t) for t in word.letters) if word.letters else "-"


# --- flype families

def flype_pair(A, B, k, m):
    """The two closures related by a negative flype on strand block m:
    A sigma_m^k B sigma_m^{-1}  and  A sigma_m^{-1} B sigma_m^k,
    both on m+1 strands.  A and B may only use sigma_1..sigma_{m-1}."""
    A = tuple(int(t) for t in A)
    B = tuple(int(t) for t in B)
    for t in A + B:
        if t == 0 or abs(t) >= m:
            raise IndexOutOfRange(
                "flype prefix/infix letter %r must use sigma_1..sigma_%d" % (t, m - 1))
    block = (m if k >= 0 else -m,) * abs(k)
    w1 = BraidWord(m + 1, A + block + B + (-m,))
    w2 = BraidWord(m + 1, A + (-m,) + B + block)
    return w1, w2


def random_word(rng, max_letters, max_strands, min_letters=0):
    """Deterministic random closure for the suites (rng: random.Random)."""
    m = rng.randint(2, max(2, max_strands))
    n = rng.randint(min_letters, max_letters)
    letters = []
    for _ in range(n):
        i = rng.randint(1, m - 1)
        letters.append(i if rng.random() < 0.5 else -i)
    return BraidWord(m, tuple(letters))


def require_single_component(word):
    if not word.is_knot():
        raise MultiComponent("closure has %d components" % len(word.components()))
