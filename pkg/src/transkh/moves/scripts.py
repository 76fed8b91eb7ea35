"""Move scripts: parsing, word-level replay, and record pipelines.

### CONVENTIONS
# A script is a sequence of moves applied left to right.  Text form is
# line-oriented, one move per line, '#' comments:
#   shift OFF            move the first OFF letters to the end
#   insert_rii POS IDX ORI   insert (ORI*IDX, -ORI*IDX) at POS
#   delete_rii POS
#   braid_relation POS DIR   DIR 0: distant swap; nonzero: triple slide
#   stab_pos POS / stab_neg POS      insert the new top letter at POS
#   destab_pos POS / destab_neg POS  remove the top letter at POS
#
# apply_script replays at the word level only; script_records builds
# the chain-level record for every step and composes them.
"""

import time
from dataclasses import dataclass

from ..braid import BraidWord
from ..complexes import build_complex
from ..errors import (IndexOutOfRange, InvalidDestabilization,
                      PatternMismatch)
from .elementary import (conjugate_shift, far_transposition,
                         stabilize_record, destabilize_record,
                         insert_rii_record, delete_rii_record)
from .r3 import triple_slide_record, slide_pattern


@dataclass(frozen=True)
class Move:
    kind: str
    args: tuple

    def as_tuple(self):
        return (self.kind,) + self.args

    def __repr__(self):
        return "Move(%s)" % " ".join([self.kind] + [str(a) for a in
                                                    self.args])


_ARITY = {"shift": 1, "insert_rii": 3, "delete_rii": 1,
          "braid_relation": 2, "stab_pos": 1, "stab_neg": 1,
          "destab_pos": 1, "destab_neg": 1}


def move(kind, *args):
    assert kind in _ARITY, "unknown move kind %r" % kind
    assert len(args) == _ARITY[kind], \
        "%s takes %d arguments" % (kind, _ARITY[kind])
    return Move(kind, tuple(int(a) for a in args))


def parse_script(text):
    moves = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            moves.append(move(parts[0], *parts[1:]))
        except AssertionError as exc:
            raise PatternMismatch("script line %d: %s" % (lineno, exc))
    return moves


def format_script(moves):
    return "\n".join(" ".join([mv.kind] + [str(a) for a in mv.args])
                     for mv in moves) + ("\n" if moves else "")


def apply_move(word, mv):
    """Word-level replay of one move."""
    letters, m = list(word.letters), word.strands
    kind, args = mv.kind, mv.args
    if kind == "shift":
        return word.conjugate(args[0] % max(len(letters), 1))
    if kind == "insert_rii":
        pos, idx, ori = args
        if not 1 <= idx <= m - 1:
            raise IndexOutOfRange("index %d out of range" % idx)
        assert ori in (1, -1)
        letters[pos:pos] = [ori * idx, -ori * idx]
        return BraidWord(m, tuple(letters))
    if kind == "delete_rii":
        pos = args[0]
        if letters[pos] != -letters[pos + 1]:
            raise PatternMismatch("no inverse pair at %d" % pos)
        del letters[pos:pos + 2]
        return BraidWord(m, tuple(letters))
    if kind == "braid_relation":
        pos, direction = args
        if direction == 0:
            a, b = letters[pos], letters[pos + 1]
            if abs(abs(a) - abs(b)) < 2:
                raise PatternMismatch("letters at %d interact" % pos)
            letters[pos], letters[pos + 1] = b, a
            return BraidWord(m, tuple(letters))
        slide_pattern(tuple(letters), pos)
        x, y, z = letters[pos:pos + 3]
        letters[pos:pos + 3] = [(1 if z > 0 else -1) * abs(y),
                                (1 if y > 0 else -1) * abs(x),
                                (1 if x > 0 else -1) * abs(y)]
        return BraidWord(m, tuple(letters))
    if kind in ("stab_pos", "stab_neg"):
        pos = args[0]
        s = 1 if kind == "stab_pos" else -1
        letters[pos:pos] = [s * m]
        return BraidWord(m + 1, tuple(letters))
    if kind in ("destab_pos", "destab_neg"):
        pos = args[0]
        top = m - 1
        if abs(letters[pos]) != top or \
                sum(1 for t in letters if abs(t) == top) != 1:
            raise InvalidDestabilization("letter %d is not a lone top "
                                         "letter" % pos)
        if (letters[pos] > 0) != (kind == "destab_pos"):
            raise InvalidDestabilization("sign mismatch at %d" % pos)
        del letters[pos]
        return BraidWord(m - 1, tuple(letters))
    raise AssertionError("unknown move kind %r" % kind)


def apply_script(word, moves):
    for mv in moves:
        word = apply_move(word, mv)
    return word


def move_record(word, cx, mv):
    """(new word, record C(word) -> C(new word)) for one move."""
    kind, args = mv.kind, mv.args
    if kind == "shift":
        return conjugate_shift(word, cx, args[0])
    if kind == "insert_rii":
        return insert_rii_record(word, cx, args[0], args[1], args[2])
    if kind == "delete_rii":
        return delete_rii_record(word, cx, args[0])
    if kind == "braid_relation":
        if args[1] == 0:
            return far_transposition(word, cx, args[0])
        return triple_slide_record(word, cx, args[0])
    if kind == "stab_pos":
        return stabilize_record(word, cx, args[0], +1)
    if kind == "stab_neg":
        return stabilize_record(word, cx, args[0], -1)
    if kind in ("destab_pos", "destab_neg"):
        pos = args[0]
        want = 1 if kind == "destab_pos" else -1
        if (word.letters[pos] > 0) != (want > 0):
            raise InvalidDestabilization("sign mismatch at %d" % pos)
        return destabilize_record(word, cx, pos)
    raise AssertionError("unknown move kind %r" % kind)


def script_records(word, moves, theory="def", cx=None, per_step=None):
    """(final word, composite record, trace).  trace entries are dicts
    with the move, the words, the complex sizes and the build time."""
    if cx is None:
        cx = build_complex(word, theory, check=False)
    rec = None
    trace = []
    for mv in moves:
        t0 = time.time()
        new_word, step = move_record(word, cx, mv)
        trace.append({
            "move": " ".join([mv.kind] + [str(a) for a in mv.args]),
            "from": word.letters, "to": new_word.letters,
            "size_from": step.source.n, "size_to": step.target.n,
            "seconds": round(time.time() - t0, 3),
        })
        if per_step is not None:
            per_step(step, trace[-1])
        rec = step if rec is None else rec.then(step)
        word, cx = new_word, step.target
    if rec is None:
        from .records import ChainMapRecord
        rec = ChainMapRecord.identity(cx)
    return word, rec, trace


# ------------------------------------------------------------------
# the flype script

def flype_script(a_len, b_len, k, m):
    """Script carrying A s_m^k B s_m^{-1} to A s_m^{-1} B s_m^k on m+1
    strands: one distant-pair insertion, one negative stabilization, a
    ladder of triple slides and distant swaps around the braid closure,
    then the inverse bookkeeping.  Exactly one negative stabilization
    and one negative destabilization; everything else is planar."""
    a, b = a_len, b_len
    kk = abs(k)
    big = kk + 1
    out = [move("insert_rii", a, m, -1), move("stab_neg", a + 1)]
    for t in range(big):
        out.append(move("braid_relation", a + t, 1))
    # move the K letters on the new top index to the front
    for b_idx in range(big):
        for j in range(a + b_idx - 1, b_idx - 1, -1):
            out.append(move("braid_relation", j, 0))
    out.append(move("shift", big))
    # push the lone negative top letter through B
    for j in range(a + 1, a + 1 + b):
        out.append(move("braid_relation", j, 0))
    for t in range(big):
        out.append(move("braid_relation", a + 1 + b + t, 1))
    out.append(move("destab_neg", a + b + kk + 2))
    out.append(move("delete_rii", a + 1 + b + (kk if k >= 0 else 0)))
    return out


def random_script(rng, word, length, max_letters=9, max_strands=5,
                  kinds=None):
    """A random legal script of closure-preserving moves for test
    suites.  Shrinking moves get the largest weight so sizes stay
    bounded; negative (de)stabilizations are never generated."""
    moves = []
    for _ in range(length):
        letters, m, n = word.letters, word.strands, len(word.letters)
        cands = []
        if n >= 2:
            cands.append((2, move("shift", rng.randint(1, n - 1))))
        if n + 2 <= max_letters and m >= 2:
            cands.append((1, move("insert_rii", rng.randint(0, n),
                                  rng.randint(1, m - 1),
                                  rng.choice([1, -1]))))
        for pos in range(n - 1):
            if letters[pos] == -letters[pos + 1]:
                cands.append((3, move("delete_rii", pos)))
            if abs(abs(letters[pos]) - abs(letters[pos + 1])) >= 2:
                cands.append((2, move("braid_relation", pos, 0)))
        for pos in range(n - 2):
            try:
                d = slide_pattern(letters, pos)[4]
            except PatternMismatch:
                continue
            cands.append((2, move("braid_relation", pos, d)))
        if m + 1 <= max_strands and n + 1 <= max_letters:
            cands.append((1, move("stab_pos", rng.randint(0, n))))
        tops = [pos for pos, t in enumerate(letters) if abs(t) == m - 1]
        if m >= 2 and len(tops) == 1 and letters[tops[0]] == m - 1:
            cands.append((3, move("destab_pos", tops[0])))
        if kinds is not None:
            cands = [(w, mv) for w, mv in cands if mv.kind in kinds]
        if not cands:
            break
        mv = rng.choices([mv for _, mv in cands],
                         weights=[w for w, _ in cands])[0]
        moves.append(mv)
        word = apply_move(word, mv)
    return moves
