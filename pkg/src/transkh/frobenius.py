"""Label algebras for the three circle theories.

### CONVENTIONS
# Each circle carries a label bit: 1 = the degree +1 generator ("plus"),
# 0 = the degree -1 generator ("minus").  Three theories share the
# structure maps on mixed labels and differ on the extremes:
#
#   theory "kh":  undeformed; merge(minus,minus) = 0,
#                 split(plus) = plus@minus + minus@plus.
#   theory "def": the filtered deformation used for the transverse
#                 invariants; merge(minus,minus) = minus,
#                 split(plus) = plus@minus + minus@plus - plus@plus.
#                 Deformation terms raise quantum degree by exactly 2.
#   theory "lee": the convergent deformation used for the slice-style
#                 invariant; merge(minus,minus) = plus,
#                 split(minus) = minus@minus + plus@plus (degree +4).
#
# All three give a differential that never decreases quantum grading;
# only "kh" preserves it.
"""

THEORIES = ("kh", "def", "lee")

# merge: (bit_a, bit_b) -> ((bit_out, coeff), ...)
MERGE = {
    "kh": {
        (1, 1): ((1, 1),),
        (1, 0): ((0, 1),),
        (0, 1): ((0, 1),),
        (0, 0): (),
    },
    "def": {
        (1, 1): ((1, 1),),
        (1, 0): ((0, 1),),
        (0, 1): ((0, 1),),
        (0, 0): ((0, 1),),
    },
    "lee": {
        (1, 1): ((1, 1),),
        (1, 0): ((0, 1),),
        (0, 1): ((0, 1),),
        (0, 0): ((1, 1),),
    },
}

# split: bit_in -> (((bit_1, bit_2), coeff), ...)
SPLIT = {
    "kh": {
        1: (((1, 0), 1), ((0, 1), 1)),
        0: (((0, 0), 1),),
    },
    "def": {
        1: (((1, 0), 1), ((0, 1), 1), ((1, 1), -1)),
        0: (((0, 0), 1),),
    },
    "lee": {
        1: (((1, 0), 1), ((0, 1), 1)),
        0: (((0, 0), 1), ((1, 1), 1)),
    },
}


def label_degree(bit):
    return 1 if bit else -1
