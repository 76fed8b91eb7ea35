"""Error vocabulary.  Every raisable condition gets its own class so tests
and the CLI can react precisely.  `exit_code` follows the CLI contract:
1 = verification failure, 2 = bad input, 3 = resource cap."""


class TranskhError(Exception):
    exit_code = 2


# --- input problems (exit 2)

class IndexOutOfRange(TranskhError):
    pass


class InvalidDestabilization(TranskhError):
    pass


class MalformedGrid(TranskhError):
    pass


class MultiComponent(TranskhError):
    pass


class PatternMismatch(TranskhError):
    pass


class ShapeMismatch(TranskhError):
    pass


class LengthMismatch(TranskhError):
    pass


class WindowInvalid(TranskhError):
    pass


class NotACycle(TranskhError):
    pass


class FiltrationViolation(TranskhError):
    pass


class NotCancellable(TranskhError):
    pass


# --- verification failures (exit 1)

class VerificationFailed(TranskhError):
    exit_code = 1


class SupportViolation(TranskhError):
    exit_code = 1


class ReductionStuck(TranskhError):
    exit_code = 1


# --- resource caps (exit 3)

class TooLarge(TranskhError):
    exit_code = 3
