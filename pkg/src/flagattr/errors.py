"""Exception hierarchy shared by all modules."""


class FlagAttrError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(FlagAttrError, ValueError):
    pass


class NoConvergence(FlagAttrError, RuntimeError):
    pass


class RankDeficient(FlagAttrError, ValueError):
    pass


class Overflow(FlagAttrError, OverflowError):
    pass


class NotAFixedPoint(FlagAttrError, ValueError):
    pass


class SizeMismatch(FlagAttrError, ValueError):
    pass


class InvalidSignature(FlagAttrError, ValueError):
    pass


class NotSpecialRoots(FlagAttrError, ValueError):
    """The diagonal is not strictly increasing, so some positive root is not negative on it."""


class NotSpecialWeights(FlagAttrError, ValueError):
    """Two weights of the induced representation take the same value."""


class IllConditioned(FlagAttrError, ArithmeticError):
    """A rank decision fell inside the ambiguity band around the threshold."""


class CycleDetected(FlagAttrError, ValueError):
    pass


class TooLarge(FlagAttrError, ValueError):
    pass


class Inconsistent(FlagAttrError, RuntimeError):
    """A point was assigned to zero or several parts of an attractor-repellor partition."""
