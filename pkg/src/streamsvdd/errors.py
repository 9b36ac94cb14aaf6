"""Exception hierarchy shared by the learner, the store and the CLI."""


class SvddError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SvddError, ValueError):
    """Bad user input: dimension mismatch, non-finite values, bad parameters."""


class IllConditionedError(SvddError):
    """A rank-one update would produce a numerically degenerate inverse."""


class InvariantViolation(SvddError):
    """Model state is internally inconsistent (corrupted or drifted)."""


class OracleFailure(SvddError):
    """The enumeration oracle found no (or several distinct) KKT subsets."""


class ModelFormatError(SvddError):
    """Malformed model file."""


class CorruptModelError(SvddError):
    """A model file parsed but its contents fail integrity checks."""


class UnsupportedVersionError(SvddError):
    """Model file written by an unknown format version."""
