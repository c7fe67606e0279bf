"""Exception hierarchy shared across the package."""


class CatdimError(Exception):
    """Base class for all package errors."""


class InputError(CatdimError):
    """Bad user input: malformed data, dimension mismatch, unsupported ring."""


class SoundnessError(CatdimError):
    """An internally produced certificate failed its own recheck.

    This never indicates user error; it means a solver or construction bug.
    """
