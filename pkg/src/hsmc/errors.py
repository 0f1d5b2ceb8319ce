"""Exception and warning types shared across the package."""


class HsmcError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(HsmcError):
    """Invalid model text or an ill-formed structure definition."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FormulaError(HsmcError):
    """Invalid formula text."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(f"at offset {pos}: {message}" if pos is not None else message)


class FragmentError(HsmcError):
    """Formula falls outside the fragment an engine supports."""


class MissingEdgeError(HsmcError):
    """Track construction or concatenation across a missing edge."""


class ResourceLimitError(HsmcError):
    """A configured size or depth guard refused the computation."""


class BoundWarning(UserWarning):
    """Oracle depth bound is below the exactness threshold for the input."""
