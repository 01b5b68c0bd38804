class PlyforgeError(Exception):
    """Base class for every error raised by plyforge."""


class ValidationError(PlyforgeError):
    """Invalid parameters, malformed structures or degree violations."""


class GridBudgetError(ValidationError):
    """Sampled grid would exceed the configured cell budget."""


class PrecisionError(PlyforgeError):
    """A construction would leave the useful range of doubles."""


class InputError(PlyforgeError):
    """A file could not be read or written."""
