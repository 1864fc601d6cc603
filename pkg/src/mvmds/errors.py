"""Error types shared across the package.

Structural problems (wrong shapes, malformed values) raise plain
``ValueError``; the classes below cover the cases callers are expected to
handle specially: enumeration guards, optimizer divergence, and file
parsing.
"""


class CapacityError(RuntimeError):
    """An exhaustive enumeration would exceed the configured size guard."""


class DivergenceError(RuntimeError):
    """An iterative optimization produced a non-finite objective.

    The stress trace up to the failing step is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class ParseError(ValueError):
    """A text input could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
