"""Exception types raised by the library."""


class LinkHideError(Exception):
    """Base class for all library errors."""


class GraphError(LinkHideError, ValueError):
    """Invalid node id, self-loop or malformed graph input."""


class DisconnectedGraphError(GraphError):
    """Operation requires a connected graph."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno, line, reason):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class GenerationError(LinkHideError, RuntimeError):
    """Random graph generation did not converge."""


class MetricError(LinkHideError, ValueError):
    """Unknown metric or metric undefined for the given input."""


class BudgetError(LinkHideError, ValueError):
    """Budget is negative, too large for a bound, or violates an assumption."""


class OracleTooLargeError(LinkHideError, ValueError):
    """Brute-force enumeration would exceed its guard."""


class ConfigError(LinkHideError, ValueError):
    """Bad experiment configuration (maps to CLI exit code 2)."""
