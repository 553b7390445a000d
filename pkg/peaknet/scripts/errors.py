"""
Exceptions raised by peaknet.
"""

from typing import Iterable, Tuple


class PeaknetError(Exception):
    """Base class for all peaknet errors."""


class ScenesParseError(PeaknetError, ValueError):
    """A scenes, alias or node-list file could not be parsed."""

    def __init__(self, reason: str, line: int, source: str = "<string>"):
        self.reason = reason
        self.line = line
        self.source = source
        super().__init__(f"{source}:{line}: {reason}")


class ParameterError(PeaknetError, ValueError):
    """Invalid parameters for a generator or an analysis."""


class UnknownNodeError(PeaknetError, KeyError):
    """One or more character names are not in the graph."""

    def __init__(self, names: Iterable[str]):
        self.names: Tuple[str, ...] = tuple(names)
        super().__init__(f"Unknown characters: {', '.join(self.names)}")

    def __str__(self) -> str:
        # KeyError would otherwise repr() the message
        return str(self.args[0])
