"""Exception types shared across the toolkit."""


class LsysError(Exception):
    """Base class for all toolkit errors."""


class ParseError(LsysError):
    """A word string could not be parsed; carries the offending index."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at index {position})")
        self.position = position


class IllegalCharacter(ParseError):
    pass


class UnbalancedBrackets(ParseError):
    pass


class DanglingRotation(ParseError):
    """A + or - not immediately followed by F (fused scheme only)."""


class DegenerateBoundingBox(LsysError):
    """All segment endpoints coincide; nothing to fit."""


class OutOfCanvas(LsysError):
    """A segment endpoint lies outside the raster canvas."""


class MissingLogProbs(LsysError):
    """Teacher-forced log-probabilities required but absent."""
