"""Exception types shared across the package."""


class GlyphforgeError(Exception):
    """Base class for all glyphforge errors."""


class EmptyRasterError(GlyphforgeError):
    """The raster contains no ink pixel after binarization (blank submission)."""


class DimsMismatchError(GlyphforgeError):
    """Grid or matrix dimensions disagree where they must match."""


class InvalidLabelError(GlyphforgeError):
    """Label name violates the label rules (length, whitespace, control chars)."""


class UnknownLabelError(GlyphforgeError):
    """The requested label is not present in the knowledge base."""


class UndefinedQuotientError(GlyphforgeError):
    """Recognition quotient requested for a matrix whose positive-weight sum
    is zero; such a label cannot be scored."""


class ParseError(GlyphforgeError):
    """Malformed file content, with source name and position when known."""

    def __init__(self, message, source=None, line=None, column=None):
        self.source = source
        self.line = line
        self.column = column
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        if column is not None:
            where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class InvariantViolationError(GlyphforgeError):
    """Stored weight data breaks the range or parity laws. Distinguishes a
    corrupted or hand-edited knowledge base from a merely unparseable one."""
