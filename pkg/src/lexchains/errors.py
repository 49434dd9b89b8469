class LexChainsError(Exception):
    """Base class for errors raised by this package."""


class FormatError(LexChainsError, ValueError):
    """A file violates its expected format.

    ``source`` names the file and ``location`` is a line number or byte
    offset, whichever the format uses.
    """

    def __init__(self, message, source=None, location=None):
        self.source = source
        self.location = location
        where = ""
        if source is not None:
            where = str(source)
            if location is not None:
                where += f":{location}"
            where += ": "
        super().__init__(where + message)


class LookupFailure(LexChainsError, KeyError):
    """An identifier is not present in a database or model."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
