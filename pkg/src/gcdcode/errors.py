"""Exception hierarchy shared by every gcdcode module."""


class GCDError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationTooLarge(GCDError):
    """An exhaustive enumeration would exceed the configured item cap."""


class InvalidNetwork(GCDError, ValueError):
    pass


class TypeMismatch(GCDError, ValueError):
    """Side information does not have the marginal type implied by the codeword."""


class NoMatchingVertex(GCDError):
    """No shell member carries the received color (corrupted codeword or wrong side info)."""


class MalformedBits(GCDError, ValueError):
    pass


class WrongDecoderCount(GCDError, ValueError):
    """Bipartite coloring was requested for a network without exactly two decoders."""


class FormatError(GCDError):
    """A codebook, message, or codeword file could not be parsed."""


class VersionMismatch(FormatError):
    pass


class ConfigError(GCDError):
    """A run configuration is invalid; ``line`` and ``field`` locate the problem."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
