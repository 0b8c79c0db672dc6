"""Exception hierarchy shared by every matchforge module."""


class MatchforgeError(Exception):
    """Base class for all domain errors raised by matchforge."""


class InputError(MatchforgeError, ValueError):
    """Caller supplied data that violates an operation's precondition."""


class ConfigError(MatchforgeError, ValueError):
    """A cost model or configuration lacks a required entry or is out of range."""


class ConceptLookupError(MatchforgeError, KeyError):
    """A concept or profile id is not known to the queried structure."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ParseError(MatchforgeError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GenerationError(MatchforgeError):
    """Synthetic data generation cannot satisfy the requested counts."""


class OracleRefusal(MatchforgeError):
    """Brute-force oracle asked to enumerate an instance above its size bound."""
