class CodeDesignError(Exception):
    """Base class for every error raised by the toolkit"""


class SpecValidationError(CodeDesignError, ValueError):
    """A domain object, plan or parameter violates its invariants"""


class FixtureError(SpecValidationError):
    """A bundled code fixture does not pass its own invariants"""


class UnknownFixture(SpecValidationError, KeyError):
    """Lookup of a registry name that does not exist"""

    def __str__(self):
        return str(self.args[0]) if self.args else 'unknown fixture'


class ResourceCapExceeded(CodeDesignError):
    """A configured work or size cap was hit"""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit
