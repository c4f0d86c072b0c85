"""Exception hierarchy shared by the library and the CLI."""


class AlladiError(Exception):
    exit_code = 1


class ConfigError(AlladiError, ValueError):
    """Malformed or incomplete configuration (field file, set spec, flags)."""

    exit_code = 2


class ResourceError(AlladiError, MemoryError):
    """A requested range or table would exceed the memory budget."""

    exit_code = 3


class PrecisionError(AlladiError, ArithmeticError):
    """A guarded computation could not be decided at the working precision."""

    exit_code = 4


class CheckFailure(AlladiError):
    exit_code = 5


class ExcludedPrimeError(AlladiError, ValueError):
    """The prime is a bad-reduction (or ramified) prime excluded from the set."""

    exit_code = 2

    def __init__(self, p, reason="bad reduction"):
        super().__init__(f"prime {p} is excluded ({reason})")
        self.p = p


class DomainError(AlladiError, ValueError):
    exit_code = 2
