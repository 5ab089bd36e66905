"""Exception types shared by the library and mapped to CLI exit codes."""


class QuinaryError(Exception):
    exit_code = 1


class InvalidInput(QuinaryError, ValueError):
    exit_code = 2


class NoGenus(QuinaryError):
    """The local invariants requested violate the global product formula."""

    exit_code = 3


class NotFound(QuinaryError):
    """A bounded search was exhausted; retry with a larger bound."""

    exit_code = 2


class Inconsistency(QuinaryError, RuntimeError):
    """An invariant that must hold mathematically failed during a computation."""

    exit_code = 4


class Unsupported(QuinaryError):
    exit_code = 2
