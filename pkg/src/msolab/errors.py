"""Shared exception types."""


class MsolabError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(MsolabError):
    """An input exceeds a documented brute-force ceiling.

    Raised instead of silently returning a possibly wrong answer.
    """
