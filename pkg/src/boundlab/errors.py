"""Exception hierarchy shared by all modules.

The CLI maps ``InputError`` to exit code 2 and ``ValidationError`` to exit
code 3.
"""


class BoundlabError(Exception):
    pass


class InputError(BoundlabError, ValueError):
    """Malformed or out-of-range input."""


class ValidationError(BoundlabError):
    """A numerical invariant failed (not Hermitian, not a witness, ...)."""
