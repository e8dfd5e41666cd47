"""Toolkit for detecting and exploiting bound entanglement in qudit systems."""

__version__ = "0.1.0"

from .errors import BoundlabError, InputError, ValidationError
from .linalg import DenseState, HermitianOperator
from .bell import BellBasis, SimplexState
from .criteria import Verdict, classify

__all__ = [
    "__version__", "BoundlabError", "InputError", "ValidationError",
    "DenseState", "HermitianOperator", "BellBasis", "SimplexState",
    "Verdict", "classify",
]
