"""Exact continued-fraction and combinatorics-on-words toolkit.

Generates partial-quotient sequences, searches their prefixes for repetitive
and mirror-symmetric structure, and certifies the continued-fraction
inequalities attached to that structure with exact rational arithmetic.
"""

from cfw.errors import (
    ArithmeticCapError,
    CfwError,
    ContractError,
    IndeterminateError,
    NotFoundError,
)
from cfw.words import FiniteWord

__version__ = "0.1.0"

__all__ = [
    "ArithmeticCapError",
    "CfwError",
    "ContractError",
    "FiniteWord",
    "IndeterminateError",
    "NotFoundError",
    "__version__",
]
