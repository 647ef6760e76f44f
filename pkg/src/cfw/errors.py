class CfwError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(CfwError, ValueError):
    """An input violates an operation's precondition or a witness is malformed."""


class NotFoundError(CfwError, LookupError):
    """A search that is required to succeed found nothing."""


class IndeterminateError(CfwError, ArithmeticError):
    """An enclosure is too wide to decide an inequality; deepen and retry."""


class ArithmeticCapError(CfwError, OverflowError):
    """An integer grew past the configured ``CFW_MAX_BIGINT_BITS`` cap."""
