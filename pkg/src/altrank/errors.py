"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """An exhaustive operation would exceed its configured work budget."""


class ContractError(RuntimeError):
    """A runtime-verified mathematical contract failed on concrete data."""
