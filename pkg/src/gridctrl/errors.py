"""Exception hierarchy shared by every gridctrl module."""

from __future__ import annotations


class GridCtrlError(Exception):
    """Base class for all domain errors raised by gridctrl."""


class DimensionError(GridCtrlError, ValueError):
    """Graph or matrix dimensions outside the supported range."""


class ShapeError(DimensionError):
    """Matrix operand has the wrong shape (non-square, mismatched)."""


class NodeIndexError(GridCtrlError, IndexError):
    """Node coordinate or linear index out of range."""


class ContractError(GridCtrlError, ValueError):
    """An argument violates an operation's precondition."""


class UsageError(GridCtrlError, ValueError):
    """Operation called on a topology it does not handle."""


class OutOfScopeError(UsageError):
    """Requested result is not covered (e.g. minimality on a single path)."""


class ConsistencyError(GridCtrlError, RuntimeError):
    """Two independent computations of the same quantity disagree."""


class InfeasiblePlanError(GridCtrlError, RuntimeError):
    """Steering problem has a numerically singular Gramian."""

    def __init__(self, message: str, direction=None, condition: float | None = None):
        super().__init__(message)
        self.direction = direction
        self.condition = condition
