"""Exception types shared across the package."""

from __future__ import annotations


class DegenerateFormError(ValueError):
    """An operation received the zero binary form."""


class RootSystemError(ValueError):
    """Illegal (family, rank) pair or unsupported embedding."""


class InadmissibleZetaError(ValueError):
    """Some root kills all three components of zeta."""

    def __init__(self, message: str, root: tuple[int, ...] | None = None) -> None:
        super().__init__(message)
        self.root = root


class InadmissiblePlaneError(ValueError):
    """A root kernel contains the whole plane L."""

    def __init__(self, message: str, root: tuple[int, ...] | None = None) -> None:
        super().__init__(message)
        self.root = root


class RankMismatchError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    """Exhaustive search refused or aborted by its configured ceiling."""


class TheoremViolation(AssertionError):
    """A bound proved in the source theory failed on computed data.

    This is an alarm about the engine (or the theory), never a user error.
    """

    def __init__(self, message: str, report: object = None) -> None:
        super().__init__(message)
        self.report = report
