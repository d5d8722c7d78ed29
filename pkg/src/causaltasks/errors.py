"""Exception hierarchy shared by every module."""

from __future__ import annotations


class InputError(ValueError):
    """A caller handed us something the model rejects."""


class DimensionMismatchError(InputError):
    pass


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed its configured cap.

    ``required`` carries the count that would have been needed.
    """

    def __init__(self, message: str, required: int):
        super().__init__(f"{message} (required: {required})")
        self.required = required


class PlanIncompleteError(RuntimeError):
    def __init__(self, state):
        super().__init__(f"plan undefined on reached state {state!r}")
        self.state = state
