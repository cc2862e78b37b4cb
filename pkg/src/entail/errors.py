"""Exception types shared across the package."""

from __future__ import annotations


class ContractError(ValueError):
    """A value violates a documented precondition or invariant."""


class TreeValidationError(ValueError):
    """A proof tree is structurally inconsistent.

    Carries the path of the offending node as a list of child indices from
    the root, rendered like ``root/1/0`` in the message.
    """

    def __init__(self, path: list[int], message: str):
        self.path = list(path)
        location = "/".join(["root"] + [str(i) for i in self.path])
        super().__init__(f"{location}: {message}")


class BackendError(RuntimeError):
    """A model backend call failed."""


class BackendUnavailableError(BackendError):
    """The backend stayed unreachable after all retry attempts."""


class OpenEndedUnsupportedError(BackendError):
    """The backend cannot produce candidate answers for an open-ended question."""


class DeclarativizationError(ValueError):
    """Hypothesis construction failed for a question (e.g. two options collide)."""


class DatasetError(ValueError):
    """A dataset file is malformed or a record violates the schema."""


class QuestionError(RuntimeError):
    """A single question could not be answered at all."""
