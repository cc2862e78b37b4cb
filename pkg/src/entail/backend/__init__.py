"""Model backends: the angle request/response contract and its implementations.

A backend is one model queried from several angles (premise generation,
direct scoring, entailment scoring, declarativization, candidate answers).
The deterministic mock runs against a knowledge-base file and is the test
oracle; the remote client speaks the same wire format over HTTP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Protocol, runtime_checkable

from entail.core import Context, QAPair, Statement
from entail.errors import ContractError

Angle = Literal["premises", "direct", "entailment", "hypothesize", "candidates"]

_ANGLES: frozenset[str] = frozenset(("premises", "direct", "entailment", "hypothesize", "candidates"))
_HYPOTHESIS_ANGLES = frozenset(("premises", "direct", "entailment"))
_QA_ANGLES = frozenset(("hypothesize", "candidates"))


@dataclass(frozen=True)
class DecodingParams:
    """Sampling parameters forwarded to the model."""

    temperature: float = 2.0
    top_p: float = 0.95
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.temperature > 0:
            raise ContractError(f"temperature must be > 0, got {self.temperature!r}")
        if not 0 < self.top_p <= 1:
            raise ContractError(f"top_p must be in (0, 1], got {self.top_p!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ContractError(f"seed must be an unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class AngleRequest:
    """One model call, fully specified.

    Field requirements depend on the angle: ``premises``/``direct``/
    ``entailment`` need a hypothesis, ``entailment`` additionally needs the
    premise list, and ``hypothesize``/``candidates`` need the QA pair.
    """

    angle: Angle
    hypothesis: Statement | None = None
    premises: tuple[Statement, ...] | None = None
    qa: QAPair | None = None
    context: Context | None = None
    n_samples: int = 1
    decoding: DecodingParams = DecodingParams()

    def __post_init__(self) -> None:
        if self.angle not in _ANGLES:
            raise ContractError(f"unknown angle {self.angle!r}")
        if self.premises is not None:
            object.__setattr__(self, "premises", tuple(self.premises))
        if self.angle in _HYPOTHESIS_ANGLES and self.hypothesis is None:
            raise ContractError(f"angle {self.angle!r} requires a hypothesis")
        if self.angle == "entailment" and not self.premises:
            raise ContractError("angle 'entailment' requires premises")
        if self.angle != "entailment" and self.premises is not None:
            raise ContractError(f"angle {self.angle!r} does not take premises")
        if self.angle in _QA_ANGLES and self.qa is None:
            raise ContractError(f"angle {self.angle!r} requires a qa pair")
        if not isinstance(self.n_samples, int) or self.n_samples < 1:
            raise ContractError(f"n_samples must be an integer >= 1, got {self.n_samples!r}")


@runtime_checkable
class Backend(Protocol):
    """What the search and pipeline require of a model."""

    def generate_premises(
        self,
        hypothesis: Statement,
        qa: QAPair | None,
        context: Context | None,
        k: int,
        decoding: DecodingParams,
    ) -> list[tuple[Statement, ...]]:
        """Up to k candidate premise sets for the hypothesis, deduplicated."""
        ...

    def score_direct(
        self, statement: Statement, qa: QAPair | None, context: Context | None
    ) -> float:
        ...

    def score_entailment(
        self,
        premises: tuple[Statement, ...],
        conclusion: Statement,
        qa: QAPair | None,
        context: Context | None,
    ) -> float:
        ...

    def hypothesize(self, qa: QAPair) -> Statement:
        ...

    def generate_candidates(self, question: str, n: int, decoding: DecodingParams) -> list[str]:
        ...

    def negate(self, statement: Statement) -> Statement:
        ...


from entail.backend.mock import KnowledgeBase, MockBackend, Rule, load_kb  # noqa: E402
from entail.backend.remote import RemoteBackend  # noqa: E402

__all__ = [
    "Angle",
    "AngleRequest",
    "Backend",
    "DecodingParams",
    "KnowledgeBase",
    "MockBackend",
    "RemoteBackend",
    "Rule",
    "load_kb",
]
