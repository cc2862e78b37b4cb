"""Backward-chaining entailment proof search over a pluggable model backend.

The package answers questions by turning each answer option into a
declarative hypothesis, searching for a multi-step entailment tree that
supports it, verifying every step, and scoring options by the strength of
their best proof.  Stored belief corrections feed back into search as
high-confidence context, so a taught fact changes later answers.
"""

from entail.backend import (
    Angle,
    AngleRequest,
    Backend,
    DecodingParams,
    KnowledgeBase,
    MockBackend,
    RemoteBackend,
    Rule,
    load_kb,
)
from entail.core import (
    Context,
    EntailmentStep,
    ProofNode,
    QAPair,
    SearchConfig,
    Statement,
    direct_confidence,
    node_overall,
    one_step_score,
    rescore_tree,
)
from entail.errors import (
    BackendError,
    BackendUnavailableError,
    ContractError,
    DatasetError,
    DeclarativizationError,
    OpenEndedUnsupportedError,
    QuestionError,
    TreeValidationError,
)
from entail.memory import BeliefOverride, MemoryStore, context_for_question
from entail.nl import declarativize, negate_text
from entail.pipeline import (
    AnswerResult,
    EvalMetrics,
    OptionOutcome,
    QuestionRecord,
    answer,
    evaluate,
    load_dataset,
)
from entail.proofio import ProofRecord, ProofStore, proof_from_dict, proof_to_dict
from entail.search import ScoredCandidate, generate_step, prove

__version__ = "0.1.0"

__all__ = [
    "Angle",
    "AngleRequest",
    "AnswerResult",
    "Backend",
    "BackendError",
    "BackendUnavailableError",
    "BeliefOverride",
    "ContractError",
    "Context",
    "DatasetError",
    "DecodingParams",
    "DeclarativizationError",
    "EntailmentStep",
    "EvalMetrics",
    "KnowledgeBase",
    "MemoryStore",
    "MockBackend",
    "OpenEndedUnsupportedError",
    "OptionOutcome",
    "ProofNode",
    "ProofRecord",
    "ProofStore",
    "QAPair",
    "QuestionError",
    "QuestionRecord",
    "RemoteBackend",
    "Rule",
    "ScoredCandidate",
    "SearchConfig",
    "Statement",
    "TreeValidationError",
    "answer",
    "context_for_question",
    "declarativize",
    "direct_confidence",
    "evaluate",
    "generate_step",
    "load_dataset",
    "load_kb",
    "negate_text",
    "node_overall",
    "one_step_score",
    "prove",
    "proof_from_dict",
    "proof_to_dict",
    "rescore_tree",
    "__version__",
]
