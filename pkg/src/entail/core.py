"""Domain types and the score algebra for entailment proof search.

Everything here is an immutable value. The scoring functions are pure and are
shared by the search engine, the validators and the service layer, so any
change to them changes what every proof in the system means.

Score conventions:

* ``s_d`` is the model's belief that a statement is true, in [0, 1].
* ``c_d = max(s_d, 1 - s_d)`` is the confidence of the direct verdict (a
  statement confidently believed false is still scored confidently).
* ``s_r`` is the score of the best entailment proof found for a statement,
  the product of its premise scores times the entailment score. ``s_r == 0``
  means "no proof found", not "false". ``c_r == s_r``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

from entail.errors import ContractError, TreeValidationError

Branch = Literal["direct", "reasoned"]

#: Tolerance for checking values recomputed inside one process.
INTERNAL_TOL = 1e-12
#: Tolerance for values that crossed a serialization boundary.
ROUNDTRIP_TOL = 1e-9

_WS_RE = re.compile(r"\s+")
_NON_WORD_RE = re.compile(r"[^\w\s]+", re.UNICODE)
_TRAILING_TERMINAL_RE = re.compile(r"[\s.!?]+$")


def _check_unit(name: str, value: float) -> float:
    # `not (0 <= value <= 1)` also rejects NaN
    if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
        raise ContractError(f"{name} must be a real in [0, 1], got {value!r}")
    return float(value)


@dataclass(frozen=True)
class Statement:
    """A declarative natural-language sentence.

    The constructor canonicalizes the surface form: surrounding whitespace is
    trimmed and exactly one terminal period is enforced. Two statements are
    the same belief iff their ``normalized_key`` values are equal; every map
    in the system that stores beliefs is keyed that way.
    """

    text: str

    def __post_init__(self) -> None:
        if not isinstance(self.text, str):
            raise ContractError(f"statement text must be a string, got {type(self.text).__name__}")
        body = _TRAILING_TERMINAL_RE.sub("", self.text.strip())
        if not body:
            raise ContractError("statement text is empty after trimming")
        object.__setattr__(self, "text", body + ".")

    @cached_property
    def normalized_key(self) -> str:
        key = _NON_WORD_RE.sub(" ", self.text.lower())
        return _WS_RE.sub(" ", key).strip()

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class QAPair:
    """A question together with one of its answer options."""

    question: str
    answer_option: str
    option_index: int  # 0-based position within the question's option list

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ContractError("question is empty")
        if self.option_index < 0:
            raise ContractError(f"option_index must be >= 0, got {self.option_index}")


_CONTEXT_TAGS = ("[HIGH]", "[MEDIUM]", "[LOW]")
# Greedy sentence split: a chunk up to a period that is followed by a space
# or the end of the bucket.
_SENTENCE_RE = re.compile(r"(.+?\.)(?:\s+|$)")


@dataclass(frozen=True)
class Context:
    """Prioritized sentences injected into every model call of one question.

    Statements live in exactly one of three confidence buckets. The wire
    form is a single line where all three tags always appear, in order:
    ``[HIGH] s1 s2 [MEDIUM] s3 [LOW]``.
    """

    high: tuple[Statement, ...] = ()
    medium: tuple[Statement, ...] = ()
    low: tuple[Statement, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "high", tuple(self.high))
        object.__setattr__(self, "medium", tuple(self.medium))
        object.__setattr__(self, "low", tuple(self.low))
        seen: dict[str, str] = {}
        for bucket_name, bucket in self.buckets():
            for stmt in bucket:
                prior = seen.get(stmt.normalized_key)
                if prior is not None and prior != bucket_name:
                    raise ContractError(
                        f"statement {stmt.text!r} appears in both {prior} and {bucket_name}"
                    )
                seen[stmt.normalized_key] = bucket_name

    def buckets(self) -> tuple[tuple[str, tuple[Statement, ...]], ...]:
        return (("high", self.high), ("medium", self.medium), ("low", self.low))

    def is_empty(self) -> bool:
        return not (self.high or self.medium or self.low)

    def serialize(self) -> str:
        parts: list[str] = []
        for tag, (_, bucket) in zip(_CONTEXT_TAGS, self.buckets()):
            parts.append(tag)
            parts.extend(stmt.text for stmt in bucket)
        return " ".join(parts)

    @classmethod
    def parse(cls, serialized: str) -> "Context":
        text = serialized.strip()
        for tag in _CONTEXT_TAGS:
            if tag not in text:
                raise ContractError(f"serialized context is missing {tag}: {serialized!r}")
        if not text.startswith(_CONTEXT_TAGS[0]):
            raise ContractError(f"serialized context must start with [HIGH]: {serialized!r}")
        head, _, low_part = text.partition(_CONTEXT_TAGS[2])
        high_part, _, medium_part = head.partition(_CONTEXT_TAGS[1])
        high_part = high_part[len(_CONTEXT_TAGS[0]):]

        def split(chunk: str) -> tuple[Statement, ...]:
            return tuple(Statement(m) for m in _SENTENCE_RE.findall(chunk.strip()))

        return cls(high=split(high_part), medium=split(medium_part), low=split(low_part))


@dataclass(frozen=True)
class EntailmentStep:
    """One inference: a premise list claimed to entail a conclusion."""

    premises: tuple[Statement, ...]
    conclusion: Statement
    s_e: float  # entailment score of premises |- conclusion

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))
        if len(self.premises) < 1:
            raise ContractError("an entailment step needs at least one premise")
        object.__setattr__(self, "s_e", _check_unit("s_e", self.s_e))
        if any(p.normalized_key == self.conclusion.normalized_key for p in self.premises):
            raise ContractError(
                f"conclusion {self.conclusion.text!r} appears among its own premises"
            )


@dataclass(frozen=True)
class ProofNode:
    """One node of a finished proof tree.

    A node either stands on its direct score (``branch == "direct"``, no step,
    no children) or on a retained entailment step (``branch == "reasoned"``,
    children aligned one-to-one with the step's premises). ``forced`` is set
    on a root whose at-least-one-step guarantee had to override the candidate
    filter, or that could not be expanded at all.

    Construction checks are structural; full score consistency is the job of
    :func:`rescore_tree`, which also accepts trees that crossed a
    serialization boundary.
    """

    statement: Statement
    s_d: float
    c_d: float
    s_r: float
    c_r: float
    overall: float
    branch: Branch
    step: EntailmentStep | None = None
    children: tuple["ProofNode", ...] = ()
    forced: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        for name in ("s_d", "s_r", "c_r", "overall"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))
        c_d = _check_unit("c_d", self.c_d)
        object.__setattr__(self, "c_d", c_d)
        if abs(c_d - max(self.s_d, 1.0 - self.s_d)) > ROUNDTRIP_TOL:
            raise ContractError(f"c_d={c_d} is not max(s_d, 1-s_d) for s_d={self.s_d}")
        if self.branch not in ("direct", "reasoned"):
            raise ContractError(f"branch must be 'direct' or 'reasoned', got {self.branch!r}")
        if self.branch == "reasoned":
            if self.step is None:
                raise ContractError("a reasoned node needs an entailment step")
            if len(self.children) != len(self.step.premises):
                raise ContractError(
                    f"children ({len(self.children)}) must align with premises "
                    f"({len(self.step.premises)})"
                )
            for child, premise in zip(self.children, self.step.premises):
                if child.statement.normalized_key != premise.normalized_key:
                    raise ContractError(
                        f"child {child.statement.text!r} does not match premise {premise.text!r}"
                    )
            if self.step.conclusion.normalized_key != self.statement.normalized_key:
                raise ContractError("step conclusion does not match the node statement")
        else:
            if self.step is not None or self.children:
                raise ContractError("a direct node keeps neither step nor children")

    def depth(self) -> int:
        """Longest root-to-leaf step count."""
        if not self.children:
            return 0
        return 1 + max(child.depth() for child in self.children)

    def walk(self) -> Iterable["ProofNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of a proof search. Defaults follow the strongest reported setup."""

    max_depth: int = 3
    k_root: int = 6  # candidate steps sampled at the root hypothesis
    k_inner: int = 1  # candidate steps sampled below the root (greedy)
    filter_threshold: float = 0.5
    temperature: float = 2.0
    top_p: float = 0.95
    seed: int = 0
    force_root_proof: bool = True  # insist on at least a 1-deep tree at the root

    def __post_init__(self) -> None:
        for name in ("max_depth", "k_root", "k_inner"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ContractError(f"{name} must be an integer >= 1, got {value!r}")
        _check_unit("filter_threshold", self.filter_threshold)
        if not self.temperature > 0:
            raise ContractError(f"temperature must be > 0, got {self.temperature!r}")
        if not 0 < self.top_p <= 1:
            raise ContractError(f"top_p must be in (0, 1], got {self.top_p!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ContractError(f"seed must be an unsigned integer, got {self.seed!r}")


def direct_confidence(s_d: float) -> float:
    """Confidence of the direct verdict: ``max(s_d, 1 - s_d)``."""
    s_d = _check_unit("s_d", s_d)
    return max(s_d, 1.0 - s_d)


def one_step_score(premise_scores: Iterable[float], s_e: float) -> float:
    """Score of a single entailment step: product of premise scores times s_e.

    Factors are multiplied in sorted order so the result is bit-identical
    under premise permutation, not merely equal to within rounding.
    """
    scores = [(_check_unit("premise score", s)) for s in premise_scores]
    if not scores:
        raise ContractError("one_step_score needs at least one premise score")
    return math.prod(sorted(scores + [_check_unit("s_e", s_e)]))


def node_overall(s_d: float, s_r: float) -> tuple[float, Branch]:
    """Pick the winning branch of a node.

    The reasoned branch wins only when ``s_r`` strictly exceeds the direct
    confidence; ties go to the direct branch. Note the returned value is a
    score, not a confidence: a node with ``s_d = 0.2`` and ``s_r = 0.7``
    resolves to ``(0.2, "direct")`` because ``c_d = 0.8 >= 0.7``.
    """
    s_d = _check_unit("s_d", s_d)
    s_r = _check_unit("s_r", s_r)
    if s_r > direct_confidence(s_d):
        return s_r, "reasoned"
    return s_d, "direct"


def rescore_tree(root: ProofNode, *, tol: float = ROUNDTRIP_TOL) -> float:
    """Recompute every score of a proof tree bottom-up and return the root overall.

    The tree itself records which branch each node took; this function
    validates that its stored scores are consistent with that structure and
    with the algebra, within ``tol`` (default covers trees that round-tripped
    through the 9-decimal wire form). The input is never mutated. Violations
    raise :class:`TreeValidationError` naming the offending node's path.

    The root is exempt from the strict ``c_r > c_d`` requirement because the
    search may force a reasoned root; every inner reasoned node must satisfy
    it.
    """

    def visit(node: ProofNode, path: list[int], is_root: bool) -> float:
        if abs(node.c_d - max(node.s_d, 1.0 - node.s_d)) > tol:
            raise TreeValidationError(path, f"c_d={node.c_d} inconsistent with s_d={node.s_d}")
        if node.forced and not is_root:
            raise TreeValidationError(path, "forced flag on a non-root node")
        if node.branch == "direct":
            if abs(node.s_r) > tol or abs(node.c_r) > tol:
                raise TreeValidationError(path, f"direct node stores s_r={node.s_r}")
            if abs(node.overall - node.s_d) > tol:
                raise TreeValidationError(
                    path, f"direct node overall={node.overall} != s_d={node.s_d}"
                )
            return node.s_d

        assert node.step is not None  # guaranteed by ProofNode construction
        child_scores = [
            visit(child, path + [i], False) for i, child in enumerate(node.children)
        ]
        s_r = one_step_score(child_scores, node.step.s_e)
        if abs(s_r - node.s_r) > tol:
            raise TreeValidationError(path, f"stored s_r={node.s_r} recomputes to {s_r}")
        if abs(node.c_r - node.s_r) > tol:
            raise TreeValidationError(path, f"c_r={node.c_r} != s_r={node.s_r}")
        if abs(node.overall - node.s_r) > tol:
            raise TreeValidationError(
                path, f"reasoned node overall={node.overall} != s_r={node.s_r}"
            )
        if not is_root and s_r <= direct_confidence(node.s_d) - tol:
            raise TreeValidationError(
                path, f"inner reasoned node with s_r={s_r} <= c_d={direct_confidence(node.s_d)}"
            )
        return s_r

    return visit(root, [], True)
