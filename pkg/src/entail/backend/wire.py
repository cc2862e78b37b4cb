"""Wire format for model calls.

One multi-angle model is addressed through tagged single-line strings. The
angle is picked by the trailing marker:

* ``H: <hypothesis> P:`` asks for premises, answered as
  ``[PREMISE] <p1> [PREMISE] <p2>``
* ``H: <hypothesis> V:`` asks for the direct truth score
* ``H: <hypothesis> P: [PREMISE] <p1> ... I:`` asks for the entailment score

An optional ``Q: <question> A: <answer> `` prefix precedes ``H:``, and an
optional context is appended as `` C: <serialized context>``. The auxiliary
angles (declarativization ``D:``, candidate answers ``O:``, negation ``N:``)
follow the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

from entail.core import Context, QAPair, Statement
from entail.errors import ContractError

PREMISE_TAG = "[PREMISE]"

_QaLike = QAPair | tuple[str, str] | None


def _qa_prefix(qa: _QaLike) -> str:
    if qa is None:
        return ""
    if isinstance(qa, QAPair):
        question, answer = qa.question, qa.answer_option
    else:
        question, answer = qa
    return f"Q: {question} A: {answer} "


def _context_suffix(context: Context | None) -> str:
    if context is None or context.is_empty():
        return ""
    return f" C: {context.serialize()}"


def serialize_premises_input(
    hypothesis: Statement, qa: _QaLike = None, context: Context | None = None
) -> str:
    return f"{_qa_prefix(qa)}H: {hypothesis.text} P:{_context_suffix(context)}"


def serialize_direct_input(
    hypothesis: Statement, qa: _QaLike = None, context: Context | None = None
) -> str:
    return f"{_qa_prefix(qa)}H: {hypothesis.text} V:{_context_suffix(context)}"


def serialize_entailment_input(
    hypothesis: Statement,
    premises: tuple[Statement, ...],
    qa: _QaLike = None,
    context: Context | None = None,
) -> str:
    if not premises:
        raise ContractError("entailment input needs at least one premise")
    body = serialize_premises_output(premises)
    return f"{_qa_prefix(qa)}H: {hypothesis.text} P: {body} I:{_context_suffix(context)}"


def serialize_hypothesize_input(qa: QAPair | tuple[str, str]) -> str:
    return f"{_qa_prefix(qa)}D:"


def serialize_candidates_input(question: str) -> str:
    return f"Q: {question} O:"


def serialize_negate_input(statement: Statement) -> str:
    return f"H: {statement.text} N:"


def serialize_premises_output(premises: tuple[Statement, ...]) -> str:
    if not premises:
        raise ContractError("premise list is empty")
    return " ".join(f"{PREMISE_TAG} {p.text}" for p in premises)


def parse_premises_output(text: str) -> tuple[Statement, ...]:
    """Parse ``[PREMISE] p1 [PREMISE] p2`` into statements.

    Raises :class:`ContractError` on anything that does not match; callers
    sampling from a real model catch this and drop the sample.
    """
    stripped = text.strip()
    if not stripped.startswith(PREMISE_TAG):
        raise ContractError(f"premise output must start with {PREMISE_TAG}: {text!r}")
    chunks = [c.strip() for c in stripped.split(PREMISE_TAG)]
    premises = tuple(Statement(c) for c in chunks if c)
    if not premises:
        raise ContractError(f"premise output holds no premises: {text!r}")
    return premises


@dataclass(frozen=True)
class ParsedInput:
    """A wire input string taken apart again."""

    angle: str  # premises | direct | entailment
    hypothesis: Statement
    premises: tuple[Statement, ...] | None = None
    question: str | None = None
    answer: str | None = None
    context: Context | None = None

    def serialize(self) -> str:
        qa = (self.question, self.answer) if self.question is not None else None
        if self.angle == "premises":
            return serialize_premises_input(self.hypothesis, qa, self.context)
        if self.angle == "direct":
            return serialize_direct_input(self.hypothesis, qa, self.context)
        if self.angle == "entailment":
            assert self.premises is not None
            return serialize_entailment_input(self.hypothesis, self.premises, qa, self.context)
        raise ContractError(f"cannot serialize angle {self.angle!r}")


def parse_input(text: str) -> ParsedInput:
    """Invert the three scoring/generation input serializers."""
    rest = text
    context = None
    ctx_at = rest.rfind(" C: [HIGH]")
    if ctx_at != -1:
        context = Context.parse(rest[ctx_at + 4:])
        rest = rest[:ctx_at]

    question = answer = None
    if rest.startswith("Q: "):
        a_at = rest.find(" A: ")
        h_at = rest.find(" H: ", a_at)
        if a_at == -1 or h_at == -1:
            raise ContractError(f"malformed QA prefix: {text!r}")
        question = rest[3:a_at]
        answer = rest[a_at + 4:h_at]
        rest = rest[h_at + 1:]

    if not rest.startswith("H: "):
        raise ContractError(f"wire input must contain 'H: ': {text!r}")
    body = rest[3:]

    if body.endswith(" I:"):
        split_at = body.find(f" P: {PREMISE_TAG}")
        if split_at == -1:
            raise ContractError(f"entailment input without premises: {text!r}")
        hypothesis = Statement(body[:split_at])
        premises = parse_premises_output(body[split_at + 4:-3])
        return ParsedInput("entailment", hypothesis, premises, question, answer, context)
    if body.endswith(" V:"):
        return ParsedInput("direct", Statement(body[:-3]), None, question, answer, context)
    if body.endswith(" P:"):
        return ParsedInput("premises", Statement(body[:-3]), None, question, answer, context)
    raise ContractError(f"wire input has no recognized angle marker: {text!r}")
