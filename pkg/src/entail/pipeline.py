"""Question answering on top of the proof search.

Three modes share one shape: declarativize every option into a hypothesis,
score or prove each, pick an index.

* direct: argmax of the direct truth scores; never faithful.
* entailer: argmax of the proof tree root scores; faithful by definition.
* combined: the direct pick and the entailer pick compete on confidence
  (``c_d`` vs ``c_r``, ties to the entailer); faithful iff the entailer
  pick survived.

All ties between options break to the lowest index.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Literal

from entail.backend import Backend, DecodingParams
from entail.core import Context, ProofNode, QAPair, SearchConfig, Statement, direct_confidence
from entail.errors import (
    BackendError,
    DatasetError,
    DeclarativizationError,
    QuestionError,
)
from entail.search import prove

log = logging.getLogger(__name__)

Mode = Literal["direct", "entailer", "combined"]
DEFAULT_OPEN_ENDED_CANDIDATES = 4


@dataclass(frozen=True)
class QuestionRecord:
    """One dataset entry: fixed options or an open-ended prompt."""

    id: str
    question: str
    options: tuple[str, ...] | None = None
    open_ended: bool = False
    n_candidates: int | None = None
    gold_index: int | None = None
    gold_text: str | None = None

    def __post_init__(self) -> None:
        if self.options is not None:
            object.__setattr__(self, "options", tuple(self.options))
        if self.open_ended:
            if self.options is not None:
                raise DatasetError(f"{self.id}: open-ended records carry no options")
            n = self.n_candidates or DEFAULT_OPEN_ENDED_CANDIDATES
            if n < 2:
                raise DatasetError(f"{self.id}: n_candidates must be >= 2, got {n}")
        else:
            if self.options is None or len(self.options) < 2:
                raise DatasetError(f"{self.id}: need at least two options")
            if self.gold_index is not None and not 0 <= self.gold_index < len(self.options):
                raise DatasetError(f"{self.id}: gold_index {self.gold_index} out of range")

    def has_gold(self) -> bool:
        return self.gold_index is not None or (self.open_ended and self.gold_text is not None)


@dataclass(frozen=True)
class OptionOutcome:
    """What happened to one answer option."""

    option: str
    hypothesis: Statement | None
    s_d: float | None
    c_d: float | None
    proof: ProofNode | None = None
    error: str | None = None

    def selection_score(self) -> float:
        """Score used to rank this option; an errored search scores zero."""
        if self.proof is not None:
            return self.proof.overall
        return self.s_d if self.s_d is not None else 0.0


@dataclass(frozen=True)
class AnswerResult:
    question_id: str
    question: str
    mode: Mode
    chosen_index: int
    per_option: tuple[OptionOutcome, ...]
    faithful: bool
    wall_time_s: float

    @property
    def chosen(self) -> OptionOutcome:
        return self.per_option[self.chosen_index]


def _argmax(scores: Iterable[float]) -> int:
    best_i, best = 0, float("-inf")
    for i, score in enumerate(scores):
        if score > best:  # strict: ties keep the lowest index
            best_i, best = i, score
    return best_i


def resolve_options(
    backend: Backend, record: QuestionRecord, cfg: SearchConfig
) -> tuple[str, ...]:
    if not record.open_ended:
        assert record.options is not None
        return record.options
    n = record.n_candidates or DEFAULT_OPEN_ENDED_CANDIDATES
    decoding = DecodingParams(cfg.temperature, cfg.top_p, cfg.seed)
    candidates = backend.generate_candidates(record.question, n, decoding)
    if len(candidates) < 2:
        raise QuestionError(f"{record.id}: only {len(candidates)} candidate answers")
    return tuple(candidates)


def build_hypotheses(
    backend: Backend, question: str, options: tuple[str, ...]
) -> list[Statement]:
    """Declarativize every option; two options may never share a key."""
    hypotheses = [
        backend.hypothesize(QAPair(question, option, i)) for i, option in enumerate(options)
    ]
    seen: dict[str, int] = {}
    for i, hypothesis in enumerate(hypotheses):
        j = seen.setdefault(hypothesis.normalized_key, i)
        if j != i:
            raise DeclarativizationError(
                f"options {options[j]!r} and {options[i]!r} both map to {hypothesis.text!r}"
            )
    return hypotheses


def _prove_options(
    backend: Backend,
    question: str,
    options: tuple[str, ...],
    hypotheses: list[Statement],
    cfg: SearchConfig,
    context: Context | None,
) -> list[OptionOutcome]:
    """Search every option, siblings in parallel, results in option order."""

    def run(args: tuple[int, str, Statement]) -> OptionOutcome:
        i, option, hypothesis = args
        qa = QAPair(question, option, i)
        try:
            proof = prove(backend, hypothesis, cfg, qa, context)
        except BackendError as exc:
            log.warning("search failed for %r: %s", hypothesis.text, exc)
            return OptionOutcome(option, hypothesis, None, None, None, error=str(exc))
        return OptionOutcome(
            option, hypothesis, proof.s_d, proof.c_d, proof
        )

    jobs = list(zip(range(len(options)), options, hypotheses))
    workers = min(len(jobs), getattr(backend, "max_concurrency", 4) or 4)
    if workers <= 1:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def answer_direct(
    backend: Backend,
    record: QuestionRecord,
    cfg: SearchConfig,
    context: Context | None = None,
) -> AnswerResult:
    start = time.perf_counter()
    options = resolve_options(backend, record, cfg)
    hypotheses = build_hypotheses(backend, record.question, options)
    per_option = []
    for i, (option, hypothesis) in enumerate(zip(options, hypotheses)):
        qa = QAPair(record.question, option, i)
        try:
            s_d = backend.score_direct(hypothesis, qa, context)
        except BackendError as exc:
            per_option.append(OptionOutcome(option, hypothesis, None, None, None, str(exc)))
            continue
        per_option.append(OptionOutcome(option, hypothesis, s_d, direct_confidence(s_d)))
    _require_any_scored(record, per_option)
    chosen = _argmax(o.s_d if o.s_d is not None else 0.0 for o in per_option)
    return AnswerResult(
        question_id=record.id,
        question=record.question,
        mode="direct",
        chosen_index=chosen,
        per_option=tuple(per_option),
        faithful=False,
        wall_time_s=time.perf_counter() - start,
    )


def answer_entailer(
    backend: Backend,
    record: QuestionRecord,
    cfg: SearchConfig,
    context: Context | None = None,
) -> AnswerResult:
    start = time.perf_counter()
    options = resolve_options(backend, record, cfg)
    hypotheses = build_hypotheses(backend, record.question, options)
    per_option = _prove_options(backend, record.question, options, hypotheses, cfg, context)
    _require_any_scored(record, per_option)
    chosen = _argmax(o.selection_score() for o in per_option)
    return AnswerResult(
        question_id=record.id,
        question=record.question,
        mode="entailer",
        chosen_index=chosen,
        per_option=tuple(per_option),
        faithful=True,
        wall_time_s=time.perf_counter() - start,
    )


def answer_combined(
    backend: Backend,
    record: QuestionRecord,
    cfg: SearchConfig,
    context: Context | None = None,
) -> AnswerResult:
    """Mode-level pick: the whole direct answer competes with the whole
    entailer answer on confidence; ties go to the entailer."""
    start = time.perf_counter()
    options = resolve_options(backend, record, cfg)
    hypotheses = build_hypotheses(backend, record.question, options)
    per_option = _prove_options(backend, record.question, options, hypotheses, cfg, context)
    _require_any_scored(record, per_option)
    i_direct = _argmax(o.s_d if o.s_d is not None else 0.0 for o in per_option)
    i_entail = _argmax(o.selection_score() for o in per_option)
    c_direct = per_option[i_direct].c_d or 0.0
    entail_proof = per_option[i_entail].proof
    c_reasoned = entail_proof.c_r if entail_proof is not None else 0.0
    chosen = i_direct if c_direct > c_reasoned else i_entail
    return AnswerResult(
        question_id=record.id,
        question=record.question,
        mode="combined",
        chosen_index=chosen,
        per_option=tuple(per_option),
        faithful=chosen == i_entail,
        wall_time_s=time.perf_counter() - start,
    )


_ANSWERERS: dict[str, Callable[..., AnswerResult]] = {
    "direct": answer_direct,
    "entailer": answer_entailer,
    "combined": answer_combined,
}


def answer(
    backend: Backend,
    record: QuestionRecord,
    cfg: SearchConfig,
    mode: Mode = "entailer",
    context: Context | None = None,
) -> AnswerResult:
    try:
        answerer = _ANSWERERS[mode]
    except KeyError:
        raise DatasetError(f"unknown mode {mode!r}") from None
    return answerer(backend, record, cfg, context)


def _require_any_scored(record: QuestionRecord, per_option: list[OptionOutcome]) -> None:
    if all(o.error is not None for o in per_option):
        raise QuestionError(f"{record.id}: every option failed")


def entailer_pick(per_option: tuple[OptionOutcome, ...]) -> int:
    return _argmax(o.selection_score() for o in per_option)


# -- datasets and batch evaluation --------------------------------------


def load_dataset(path: str | Path) -> list[QuestionRecord]:
    records = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            records.append(
                QuestionRecord(
                    id=str(raw.get("id", f"line{line_no}")),
                    question=raw["question"],
                    options=tuple(raw["options"]) if raw.get("options") is not None else None,
                    open_ended=bool(raw.get("open_ended", False)),
                    n_candidates=raw.get("n_candidates"),
                    gold_index=raw.get("gold_index"),
                    gold_text=raw.get("gold_text"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"{path}:{line_no}: {exc}") from exc
    return records


@dataclass
class EvalMetrics:
    mode: Mode
    n_questions: int
    n_evaluated: int
    accuracy: float
    depth_histogram: dict[int, int]
    forced_rate: float
    faithful_rate: float
    mean_wall_time_s: float
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_questions": self.n_questions,
            "n_evaluated": self.n_evaluated,
            "accuracy": self.accuracy,
            "depth_histogram": {str(k): v for k, v in sorted(self.depth_histogram.items())},
            "forced_rate": self.forced_rate,
            "faithful_rate": self.faithful_rate,
            "mean_wall_time_s": self.mean_wall_time_s,
            "skipped": [{"id": qid, "reason": reason} for qid, reason in self.skipped],
        }

    def format_table(self) -> str:
        rows = [
            ("mode", self.mode),
            ("questions", str(self.n_questions)),
            ("evaluated", str(self.n_evaluated)),
            ("accuracy", f"{self.accuracy:.4f}"),
            ("depth histogram", " ".join(f"{k}:{v}" for k, v in sorted(self.depth_histogram.items())) or "-"),
            ("forced rate", f"{self.forced_rate:.4f}"),
            ("faithful rate", f"{self.faithful_rate:.4f}"),
            ("mean wall time", f"{self.mean_wall_time_s * 1000:.1f} ms"),
            ("skipped", str(len(self.skipped))),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def evaluate(
    backend: Backend,
    records: list[QuestionRecord],
    cfg: SearchConfig,
    mode: Mode = "entailer",
    context_provider: Callable[[QuestionRecord, list[Statement]], Context | None] | None = None,
    workers: int = 4,
) -> EvalMetrics:
    """Answer every record and aggregate metrics.

    Refuses to run on an empty dataset or one with missing gold labels.
    Questions that fail entirely (declarativization collision, every option
    erroring) are skipped with a reason and excluded from the accuracy
    denominator. Deterministic for a fixed (backend, cfg) regardless of
    ``workers``.
    """
    if not records:
        raise DatasetError("dataset is empty")
    unlabeled = [r.id for r in records if not r.has_gold()]
    if unlabeled:
        raise DatasetError(f"records without gold labels: {', '.join(unlabeled[:5])}")

    def run(record: QuestionRecord) -> tuple[QuestionRecord, AnswerResult | None, str | None]:
        context = None
        if context_provider is not None:
            try:
                options = resolve_options(backend, record, cfg)
                context = context_provider(record, build_hypotheses(backend, record.question, options))
            except (DeclarativizationError, QuestionError, BackendError) as exc:
                return record, None, str(exc)
        try:
            return record, answer(backend, record, cfg, mode, context), None
        except (DeclarativizationError, QuestionError, BackendError) as exc:
            return record, None, str(exc)

    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, records))
    else:
        outcomes = [run(r) for r in records]

    n_correct = 0
    n_evaluated = 0
    n_faithful = 0
    n_forced = 0
    wall_total = 0.0
    histogram: dict[int, int] = {}
    skipped: list[tuple[str, str]] = []
    for record, result, failure in outcomes:
        if result is None:
            skipped.append((record.id, failure or "unknown failure"))
            continue
        n_evaluated += 1
        wall_total += result.wall_time_s
        n_faithful += int(result.faithful)
        gold = _gold_index(record, result)
        n_correct += int(gold is not None and result.chosen_index == gold)
        best_proof = None
        if mode != "direct":
            best_proof = result.per_option[entailer_pick(result.per_option)].proof
        if best_proof is not None:
            depth = best_proof.depth()
            histogram[depth] = histogram.get(depth, 0) + 1
            n_forced += int(best_proof.forced)

    return EvalMetrics(
        mode=mode,
        n_questions=len(records),
        n_evaluated=n_evaluated,
        accuracy=n_correct / n_evaluated if n_evaluated else 0.0,
        depth_histogram=histogram,
        forced_rate=n_forced / n_evaluated if n_evaluated else 0.0,
        faithful_rate=n_faithful / n_evaluated if n_evaluated else 0.0,
        mean_wall_time_s=wall_total / n_evaluated if n_evaluated else 0.0,
        skipped=skipped,
    )


def _gold_index(record: QuestionRecord, result: AnswerResult) -> int | None:
    if record.gold_index is not None:
        return record.gold_index
    if record.gold_text is None:
        return None
    gold_key = Statement(record.gold_text).normalized_key
    for i, outcome in enumerate(result.per_option):
        if Statement(outcome.option).normalized_key == gold_key:
            return i
    return None  # gold answer was not among the generated candidates
