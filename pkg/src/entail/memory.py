"""Persistent belief overrides and context assembly.

A correction the user teaches is stored as a :class:`BeliefOverride` keyed by
the statement's normalized key, persisted as line-delimited JSON via an
atomic write. At question time the most relevant overrides are retrieved by
plain token overlap (this is bookkeeping, not a learned retriever) and
assembled into the high-confidence bucket of a :class:`Context` that is
applied to every backend call of that question.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from entail.core import Context, Statement
from entail.errors import ContractError
from entail.nl import negate_text

log = logging.getLogger(__name__)

#: At most this many sentences reach a model call's context by default.
DEFAULT_CONTEXT_CAP = 5

# Function words ignored by the overlap scorer. Deliberately excludes
# negation words: "not" is content here.
_STOP_WORDS = frozenset(
    "a an the is are was were am be been being of to in on at for with and or "
    "do does did will would can could shall should may might must it its this "
    "that these those by as from has have had".split()
)


@dataclass(frozen=True)
class BeliefOverride:
    """One taught correction. At most one is active per normalized key."""

    statement: Statement
    asserted_true: bool
    source: str = "user"  # "user" | "import"
    created_at: str = ""  # UTC ISO timestamp, filled at insert time
    note: str | None = None

    def __post_init__(self) -> None:
        if self.source not in ("user", "import"):
            raise ContractError(f"source must be 'user' or 'import', got {self.source!r}")

    @property
    def key(self) -> str:
        return self.statement.normalized_key

    def effective_statement(self) -> Statement:
        """The sentence this override injects: negated when asserted false."""
        return self.statement if self.asserted_true else negate_text(self.statement)

    def to_json(self) -> dict:
        return {
            "text": self.statement.text,
            "asserted_true": self.asserted_true,
            "source": self.source,
            "created_at": self.created_at,
            "note": self.note,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "BeliefOverride":
        return cls(
            statement=Statement(raw["text"]),
            asserted_true=bool(raw["asserted_true"]),
            source=raw.get("source", "user"),
            created_at=raw.get("created_at", ""),
            note=raw.get("note"),
        )


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class MemoryStore:
    """Override map persisted to a JSONL file.

    Writes go to a temp file renamed over the target, so the file is either
    the old state or the new one, never half of each. A lock serializes
    writers; reads return snapshots.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._overrides: dict[str, BeliefOverride] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        for line_no, line in enumerate(self.path.read_text().splitlines(), 1):
            if not line.strip():
                continue
            try:
                override = BeliefOverride.from_json(json.loads(line))
            except (ValueError, KeyError) as exc:
                raise ContractError(f"{self.path}:{line_no}: bad override record: {exc}") from exc
            self._overrides[override.key] = override

    def _persist(self, overrides: dict[str, BeliefOverride]) -> None:
        payload = "".join(json.dumps(o.to_json()) + "\n" for o in overrides.values())
        fd, tmp_name = tempfile.mkstemp(
            dir=self.path.parent or Path("."), prefix=self.path.name, suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(payload)
            os.replace(tmp_name, self.path)
        except OSError:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise

    def add_override(
        self,
        statement: Statement,
        asserted_true: bool,
        source: str = "user",
        note: str | None = None,
    ) -> BeliefOverride:
        """Upsert an override; the newer entry replaces any older one for the
        same key. Persisted before returning; if persistence fails the
        in-memory store is left unchanged and the error propagates."""
        override = BeliefOverride(
            statement=statement,
            asserted_true=asserted_true,
            source=source,
            created_at=_now_iso(),
            note=note,
        )
        with self._lock:
            staged = dict(self._overrides)
            staged[override.key] = override
            self._persist(staged)
            self._overrides = staged
        return override

    def remove(self, key: str) -> bool:
        with self._lock:
            if key not in self._overrides:
                return False
            staged = dict(self._overrides)
            del staged[key]
            self._persist(staged)
            self._overrides = staged
            return True

    def get(self, key: str) -> BeliefOverride | None:
        with self._lock:
            return self._overrides.get(key)

    def list_overrides(self) -> list[BeliefOverride]:
        with self._lock:
            return sorted(self._overrides.values(), key=lambda o: (o.created_at, o.key))

    def __len__(self) -> int:
        with self._lock:
            return len(self._overrides)


def _content_tokens(text: str) -> set[str]:
    return {t for t in Statement(text).normalized_key.split() if t not in _STOP_WORDS}


def retrieve_relevant(
    store: MemoryStore,
    question: str,
    hypotheses: list[Statement],
    m: int = DEFAULT_CONTEXT_CAP,
) -> list[BeliefOverride]:
    """Top m overrides by token overlap with the question and hypotheses.

    Overlap is |override tokens ∩ query tokens| / |override tokens| after
    stop-word removal. Zero-overlap overrides still rank (last): a small
    store should keep influencing answers even when wording diverges, and an
    irrelevant override in context is harmless because nothing matches its
    key. Ties break by created_at, then key. ``m == 0`` returns ``[]``.
    """
    if m <= 0:
        return []
    query: set[str] = _content_tokens(question)
    for hypothesis in hypotheses:
        query |= _content_tokens(hypothesis.text)
    scored = []
    for override in store.list_overrides():
        tokens = _content_tokens(override.statement.text)
        overlap = len(tokens & query) / max(1, len(tokens))
        scored.append((-overlap, override.created_at, override.key, override))
    scored.sort(key=lambda item: item[:3])
    return [item[3] for item in scored[:m]]


def assemble_context(
    high: list[Statement],
    medium: list[Statement] | None = None,
    low: list[Statement] | None = None,
    cap: int = DEFAULT_CONTEXT_CAP,
) -> Context:
    """Build a Context, dropping the lowest-ranked sentences over the cap.

    Rank order is high before medium before low, earlier entries first;
    whatever falls past ``cap`` is dropped with a warning.
    """
    medium = medium or []
    low = low or []
    total = len(high) + len(medium) + len(low)
    if total > cap:
        log.warning("context holds %d sentences, keeping the top %d", total, cap)
        ranked = [("high", s) for s in high] + [("medium", s) for s in medium] + [
            ("low", s) for s in low
        ]
        kept = ranked[:cap]
        high = [s for bucket, s in kept if bucket == "high"]
        medium = [s for bucket, s in kept if bucket == "medium"]
        low = [s for bucket, s in kept if bucket == "low"]
    return Context(high=tuple(high), medium=tuple(medium), low=tuple(low))


def context_for_question(
    store: MemoryStore,
    question: str,
    hypotheses: list[Statement],
    cap: int = DEFAULT_CONTEXT_CAP,
) -> Context | None:
    """Retrieve relevant overrides and place them in the high bucket.

    Returns None when the store holds nothing useful, so callers can skip
    the context suffix entirely.
    """
    overrides = retrieve_relevant(store, question, hypotheses, m=cap)
    if not overrides:
        return None
    return assemble_context([o.effective_statement() for o in overrides], cap=cap)
