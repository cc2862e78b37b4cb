"""Wire schema for proofs and answers, plus the append-only proof store.

Scores cross the wire rounded to 9 decimal places, matching the equality
tolerance used everywhere else; trees reconstructed from this form pass
:func:`entail.core.rescore_tree`. Serialization is deterministic: the same
tree always yields the same bytes (no timestamps inside proof bodies).
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from entail.core import EntailmentStep, ProofNode, SearchConfig, Statement
from entail.errors import ContractError
from entail.pipeline import AnswerResult, Mode, OptionOutcome


def round9(value: float) -> float:
    return round(float(value), 9)


def proof_to_dict(node: ProofNode) -> dict:
    out: dict = {
        "statement": node.statement.text,
        "s_d": round9(node.s_d),
        "c_d": round9(node.c_d),
        "s_r": round9(node.s_r),
        "overall": round9(node.overall),
        "branch": node.branch,
        "forced": node.forced,
    }
    if node.step is not None:
        out["s_e"] = round9(node.step.s_e)
    out["children"] = [proof_to_dict(child) for child in node.children]
    return out


def proof_from_dict(raw: dict) -> ProofNode:
    try:
        children = tuple(proof_from_dict(c) for c in raw.get("children", ()))
        statement = Statement(raw["statement"])
        s_r = float(raw["s_r"])
        step = None
        if "s_e" in raw:
            step = EntailmentStep(
                premises=tuple(c.statement for c in children),
                conclusion=statement,
                s_e=float(raw["s_e"]),
            )
        return ProofNode(
            statement=statement,
            s_d=float(raw["s_d"]),
            c_d=float(raw["c_d"]),
            s_r=s_r,
            c_r=s_r,
            overall=float(raw["overall"]),
            branch=raw["branch"],
            step=step,
            children=children,
            forced=bool(raw.get("forced", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed proof node: {exc}") from exc


def cfg_to_dict(cfg: SearchConfig) -> dict:
    return {
        "max_depth": cfg.max_depth,
        "k_root": cfg.k_root,
        "k_inner": cfg.k_inner,
        "filter_threshold": cfg.filter_threshold,
        "temperature": cfg.temperature,
        "top_p": cfg.top_p,
        "seed": cfg.seed,
        "force_root_proof": cfg.force_root_proof,
    }


def cfg_from_dict(raw: dict) -> SearchConfig:
    known = {k: raw[k] for k in cfg_to_dict(SearchConfig()) if k in raw}
    return SearchConfig(**known)


def result_to_dict(result: AnswerResult) -> dict:
    def option_to_dict(outcome: OptionOutcome) -> dict:
        return {
            "option": outcome.option,
            "hypothesis": outcome.hypothesis.text if outcome.hypothesis else None,
            "s_d": round9(outcome.s_d) if outcome.s_d is not None else None,
            "c_d": round9(outcome.c_d) if outcome.c_d is not None else None,
            "proof": proof_to_dict(outcome.proof) if outcome.proof is not None else None,
            "error": outcome.error,
        }

    return {
        "question_id": result.question_id,
        "question": result.question,
        "mode": result.mode,
        "chosen_index": result.chosen_index,
        "chosen_option": result.chosen.option,
        "faithful": result.faithful,
        "wall_time_s": result.wall_time_s,
        "per_option": [option_to_dict(o) for o in result.per_option],
    }


@dataclass(frozen=True)
class ProofRecord:
    """A stored answer: the result plus everything needed to replay it."""

    proof_id: str  # opaque, unique per store lifetime
    created_at: str
    question: str
    mode: Mode
    cfg: dict
    result: dict  # result_to_dict form

    def to_json(self) -> dict:
        return {
            "proof_id": self.proof_id,
            "created_at": self.created_at,
            "question": self.question,
            "mode": self.mode,
            "cfg": self.cfg,
            "result": self.result,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "ProofRecord":
        return cls(
            proof_id=raw["proof_id"],
            created_at=raw["created_at"],
            question=raw["question"],
            mode=raw["mode"],
            cfg=raw["cfg"],
            result=raw["result"],
        )


class ProofStore:
    """Append-only JSONL file with an in-memory id index."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[str, ProofRecord] = {}
        self._order: list[str] = []
        if self.path.exists():
            for line_no, line in enumerate(self.path.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    record = ProofRecord.from_json(json.loads(line))
                except (ValueError, KeyError) as exc:
                    raise ContractError(f"{self.path}:{line_no}: bad proof record: {exc}") from exc
                if record.proof_id not in self._records:
                    self._order.append(record.proof_id)
                self._records[record.proof_id] = record

    def add(self, question: str, mode: Mode, cfg: dict, result: dict) -> ProofRecord:
        record = ProofRecord(
            proof_id=uuid.uuid4().hex,
            created_at=datetime.now(timezone.utc).isoformat(),
            question=question,
            mode=mode,
            cfg=cfg,
            result=result,
        )
        line = json.dumps(record.to_json()) + "\n"
        with self._lock:
            with self.path.open("a") as handle:
                handle.write(line)
            self._records[record.proof_id] = record
            self._order.append(record.proof_id)
        return record

    def get(self, proof_id: str) -> ProofRecord | None:
        with self._lock:
            return self._records.get(proof_id)

    def list_ids(self) -> list[str]:
        with self._lock:
            return list(self._order)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)
