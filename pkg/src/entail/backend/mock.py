"""Deterministic knowledge-base oracle used in place of a trained model.

The KB file pins down every answer a real model would sample: facts carry
direct truth scores, rules carry entailment scores, the hypothesis table maps
(question, option) pairs to declarative statements. Everything is a pure
function of (request, seed) so searches replay bit-identically.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from entail.backend import DecodingParams
from entail.core import Context, QAPair, Statement
from entail.errors import ContractError, OpenEndedUnsupportedError
from entail.nl import declarativize, is_negation_pair, negate_text

# Context-override scores: a statement asserted in the high bucket is near
# certain, its negation near impossible.
OVERRIDE_TRUE = 0.99
OVERRIDE_FALSE = 0.01


@dataclass(frozen=True)
class Rule:
    premises: tuple[Statement, ...]
    conclusion_key: str
    entail: float
    index: int  # position in the KB file, the rank tiebreaker

    def premise_key_set(self) -> tuple[str, ...]:
        return tuple(sorted(p.normalized_key for p in self.premises))


@dataclass(frozen=True)
class KnowledgeBase:
    """Parsed KB file: facts, rules, declarativization and auxiliary tables."""

    facts: dict[str, float] = field(default_factory=dict)
    rules: tuple[Rule, ...] = ()
    hypothesis_table: dict[tuple[str, str], Statement] = field(default_factory=dict)
    default_truth: float = 0.5
    default_entail: float = 0.0
    negations: dict[str, Statement] = field(default_factory=dict)
    candidates: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "KnowledgeBase":
        defaults = raw.get("defaults", {})
        raw_facts = raw.get("facts", ())
        if isinstance(raw_facts, dict):
            raw_facts = [{"text": t, "truth": v} for t, v in raw_facts.items()]
        facts: dict[str, float] = {}
        for entry in raw_facts:
            stmt = Statement(entry["text"])
            truth = float(entry["truth"])
            if not 0.0 <= truth <= 1.0:
                raise ContractError(f"fact truth out of range: {entry!r}")
            prior = facts.get(stmt.normalized_key)
            if prior is not None and prior != truth:
                raise ContractError(f"conflicting truth values for {stmt.text!r}")
            facts[stmt.normalized_key] = truth

        rules: list[Rule] = []
        seen_steps: dict[tuple, float] = {}
        for i, entry in enumerate(raw.get("rules", ())):
            premises = tuple(Statement(t) for t in entry["premises"])
            conclusion = Statement(entry["conclusion"])
            entail = float(entry["entail"])
            if not premises:
                raise ContractError(f"rule {i} has no premises")
            if not 0.0 <= entail <= 1.0:
                raise ContractError(f"rule {i} entail score out of range")
            if any(p.normalized_key == conclusion.normalized_key for p in premises):
                raise ContractError(f"rule {i} concludes one of its own premises")
            step_key = (conclusion.normalized_key, tuple(sorted(p.normalized_key for p in premises)))
            prior = seen_steps.get(step_key)
            if prior is not None:
                if prior != entail:
                    raise ContractError(
                        f"rule {i} restates an earlier premise set for "
                        f"{conclusion.text!r} with a different entail score"
                    )
                continue  # exact duplicate rule, keep the first
            seen_steps[step_key] = entail
            rules.append(Rule(premises, conclusion.normalized_key, entail, i))

        raw_hypotheses = raw.get("hypotheses", ())
        if isinstance(raw_hypotheses, dict):
            raw_hypotheses = [
                {"question": q, "option": opt, "hypothesis": h}
                for q, by_option in raw_hypotheses.items()
                for opt, h in by_option.items()
            ]
        table = {
            (e["question"], e["option"]): Statement(e["hypothesis"])
            for e in raw_hypotheses
        }
        raw_negations = raw.get("negations", ())
        if isinstance(raw_negations, dict):
            raw_negations = [{"text": t, "negation": n} for t, n in raw_negations.items()]
        negations = {
            Statement(e["text"]).normalized_key: Statement(e["negation"])
            for e in raw_negations
        }
        raw_candidates = raw.get("candidates", ())
        if isinstance(raw_candidates, dict):
            raw_candidates = [
                {"question": q, "answers": a} for q, a in raw_candidates.items()
            ]
        candidates = {
            e["question"]: tuple(e["answers"]) for e in raw_candidates
        }
        return cls(
            facts=facts,
            rules=tuple(rules),
            hypothesis_table=table,
            default_truth=float(defaults.get("truth", 0.5)),
            default_entail=float(defaults.get("entail", 0.0)),
            negations=negations,
            candidates=candidates,
        )

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeBase":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ContractError(f"cannot load KB file {path}: {exc}") from exc
        return cls.from_dict(raw)


def load_kb(path: str | Path) -> KnowledgeBase:
    return KnowledgeBase.load(path)


class MockBackend:
    """Answers every angle from a :class:`KnowledgeBase`.

    ``noise`` (default off) perturbs fact and rule scores by a zero-mean,
    clamped amount keyed on (seed, statement, angle), so noisy runs still
    replay deterministically.
    """

    def __init__(self, kb: KnowledgeBase, noise: float = 0.0, noise_seed: int = 0):
        if not 0.0 <= noise <= 0.5:
            raise ContractError(f"noise must be in [0, 0.5], got {noise!r}")
        self.kb = kb
        self.noise = noise
        self.noise_seed = noise_seed
        self._rules_by_conclusion: dict[str, list[Rule]] = {}
        for rule in kb.rules:
            self._rules_by_conclusion.setdefault(rule.conclusion_key, []).append(rule)

    # -- scoring ---------------------------------------------------------

    def _perturb(self, value: float, angle: str, key: str) -> float:
        if self.noise == 0.0:
            return value
        rng = random.Random(f"{self.noise_seed}:{angle}:{key}")
        return min(1.0, max(0.0, value + rng.uniform(-self.noise, self.noise)))

    def score_direct(
        self, statement: Statement, qa: QAPair | None = None, context: Context | None = None
    ) -> float:
        if context is not None:
            for entry in context.high:
                if entry.normalized_key == statement.normalized_key:
                    return OVERRIDE_TRUE
                if is_negation_pair(entry, statement):
                    return OVERRIDE_FALSE
        base = self.kb.facts.get(statement.normalized_key, self.kb.default_truth)
        return self._perturb(base, "direct", statement.normalized_key)

    def score_entailment(
        self,
        premises: tuple[Statement, ...],
        conclusion: Statement,
        qa: QAPair | None = None,
        context: Context | None = None,
    ) -> float:
        premise_keys = tuple(sorted(p.normalized_key for p in premises))
        for rule in self._rules_by_conclusion.get(conclusion.normalized_key, ()):
            if rule.premise_key_set() == premise_keys:
                return self._perturb(
                    rule.entail, "entail", f"{rule.conclusion_key}|{rule.index}"
                )
        return self.kb.default_entail

    # -- generation ------------------------------------------------------

    def generate_premises(
        self,
        hypothesis: Statement,
        qa: QAPair | None,
        context: Context | None,
        k: int,
        decoding: DecodingParams,
    ) -> list[tuple[Statement, ...]]:
        """Premise sets for the hypothesis: matching rules ranked by entail
        score (descending), rule-file order breaking ties, with a seed-keyed
        shuffle applied inside groups of equal entail score. Deduplicated by
        the normalized key set; the hypothesis itself never appears."""
        if k < 1:
            raise ContractError(f"k must be >= 1, got {k}")
        matching = [
            r
            for r in self._rules_by_conclusion.get(hypothesis.normalized_key, ())
            if hypothesis.normalized_key not in r.premise_key_set()
        ]
        rng = random.Random(f"{decoding.seed}:premises:{hypothesis.normalized_key}")
        jitter = {r.index: rng.random() for r in matching}
        matching.sort(key=lambda r: (-r.entail, jitter[r.index], r.index))
        seen: set[tuple[str, ...]] = set()
        out: list[tuple[Statement, ...]] = []
        for rule in matching:
            key_set = rule.premise_key_set()
            if key_set in seen:
                continue
            seen.add(key_set)
            out.append(rule.premises)
            if len(out) == k:
                break
        return out

    def hypothesize(self, qa: QAPair) -> Statement:
        """Declarativize one answer option.

        The fixture table wins; otherwise yes/no options resolve to the
        affirmative reading of the question (negated for no), and any other
        option is substituted into the question template."""
        table_hit = self.kb.hypothesis_table.get((qa.question, qa.answer_option))
        if table_hit is not None:
            return table_hit
        option = qa.answer_option.strip()
        lowered = option.lower().rstrip(".")
        if lowered in ("yes", "true"):
            return declarativize(qa.question)
        if lowered in ("no", "false"):
            return self.negate(declarativize(qa.question))
        return declarativize(qa.question, option)

    def generate_candidates(self, question: str, n: int, decoding: DecodingParams) -> list[str]:
        fixture = self.kb.candidates.get(question)
        if not fixture:
            raise OpenEndedUnsupportedError(
                f"no candidate answers configured for question {question!r}"
            )
        seen: set[str] = set()
        out: list[str] = []
        for answer in fixture:
            key = Statement(answer).normalized_key
            if key in seen:
                continue
            seen.add(key)
            out.append(answer)
            if len(out) == n:
                break
        return out

    def negate(self, statement: Statement) -> Statement:
        fixture = self.kb.negations.get(statement.normalized_key)
        if fixture is not None:
            return fixture
        return negate_text(statement)
