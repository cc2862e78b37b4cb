"""Backward-chaining proof search.

``prove`` builds an entailment tree for one hypothesis by overgenerate-and-
filter: at each node the backend proposes up to k premise sets, each candidate
is scored one step deep, candidates with any score below the filter
threshold are discarded, and the best survivor is expanded recursively. A
node keeps its expansion only while the reasoned score beats the direct
confidence; the root may be forced to keep a step regardless so that every
answer comes with at least a one-deep proof.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from entail.backend import Backend, DecodingParams
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
)
from entail.errors import ContractError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredCandidate:
    """One candidate entailment step, scored one step deep."""

    step: EntailmentStep
    premise_scores: tuple[float, ...]  # aligned with step.premises
    s_r_1deep: float  # product of premise scores times s_e
    filtered: bool  # any premise score or s_e strictly below the threshold
    sample_index: int  # position in the backend's sample order

    def __post_init__(self) -> None:
        if len(self.premise_scores) != len(self.step.premises):
            raise ContractError("premise_scores must align with step premises")
        expected = one_step_score(self.premise_scores, self.step.s_e)
        if abs(expected - self.s_r_1deep) > 1e-12:
            raise ContractError(
                f"s_r_1deep={self.s_r_1deep} inconsistent with premise scores ({expected})"
            )


def _score_candidates(
    backend: Backend,
    hypothesis: Statement,
    qa: QAPair | None,
    context: Context | None,
    k: int,
    cfg: SearchConfig,
) -> list[ScoredCandidate]:
    decoding = DecodingParams(cfg.temperature, cfg.top_p, cfg.seed)
    threshold = cfg.filter_threshold
    out: list[ScoredCandidate] = []
    for i, premises in enumerate(backend.generate_premises(hypothesis, qa, context, k, decoding)):
        try:
            scores = tuple(backend.score_direct(p, qa, context) for p in premises)
            s_e = backend.score_entailment(premises, hypothesis, qa, context)
            step = EntailmentStep(premises, hypothesis, s_e)
        except ContractError as exc:
            log.warning("skipping malformed candidate for %r: %s", hypothesis.text, exc)
            continue
        filtered = s_e < threshold or any(s < threshold for s in scores)
        out.append(
            ScoredCandidate(step, scores, one_step_score(scores, s_e), filtered, i)
        )
    return out


def _best(candidates: list[ScoredCandidate]) -> ScoredCandidate | None:
    best: ScoredCandidate | None = None
    for cand in candidates:  # strict > keeps the earliest sample on ties
        if best is None or cand.s_r_1deep > best.s_r_1deep:
            best = cand
    return best


def generate_step(
    backend: Backend,
    hypothesis: Statement,
    qa: QAPair | None,
    context: Context | None,
    k: int,
    cfg: SearchConfig,
) -> ScoredCandidate | None:
    """Best surviving candidate step for a hypothesis, or None.

    All k candidates are scored; filtered ones cannot win. Ties on the
    one-deep score go to the earliest sample index.
    """
    candidates = _score_candidates(backend, hypothesis, qa, context, k, cfg)
    return _best([c for c in candidates if not c.filtered])


def _leaf(statement: Statement, s_d: float, forced: bool = False) -> ProofNode:
    return ProofNode(
        statement=statement,
        s_d=s_d,
        c_d=direct_confidence(s_d),
        s_r=0.0,
        c_r=0.0,
        overall=s_d,
        branch="direct",
        forced=forced,
    )


def prove(
    backend: Backend,
    hypothesis: Statement,
    cfg: SearchConfig,
    qa: QAPair | None = None,
    context: Context | None = None,
    depth_budget: int | None = None,
) -> ProofNode:
    """Search for the best proof of ``hypothesis`` within ``depth_budget`` steps.

    The root call consumes budget 1; a budget of zero means "leaf". With
    ``cfg.force_root_proof`` the root keeps its best step even when the
    filter or the score comparison would reject it: if every candidate was
    filtered, the highest-scoring one is used anyway and the node is marked
    ``forced``; a root with no candidates at all comes back as a forced leaf.
    Backend errors propagate to the caller, abandoning this hypothesis only.
    """
    budget = cfg.max_depth if depth_budget is None else depth_budget
    if not 1 <= budget <= cfg.max_depth:
        raise ContractError(
            f"depth_budget must be in [1, {cfg.max_depth}], got {budget}"
        )
    return _prove(backend, hypothesis, qa, context, cfg, budget, is_root=True)


def _prove(
    backend: Backend,
    statement: Statement,
    qa: QAPair | None,
    context: Context | None,
    cfg: SearchConfig,
    budget: int,
    is_root: bool,
) -> ProofNode:
    s_d = backend.score_direct(statement, qa, context)
    c_d = direct_confidence(s_d)
    if budget == 0:
        return _leaf(statement, s_d)

    root_force = is_root and cfg.force_root_proof
    k = cfg.k_root if is_root else cfg.k_inner
    candidates = _score_candidates(backend, statement, qa, context, k, cfg)
    chosen = _best([c for c in candidates if not c.filtered])
    forced = False
    if chosen is None and root_force and candidates:
        chosen = _best(candidates)  # filter overridden to honor the root guarantee
        forced = True
    if chosen is None:
        return _leaf(statement, s_d, forced=root_force)

    if not (chosen.step.s_e > c_d or root_force):
        return _leaf(statement, s_d)

    children = tuple(
        _prove(backend, premise, qa, context, cfg, budget - 1, is_root=False)
        for premise in chosen.step.premises
    )
    s_r = one_step_score([child.overall for child in children], chosen.step.s_e)
    if not root_force:
        _, branch = node_overall(s_d, s_r)
        if branch == "direct":  # expansion loses; subtree is discarded
            return _leaf(statement, s_d)
    return ProofNode(
        statement=statement,
        s_d=s_d,
        c_d=c_d,
        s_r=s_r,
        c_r=s_r,
        overall=s_r,
        branch="reasoned",
        step=chosen.step,
        children=children,
        forced=forced,
    )
