"""Proof-search tests: candidate ranking, the root guarantee, depth caps,
retention pruning, determinism, and spot checks against the replica oracle."""

from __future__ import annotations

import pytest

import kbgen
import oracles
from entail import (
    ContractError,
    EntailmentStep,
    KnowledgeBase,
    MockBackend,
    SearchConfig,
    Statement,
    generate_step,
    proof_to_dict,
    prove,
)
from entail.search import ScoredCandidate

VALVE = Statement("The valve is open.")
CHAIN_ROOT = Statement("Chain claim 0 holds.")


def backend_of(raw: dict) -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(raw))


class TestGenerateStep:
    def test_six_candidates_argmax(self, six_backend):
        cand = generate_step(six_backend, VALVE, None, None, 6, SearchConfig())
        assert cand is not None
        assert cand.step.premises == (Statement("The pump is running."),)
        assert cand.step.s_e == 0.88
        assert cand.premise_scores == (0.95,)
        assert cand.s_r_1deep == 0.836
        assert cand.filtered is False

    def test_filtered_candidates_cannot_win(self, six_backend):
        # the 0.99-entail rule ranks first in sampling but one premise
        # scores 0.40, so it must never be chosen
        cand = generate_step(six_backend, VALVE, None, None, 6, SearchConfig())
        assert cand.step.s_e != 0.99

    def test_low_k_narrows_the_pool(self, six_backend):
        # top-2 by entail are the 0.99 rule (filtered) and the gauge pair
        cand = generate_step(six_backend, VALVE, None, None, 2, SearchConfig())
        assert cand.step.premises == (
            Statement("Gauge A reads high."),
            Statement("Gauge B reads high."),
        )
        assert cand.s_r_1deep == pytest.approx(0.7452, abs=1e-12)

    def test_none_when_all_filtered(self):
        backend = backend_of(
            {
                "facts": {"The claim holds.": 0.5, "Weak support holds.": 0.8},
                "rules": [
                    {
                        "premises": ["Weak support holds."],
                        "conclusion": "The claim holds.",
                        "entail": 0.3,
                    }
                ],
            }
        )
        assert generate_step(backend, Statement("The claim holds."), None, None, 6, SearchConfig()) is None

    def test_none_without_candidates(self, six_backend):
        assert generate_step(six_backend, Statement("Nothing concludes this."), None, None, 6, SearchConfig()) is None

    def test_one_deep_tie_keeps_earliest_sample(self):
        # 0.8*0.9 == 0.9*0.8; the higher-entail rule samples first and wins
        backend = backend_of(
            {
                "facts": {
                    "The claim holds.": 0.5,
                    "First support holds.": 0.8,
                    "Second support holds.": 0.9,
                },
                "rules": [
                    {"premises": ["First support holds."], "conclusion": "The claim holds.", "entail": 0.9},
                    {"premises": ["Second support holds."], "conclusion": "The claim holds.", "entail": 0.8},
                ],
            }
        )
        cand = generate_step(backend, Statement("The claim holds."), None, None, 6, SearchConfig())
        assert cand.sample_index == 0
        assert cand.step.premises == (Statement("First support holds."),)

    def test_candidate_consistency_enforced(self):
        step = EntailmentStep((Statement("A fact."),), Statement("A claim."), 0.9)
        with pytest.raises(ContractError, match="align"):
            ScoredCandidate(step, (0.9, 0.8), 0.81, False, 0)
        with pytest.raises(ContractError, match="inconsistent"):
            ScoredCandidate(step, (0.9,), 0.5, False, 0)


class TestProveBasics:
    def test_six_candidate_proof(self, six_backend):
        proof = prove(six_backend, VALVE, SearchConfig())
        assert proof.branch == "reasoned"
        assert proof.forced is False
        assert proof.step.premises == (Statement("The pump is running."),)
        assert proof.s_r == 0.836
        assert proof.overall == 0.836
        assert proof.c_r == 0.836
        assert [c.overall for c in proof.children] == [0.95]

    def test_root_always_reasons_even_when_weaker(self):
        # certain fact, mediocre rule: the comparison s_e > c_d fails but
        # the root guarantee keeps the expansion anyway
        backend = backend_of(
            {
                "facts": {"The claim holds.": 1.0, "Support fact holds.": 0.9},
                "rules": [
                    {"premises": ["Support fact holds."], "conclusion": "The claim holds.", "entail": 0.9}
                ],
            }
        )
        proof = prove(backend, Statement("The claim holds."), SearchConfig())
        assert proof.branch == "reasoned"
        assert proof.depth() == 1
        assert proof.s_d == 1.0
        assert proof.overall == 0.81

    def test_unforced_root_keeps_certain_leaf(self):
        backend = backend_of(
            {
                "facts": {"The claim holds.": 1.0, "Support fact holds.": 0.9},
                "rules": [
                    {"premises": ["Support fact holds."], "conclusion": "The claim holds.", "entail": 0.9}
                ],
            }
        )
        cfg = SearchConfig(force_root_proof=False)
        proof = prove(backend, Statement("The claim holds."), cfg)
        assert proof.branch == "direct"
        assert proof.children == ()
        assert proof.overall == 1.0

    def test_force_flag_is_a_no_op_when_reasoning_wins(self, chain_backend):
        forced = prove(chain_backend, CHAIN_ROOT, SearchConfig())
        unforced = prove(chain_backend, CHAIN_ROOT, SearchConfig(force_root_proof=False))
        assert proof_to_dict(forced) == proof_to_dict(unforced)


class TestChainDepth:
    def test_depth_caps_at_max_depth(self, chain_backend):
        proof = prove(chain_backend, CHAIN_ROOT, SearchConfig())
        assert proof.depth() == 3
        texts = [node.statement.text for node in proof.walk()]
        assert texts == [f"Chain claim {i} holds." for i in range(4)]
        assert proof.overall == pytest.approx(0.8941324, abs=1e-9)

    def test_deepest_node_is_an_untouched_leaf(self, chain_backend):
        proof = prove(chain_backend, CHAIN_ROOT, SearchConfig())
        leaf = list(proof.walk())[-1]
        assert leaf.statement == Statement("Chain claim 3 holds.")
        assert leaf.branch == "direct"
        assert leaf.children == ()
        assert leaf.overall == 0.95

    @pytest.mark.parametrize(
        "budget,depth,overall",
        [
            (1, 1, 0.539),
            # at budget 2 the middle expansion scores 0.539 < its own 0.55,
            # so retention pruning collapses the tree back to one step
            (2, 1, 0.539),
            (3, 3, 0.8941324),
        ],
    )
    def test_budget_controls_depth(self, chain_backend, budget, depth, overall):
        proof = prove(chain_backend, CHAIN_ROOT, SearchConfig(), depth_budget=budget)
        assert proof.depth() == depth
        assert proof.overall == pytest.approx(overall, abs=1e-9)

    def test_budget_two_kept_when_the_deep_leaf_is_strong(self):
        raw = {
            "facts": {
                "Short chain claim 0 holds.": 0.5,
                "Short chain claim 1 holds.": 0.55,
                "Short chain claim 2 holds.": 0.95,
            },
            "rules": [
                {"premises": ["Short chain claim 1 holds."],
                 "conclusion": "Short chain claim 0 holds.", "entail": 0.98},
                {"premises": ["Short chain claim 2 holds."],
                 "conclusion": "Short chain claim 1 holds.", "entail": 0.98},
            ],
        }
        proof = prove(
            backend_of(raw), Statement("Short chain claim 0 holds."), SearchConfig(), depth_budget=2
        )
        assert proof.depth() == 2
        assert proof.overall == pytest.approx(0.91238, abs=1e-9)

    @pytest.mark.parametrize("budget", [0, -1, 4])
    def test_budget_out_of_range(self, chain_backend, budget):
        with pytest.raises(ContractError, match="depth_budget"):
            prove(chain_backend, CHAIN_ROOT, SearchConfig(), depth_budget=budget)


class TestForcedRoot:
    WEAK = {
        "facts": {"The claim holds.": 0.5, "Weak support holds.": 0.8},
        "rules": [
            {"premises": ["Weak support holds."], "conclusion": "The claim holds.", "entail": 0.3}
        ],
    }

    def test_all_filtered_falls_back_to_best_candidate(self):
        proof = prove(backend_of(self.WEAK), Statement("The claim holds."), SearchConfig())
        assert proof.branch == "reasoned"
        assert proof.forced is True
        assert proof.step.s_e == 0.3
        assert proof.overall == 0.24

    def test_forced_fallback_still_takes_the_best_filtered(self):
        raw = {
            "facts": {
                "The claim holds.": 0.5,
                "Weak support holds.": 0.8,
                "Weaker support holds.": 0.6,
            },
            "rules": [
                {"premises": ["Weak support holds."], "conclusion": "The claim holds.", "entail": 0.3},
                {"premises": ["Weaker support holds."], "conclusion": "The claim holds.", "entail": 0.35},
            ],
        }
        proof = prove(backend_of(raw), Statement("The claim holds."), SearchConfig())
        assert proof.forced is True
        # 0.8*0.3 = 0.24 beats 0.6*0.35 = 0.21
        assert proof.step.premises == (Statement("Weak support holds."),)

    def test_unforced_all_filtered_is_a_plain_leaf(self):
        cfg = SearchConfig(force_root_proof=False)
        proof = prove(backend_of(self.WEAK), Statement("The claim holds."), cfg)
        assert proof.branch == "direct"
        assert proof.forced is False
        assert proof.overall == 0.5

    def test_no_candidates_gives_a_forced_leaf(self):
        backend = backend_of({"facts": {"The claim holds.": 0.5}})
        proof = prove(backend, Statement("The claim holds."), SearchConfig())
        assert proof.branch == "direct"
        assert proof.forced is True
        assert proof.children == ()
        assert proof.overall == 0.5

    def test_no_candidates_unforced_leaf_is_unmarked(self):
        backend = backend_of({"facts": {"The claim holds.": 0.5}})
        cfg = SearchConfig(force_root_proof=False)
        proof = prove(backend, Statement("The claim holds."), cfg)
        assert proof.forced is False


class TestInnerNodes:
    def test_inner_all_filtered_has_no_fallback(self):
        raw = {
            "facts": {
                "The claim holds.": 0.5,
                "Middle support holds.": 0.8,
                "Weak support holds.": 0.9,
            },
            "rules": [
                {"premises": ["Middle support holds."], "conclusion": "The claim holds.", "entail": 0.9},
                {"premises": ["Weak support holds."], "conclusion": "Middle support holds.", "entail": 0.3},
            ],
        }
        proof = prove(backend_of(raw), Statement("The claim holds."), SearchConfig())
        middle = proof.children[0]
        assert middle.statement == Statement("Middle support holds.")
        assert middle.branch == "direct"
        assert middle.forced is False
        assert middle.children == ()

    def test_inner_expansion_that_loses_is_discarded(self):
        # middle: s_d 0.9, expansion 0.6*0.95 = 0.57 loses, subtree dropped
        raw = {
            "facts": {
                "The claim holds.": 0.5,
                "Middle support holds.": 0.9,
                "Deep support holds.": 0.6,
            },
            "rules": [
                {"premises": ["Middle support holds."], "conclusion": "The claim holds.", "entail": 0.92},
                {"premises": ["Deep support holds."], "conclusion": "Middle support holds.", "entail": 0.95},
            ],
        }
        proof = prove(backend_of(raw), Statement("The claim holds."), SearchConfig())
        middle = proof.children[0]
        assert middle.branch == "direct"
        assert middle.children == ()
        assert middle.overall == 0.9
        assert proof.overall == pytest.approx(0.9 * 0.92, abs=1e-12)

    def test_inner_gate_rejects_low_entailment(self):
        # middle c_d 0.9 blocks a 0.85-entail step outright
        raw = {
            "facts": {
                "The claim holds.": 0.5,
                "Middle support holds.": 0.9,
                "Deep support holds.": 0.99,
            },
            "rules": [
                {"premises": ["Middle support holds."], "conclusion": "The claim holds.", "entail": 0.92},
                {"premises": ["Deep support holds."], "conclusion": "Middle support holds.", "entail": 0.85},
            ],
        }
        proof = prove(backend_of(raw), Statement("The claim holds."), SearchConfig())
        assert proof.children[0].branch == "direct"

    def test_inner_expansion_that_wins_is_kept(self, chain_backend):
        proof = prove(chain_backend, CHAIN_ROOT, SearchConfig())
        inner = proof.children[0]
        assert inner.branch == "reasoned"
        assert inner.overall == 0.91238
        assert inner.forced is False


class TestDeterminism:
    def test_repeated_proofs_are_identical(self, six_backend, chain_backend):
        for backend, root in ((six_backend, VALVE), (chain_backend, CHAIN_ROOT)):
            first = proof_to_dict(prove(backend, root, SearchConfig()))
            second = proof_to_dict(prove(backend, root, SearchConfig()))
            assert first == second

    def test_fresh_backend_replays_bit_identically(self):
        raw, hypothesis = kbgen.random_kb(3)
        cfg = SearchConfig(k_root=16, k_inner=16)
        first = proof_to_dict(prove(backend_of(raw), Statement(hypothesis), cfg))
        second = proof_to_dict(prove(backend_of(raw), Statement(hypothesis), cfg))
        assert first == second


class TestAgainstOracles:
    def test_greedy_commitment_can_lose_to_global_optimum(self):
        # the 1-deep argmax at the root picks the unimprovable 0.891 step,
        # while the other branch deepens to 0.931095
        raw = {
            "facts": {
                "The claim holds.": 0.5,
                "Quick support holds.": 0.9,
                "Slow support holds.": 0.6,
                "Deep support holds.": 0.99,
            },
            "rules": [
                {"premises": ["Quick support holds."], "conclusion": "The claim holds.", "entail": 0.99},
                {"premises": ["Slow support holds."], "conclusion": "The claim holds.", "entail": 0.95},
                {"premises": ["Deep support holds."], "conclusion": "Slow support holds.", "entail": 0.99},
            ],
        }
        proof = prove(backend_of(raw), Statement("The claim holds."), SearchConfig(k_root=6, k_inner=6))
        assert proof.overall == 0.891
        kb = oracles.OracleKB.from_raw(raw)
        assert oracles.replica_root_score(kb, "The claim holds.", 3, k_root=6, k_inner=6) == 0.891
        best = oracles.global_best(kb, "The claim holds.", 3)
        assert best == pytest.approx(0.931095, abs=1e-9)
        assert best > proof.overall

    @pytest.mark.parametrize("seed", range(20))
    def test_replica_agreement_spot_check(self, seed):
        raw, hypothesis = kbgen.random_kb(seed)
        kb = oracles.OracleKB.from_raw(raw)
        for depth in (1, 2, 3):
            cfg = SearchConfig(max_depth=depth, k_root=16, k_inner=16)
            engine = prove(backend_of(raw), Statement(hypothesis), cfg).overall
            replica = oracles.replica_root_score(kb, hypothesis, depth, k_root=16, k_inner=16)
            assert engine == pytest.approx(replica, abs=1e-9)
