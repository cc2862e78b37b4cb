"""Shared fixtures: small hand-computed KBs and store factories."""

from __future__ import annotations

import pytest

from entail import KnowledgeBase, MockBackend

# Three-angle wire example: a two-premise step proving the paperclip claim,
# with premise truths 0.995 and entailment 0.998.
PAPERCLIP_KB = {
    "facts": [
        {"text": "A paperclip is made of metal.", "truth": 0.9},
        {"text": "A paperclip is made of steel.", "truth": 0.995},
        {"text": "Steel is a metal.", "truth": 0.995},
    ],
    "rules": [
        {
            "premises": ["A paperclip is made of steel.", "Steel is a metal."],
            "conclusion": "A paperclip is made of metal.",
            "entail": 0.998,
        }
    ],
}

# Teach-loop fixture: the believed-wrong claim wins until the copper
# correction lands in the high-confidence context bucket.
MAGNET_KB = {
    "facts": {
        "A magnet can attract a penny.": 0.5,
        "A magnet cannot attract a penny.": 0.5,
        "A penny is made of copper.": 0.95,
        "Copper is magnetic.": 0.9,
        "Copper is not magnetic.": 0.1,
    },
    "rules": [
        {
            "premises": ["A penny is made of copper.", "Copper is magnetic."],
            "conclusion": "A magnet can attract a penny.",
            "entail": 0.95,
        },
        {
            "premises": ["A penny is made of copper.", "Copper is not magnetic."],
            "conclusion": "A magnet cannot attract a penny.",
            "entail": 0.95,
        },
    ],
    "hypotheses": {
        "Can a magnet attract a penny?": {
            "yes": "A magnet can attract a penny.",
            "no": "A magnet cannot attract a penny.",
        }
    },
}

# 5-deep single-premise chain under the root; depth must cap at max_depth.
CHAIN_KB = {
    "facts": {
        "Chain claim 0 holds.": 0.5,
        "Chain claim 1 holds.": 0.55,
        "Chain claim 2 holds.": 0.55,
        "Chain claim 3 holds.": 0.95,
        "Chain claim 4 holds.": 0.95,
        "Chain claim 5 holds.": 0.99,
    },
    "rules": [
        {
            "premises": [f"Chain claim {i + 1} holds."],
            "conclusion": f"Chain claim {i} holds.",
            "entail": 0.98,
        }
        for i in range(5)
    ],
}

# 4-option question with hand-set direct truths; direct mode must pick 1.
OBQA_KB = {
    "facts": {
        "The switch uses plastic.": 0.2,
        "The switch uses metal.": 0.9,
        "The switch uses wood.": 0.4,
        "The switch uses glass.": 0.1,
    },
    "hypotheses": {
        "What does the switch use?": {
            "plastic": "The switch uses plastic.",
            "metal": "The switch uses metal.",
            "wood": "The switch uses wood.",
            "glass": "The switch uses glass.",
        }
    },
}

# Six candidate steps of known scores for one conclusion. One-deep scores:
#   r0 0.90*0.90*0.92        = 0.74520
#   r1 0.95*0.88             = 0.83600   <- argmax among unfiltered
#   r2 0.99*0.99*0.85        = 0.833085
#   r3 0.40*0.90*0.99        filtered (premise 0.40)
#   r4 0.98*0.45             filtered (entail 0.45)
#   r5 0.70*0.80*0.80        = 0.44800
SIX_KB = {
    "facts": {
        "The valve is open.": 0.5,
        "Gauge A reads high.": 0.9,
        "Gauge B reads high.": 0.9,
        "The pump is running.": 0.95,
        "Sensor one agrees.": 0.99,
        "Sensor two agrees.": 0.99,
        "The light is on.": 0.4,
        "The dial moved.": 0.9,
        "The seal is wet.": 0.98,
        "The pipe hums.": 0.7,
        "The meter ticks.": 0.8,
    },
    "rules": [
        {"premises": ["Gauge A reads high.", "Gauge B reads high."],
         "conclusion": "The valve is open.", "entail": 0.92},
        {"premises": ["The pump is running."],
         "conclusion": "The valve is open.", "entail": 0.88},
        {"premises": ["Sensor one agrees.", "Sensor two agrees."],
         "conclusion": "The valve is open.", "entail": 0.85},
        {"premises": ["The light is on.", "The dial moved."],
         "conclusion": "The valve is open.", "entail": 0.99},
        {"premises": ["The seal is wet."],
         "conclusion": "The valve is open.", "entail": 0.45},
        {"premises": ["The pipe hums.", "The meter ticks."],
         "conclusion": "The valve is open.", "entail": 0.80},
    ],
}


@pytest.fixture
def paperclip_backend() -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(PAPERCLIP_KB))


@pytest.fixture
def magnet_backend() -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(MAGNET_KB))


@pytest.fixture
def chain_backend() -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(CHAIN_KB))


@pytest.fixture
def obqa_backend() -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(OBQA_KB))


@pytest.fixture
def six_backend() -> MockBackend:
    return MockBackend(KnowledgeBase.from_dict(SIX_KB))
