"""Capture service response bodies as test fixtures.

Run from the repository root after installing the Python package:

    python3 frontend/scripts/capture_fixtures.py

Bodies are written verbatim (compact JSON exactly as served) because the
frontend's losslessness tests compare against them byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from conftest import CHAIN_KB, MAGNET_KB  # noqa: E402

from entail import KnowledgeBase, MemoryStore, MockBackend, ProofStore  # noqa: E402
from entail.server import create_app  # noqa: E402

FIXTURES = REPO / "frontend" / "tests" / "fixtures"

PAPERCLIP_KB = {
    "facts": {
        "A paperclip is made of metal.": 0.6,
        "A paperclip is not made of metal.": 0.05,
        "A paperclip is made of steel.": 0.995,
        "Steel is a metal.": 0.995,
    },
    "rules": [
        {
            "premises": ["A paperclip is made of steel.", "Steel is a metal."],
            "conclusion": "A paperclip is made of metal.",
            "entail": 0.998,
        }
    ],
    "hypotheses": {
        "Is a paperclip made of metal?": {
            "yes": "A paperclip is made of metal.",
            "no": "A paperclip is not made of metal.",
        }
    },
}

CHAIN_QUESTION_KB = {
    **CHAIN_KB,
    "facts": {**CHAIN_KB["facts"], "Chain claim 0 does not hold.": 0.1},
    "hypotheses": {
        "Does chain claim 0 hold?": {
            "yes": "Chain claim 0 holds.",
            "no": "Chain claim 0 does not hold.",
        }
    },
}


def client_for(raw_kb: dict, tmp: Path) -> TestClient:
    tmp.mkdir(parents=True, exist_ok=True)
    backend = MockBackend(KnowledgeBase.from_dict(raw_kb))
    app = create_app(
        backend, MemoryStore(tmp / "beliefs.jsonl"), ProofStore(tmp / "proofs.jsonl")
    )
    return TestClient(app)


def save(name: str, text: str) -> None:
    path = FIXTURES / name
    path.write_text(text)
    print(f"wrote {path.relative_to(REPO)} ({len(text)} bytes)")


def main() -> None:
    import tempfile

    FIXTURES.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix="fixture-capture-"))

    # paperclip: two-premise one-step proof, then a no-op correction
    client = client_for(PAPERCLIP_KB, scratch / "paperclip")
    ask = {
        "question": "Is a paperclip made of metal?",
        "options": ["yes", "no"],
        "use_memory": True,
    }
    save("paperclip_ask.json", client.post("/ask", json=ask).text)
    save(
        "paperclip_noop_belief.json",
        client.post(
            "/beliefs",
            json={"statement": "A paperclip is made of steel.", "asserted_true": True},
        ).text,
    )
    save("paperclip_noop_after.json", client.post("/ask", json=ask).text)

    # chain: a 3-deep proof for the collapsible-tree rendering tests
    client = client_for(CHAIN_QUESTION_KB, scratch / "chain")
    save(
        "chain_ask.json",
        client.post(
            "/ask",
            json={
                "question": "Does chain claim 0 hold?",
                "options": ["yes", "no"],
                "use_memory": True,
            },
        ).text,
    )

    # magnet: the full teach loop, before and after the copper correction
    client = client_for(MAGNET_KB, scratch / "magnet")
    ask = {
        "question": "Can a magnet attract a penny?",
        "options": ["yes", "no"],
        "use_memory": True,
    }
    save("magnet_before.json", client.post("/ask", json=ask).text)
    save(
        "magnet_belief.json",
        client.post(
            "/beliefs", json={"statement": "Copper is magnetic.", "asserted_true": False}
        ).text,
    )
    save("magnet_after.json", client.post("/ask", json=ask).text)
    save(
        "magnet_second_belief.json",
        client.post(
            "/beliefs",
            json={"statement": "A magnet attracts iron.", "asserted_true": True},
        ).text,
    )
    save("magnet_beliefs_list.json", client.get("/beliefs").text)
    save("magnet_health.json", client.get("/health").text)


if __name__ == "__main__":
    main()
