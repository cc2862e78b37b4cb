"""HTTP client for a remote multi-angle model service.

Transport envelope: ``POST {base_url}/infer`` with JSON

    {"input": <wire string>, "mode": "generate" | "score",
     "n_samples": int, "greedy": bool,
     "temperature": float, "top_p": float, "seed": int}

answered with ``{"outputs": [str, ...]}`` for generation or
``{"score": float}`` for scoring. Transport errors and 5xx responses are
retried with exponential backoff; concurrent requests are bounded by a
semaphore. Unparseable generation samples are dropped (counted, warned),
never raised.
"""

from __future__ import annotations

import logging
import threading
import time

import httpx

from entail.backend import DecodingParams
from entail.backend import wire
from entail.core import Context, QAPair, Statement
from entail.errors import BackendError, BackendUnavailableError, ContractError, OpenEndedUnsupportedError

log = logging.getLogger(__name__)

_RETRYABLE_STATUS = (502, 503, 504)


class RemoteBackend:
    def __init__(
        self,
        base_url: str,
        *,
        max_concurrency: int = 4,
        retries: int = 3,
        backoff_s: float = 0.25,
        timeout_s: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if retries < 1:
            raise ContractError(f"retries must be >= 1, got {retries}")
        if max_concurrency < 1:
            raise ContractError(f"max_concurrency must be >= 1, got {max_concurrency}")
        self.base_url = base_url.rstrip("/")
        self.max_concurrency = max_concurrency
        self.retries = retries
        self.backoff_s = backoff_s
        self.dropped_samples = 0  # running count of unparseable generations
        self._semaphore = threading.Semaphore(max_concurrency)
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def close(self) -> None:
        self._client.close()

    # -- transport -------------------------------------------------------

    def _post(self, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    response = self._client.post(f"{self.base_url}/infer", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                log.warning("backend transport error (attempt %d): %s", attempt + 1, exc)
                continue
            if response.status_code in _RETRYABLE_STATUS:
                last_error = BackendError(f"backend returned {response.status_code}")
                log.warning("backend %d (attempt %d)", response.status_code, attempt + 1)
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"backend returned {response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise BackendError(f"backend sent invalid JSON: {exc}") from exc
        raise BackendUnavailableError(
            f"backend unreachable after {self.retries} attempts: {last_error}"
        )

    def _generate(self, input_text: str, n_samples: int, decoding: DecodingParams,
                  greedy: bool = False) -> list[str]:
        body = self._post({
            "input": input_text,
            "mode": "generate",
            "n_samples": n_samples,
            "greedy": greedy,
            "temperature": decoding.temperature,
            "top_p": decoding.top_p,
            "seed": decoding.seed,
        })
        outputs = body.get("outputs")
        if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
            raise BackendError(f"malformed generate response: {body!r}")
        return outputs

    def _score(self, input_text: str, decoding: DecodingParams) -> float:
        body = self._post({
            "input": input_text,
            "mode": "score",
            "n_samples": 1,
            "greedy": True,
            "temperature": decoding.temperature,
            "top_p": decoding.top_p,
            "seed": decoding.seed,
        })
        score = body.get("score")
        if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
            raise BackendError(f"malformed score response: {body!r}")
        return float(score)

    # -- angles ----------------------------------------------------------

    def generate_premises(
        self,
        hypothesis: Statement,
        qa: QAPair | None,
        context: Context | None,
        k: int,
        decoding: DecodingParams,
    ) -> list[tuple[Statement, ...]]:
        """k sampled generations plus one greedy generation, parsed,
        deduplicated by premise key set and truncated to k."""
        prompt = wire.serialize_premises_input(hypothesis, qa, context)
        raw = self._generate(prompt, 1, decoding, greedy=True)
        raw += self._generate(prompt, k, decoding)
        seen: set[tuple[str, ...]] = set()
        out: list[tuple[Statement, ...]] = []
        for sample in raw:
            try:
                premises = wire.parse_premises_output(sample)
            except ContractError:
                self.dropped_samples += 1
                log.warning("dropping unparseable premise sample: %r", sample[:120])
                continue
            if any(p.normalized_key == hypothesis.normalized_key for p in premises):
                self.dropped_samples += 1
                log.warning("dropping circular premise sample for %r", hypothesis.text)
                continue
            key_set = tuple(sorted(p.normalized_key for p in premises))
            if key_set in seen:
                continue
            seen.add(key_set)
            out.append(premises)
            if len(out) == k:
                break
        return out

    def score_direct(
        self, statement: Statement, qa: QAPair | None = None, context: Context | None = None
    ) -> float:
        return self._score(wire.serialize_direct_input(statement, qa, context), DecodingParams())

    def score_entailment(
        self,
        premises: tuple[Statement, ...],
        conclusion: Statement,
        qa: QAPair | None = None,
        context: Context | None = None,
    ) -> float:
        prompt = wire.serialize_entailment_input(conclusion, premises, qa, context)
        return self._score(prompt, DecodingParams())

    def hypothesize(self, qa: QAPair) -> Statement:
        outputs = self._generate(wire.serialize_hypothesize_input(qa), 1, DecodingParams(), greedy=True)
        if not outputs:
            raise BackendError(f"empty declarativization response for {qa.question!r}")
        return Statement(outputs[0])

    def generate_candidates(self, question: str, n: int, decoding: DecodingParams) -> list[str]:
        outputs = self._generate(wire.serialize_candidates_input(question), n, decoding)
        seen: set[str] = set()
        out: list[str] = []
        for sample in outputs:
            text = sample.strip()
            if not text:
                self.dropped_samples += 1
                continue
            key = Statement(text).normalized_key
            if key in seen:
                continue
            seen.add(key)
            out.append(text)
            if len(out) == n:
                break
        if not out:
            raise OpenEndedUnsupportedError(f"no usable candidates for {question!r}")
        return out

    def negate(self, statement: Statement) -> Statement:
        outputs = self._generate(wire.serialize_negate_input(statement), 1, DecodingParams(), greedy=True)
        if not outputs:
            raise BackendError(f"empty negation response for {statement.text!r}")
        return Statement(outputs[0])
