"""Relevance classifier contract plus two backends.

``LexicalBaseline`` is a deterministic stand-in for a trained sequence-pair
model: it scores a pair by claim coverage, the fraction of distinct claim
words that also occur in the piece. ``RemoteClassifier`` speaks the
``/v1/classify`` wire protocol of an inference sidecar. Both return one
result per input pair, order-aligned with the input, and both derive the
predicted label client-side from ``prob_label1`` so thresholding and the
label-0/label-1 complement rule live in exactly one place.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import requests

from . import _kernels
from .errors import ClassifierError, ProtocolError, TransportError
from .pairs import PairInput

DECISION_THRESHOLD = 0.5

_STRIP_CHARS = string.punctuation


def label_from_prob(prob_label1: float) -> int:
    return 1 if prob_label1 >= DECISION_THRESHOLD else 0


@dataclass(frozen=True)
class ClassificationResult:
    """Per-pair label-1 probability and the label derived from it.

    The label-0 probability is never stored; it is ``1 - prob_label1``.
    """

    pair_id: str
    prob_label1: float
    predicted_label: int

    def __post_init__(self):
        if not 0.0 <= self.prob_label1 <= 1.0:
            raise ClassifierError(
                f"pair {self.pair_id!r}: prob_label1 {self.prob_label1} "
                "outside [0, 1]"
            )
        if self.predicted_label != label_from_prob(self.prob_label1):
            raise ClassifierError(
                f"pair {self.pair_id!r}: label {self.predicted_label} "
                f"inconsistent with prob_label1 {self.prob_label1}"
            )

    @classmethod
    def from_prob(cls, pair_id: str, prob_label1: float) -> "ClassificationResult":
        return cls(pair_id, prob_label1, label_from_prob(prob_label1))


def normalize_words(text: str) -> list[str]:
    """Lowercased words with leading/trailing punctuation stripped."""
    words = []
    for raw in text.split():
        word = raw.lower().strip(_STRIP_CHARS)
        if word:
            words.append(word)
    return words


def baseline_probability(claim_text: str, piece_text: str) -> float:
    """Claim coverage: |claim words ∩ piece words| / |claim words|.

    Pure-Python reference used directly for single pairs and as the oracle
    for the packed batch path.
    """
    claim = set(normalize_words(claim_text))
    if not claim:
        raise ClassifierError("claim has no words after normalization")
    piece = set(normalize_words(piece_text))
    return len(claim & piece) / len(claim)


class LexicalBaseline:
    """Deterministic lexical backend; safe to share across threads."""

    kind = "lexical_baseline"

    def classify(self, pairs: Sequence[PairInput]) -> list[ClassificationResult]:
        probs = self._coverage(pairs)
        return [
            ClassificationResult.from_prob(pair.pair_id, prob)
            for pair, prob in zip(pairs, probs)
        ]

    def _coverage(self, pairs: Sequence[PairInput]) -> np.ndarray:
        # Intern normalized words once per distinct text, then hand packed
        # id arrays to the coverage kernel.
        vocab: dict[str, int] = {}
        id_cache: dict[str, np.ndarray] = {}

        def ids_for(text: str) -> np.ndarray:
            got = id_cache.get(text)
            if got is None:
                words = set(normalize_words(text))
                got = np.sort(np.fromiter(
                    (vocab.setdefault(w, len(vocab)) for w in words),
                    dtype=np.int64, count=len(words),
                ))
                id_cache[text] = got
            return got

        claim_rows = []
        piece_rows = []
        for pair in pairs:
            claim_ids = ids_for(pair.claim_text)
            if claim_ids.size == 0:
                raise ClassifierError(
                    f"pair {pair.pair_id!r}: claim has no words after normalization"
                )
            claim_rows.append(claim_ids)
            piece_rows.append(ids_for(pair.piece_text))
        return _kernels.coverage(*_pack(claim_rows), *_pack(piece_rows))


def _pack(rows: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(rows) + 1, dtype=np.int64)
    if rows:
        offsets[1:] = np.cumsum([r.size for r in rows])
        values = np.concatenate(rows)
    else:
        values = np.zeros(0, dtype=np.int64)
    return values, offsets


class RemoteClassifier:
    """Client for the sidecar wire protocol.

    POST ``{endpoint}/v1/classify`` with ``{"pairs": [{"id", "claim",
    "piece"}]}``; the response carries ``prob_label1`` per id. Each batch is
    retried once, then the whole call fails carrying the unscored pair ids
    and every result completed so far.
    """

    kind = "remote"

    def __init__(self, endpoint: str, batch_size: int = 32,
                 timeout: float = 30.0, session: requests.Session | None = None):
        if batch_size < 1:
            raise ClassifierError(f"batch_size must be >= 1, got {batch_size}")
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self._session = session or requests.Session()

    def classify(self, pairs: Sequence[PairInput]) -> list[ClassificationResult]:
        results: list[ClassificationResult] = []
        for start in range(0, len(pairs), self.batch_size):
            batch = pairs[start:start + self.batch_size]
            try:
                results.extend(self._classify_batch(batch))
            except TransportError as exc:
                unscored = [p.pair_id for p in pairs[start:]]
                raise TransportError(
                    str(exc), pair_ids=unscored, partial_results=results,
                ) from exc
        return results

    def health(self) -> dict:
        try:
            response = self._session.get(f"{self.endpoint}/v1/health",
                                         timeout=self.timeout)
            response.raise_for_status()
            return response.json()
        except (requests.RequestException, ValueError) as exc:
            raise TransportError(f"health check failed: {exc}") from exc

    def _classify_batch(self, batch: Sequence[PairInput]) -> list[ClassificationResult]:
        payload = {"pairs": [
            {"id": p.pair_id, "claim": p.claim_text, "piece": p.piece_text}
            for p in batch
        ]}
        body = self._post_with_retry(payload, [p.pair_id for p in batch])
        return self._parse_results(body, batch)

    def _post_with_retry(self, payload: dict, pair_ids: list[str]) -> dict:
        last_error: Exception | None = None
        for _ in range(2):
            try:
                response = self._session.post(
                    f"{self.endpoint}/v1/classify", json=payload,
                    timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                last_error = ClassifierError(
                    f"HTTP {response.status_code}: {response.text[:200]}"
                )
                continue
            try:
                return response.json()
            except ValueError as exc:
                raise ProtocolError(f"response is not JSON: {exc}") from exc
        raise TransportError(f"batch failed after retry: {last_error}",
                             pair_ids=pair_ids)

    @staticmethod
    def _parse_results(body: dict, batch: Sequence[PairInput]) -> list[ClassificationResult]:
        if not isinstance(body, dict) or "results" not in body:
            raise ProtocolError("response body lacks 'results'")
        by_id: dict[str, float] = {}
        for item in body["results"]:
            if not isinstance(item, dict) or "id" not in item or "prob_label1" not in item:
                raise ProtocolError(f"malformed result item: {item!r}")
            pair_id = item["id"]
            prob = item["prob_label1"]
            if pair_id in by_id:
                raise ProtocolError(f"duplicate result for pair {pair_id!r}")
            if not isinstance(prob, (int, float)) or isinstance(prob, bool) \
                    or not 0.0 <= float(prob) <= 1.0:
                raise ProtocolError(
                    f"pair {pair_id!r}: prob_label1 {prob!r} is not in [0, 1]"
                )
            by_id[pair_id] = float(prob)
        missing = [p.pair_id for p in batch if p.pair_id not in by_id]
        if missing:
            raise ProtocolError(f"response missing pair ids: {missing[:5]}")
        if len(by_id) != len(batch):
            extras = set(by_id) - {p.pair_id for p in batch}
            raise ProtocolError(f"response has unknown pair ids: {sorted(extras)[:5]}")
        # Input order is restored here no matter how the server ordered them.
        return [ClassificationResult.from_prob(p.pair_id, by_id[p.pair_id])
                for p in batch]


Backend = LexicalBaseline | RemoteClassifier


def classify_batch(pairs: Sequence[PairInput], backend: Backend) -> list[ClassificationResult]:
    """One result per pair, order-aligned with the input."""
    pairs = list(pairs)
    if not pairs:
        raise ClassifierError("classify_batch needs at least one pair")
    return backend.classify(pairs)
