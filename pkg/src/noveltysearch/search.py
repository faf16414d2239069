"""Novelty search: one claim of interest ranked against a patent group.

The claim is paired with every description piece of every patent in the
target group, the backend scores each pair, and per-patent densities order
the result. Patent provenance is tracked on every piece so each probability
joins back to exactly one (patent, piece).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .classify import Backend, classify_batch
from .corpus import Corpus, CorpusGroup, iter_jsonl
from .errors import SearchError, TransportError
from .pairs import AssemblyConfig, PairInput, assemble
from .scoring import MODES, Ranking, rank, score_patents
from .slicer import SliceConfig, slice_patent


@dataclass(frozen=True)
class SearchJob:
    corpus: Corpus
    target_group: CorpusGroup
    claim_of_interest: str
    slice_config: SliceConfig
    backend: Backend
    assembly_config: AssemblyConfig = AssemblyConfig()
    mode: str = "label"
    claim_source_id: str | None = None
    exclude_source: bool = False

    def __post_init__(self):
        if not self.claim_of_interest.split():
            raise SearchError("claim_of_interest must be non-empty")
        if not self.target_group.patent_ids:
            raise SearchError("target group is empty")
        if self.mode not in MODES:
            raise SearchError(f"unknown scoring mode {self.mode!r}")
        missing = [pid for pid in self.target_group.patent_ids
                   if pid not in self.corpus]
        if missing:
            raise SearchError(
                f"target group id {missing[0]!r} not found in corpus"
            )

    def target_ids(self) -> list[str]:
        ids = list(self.target_group.patent_ids)
        if self.exclude_source and self.claim_source_id is not None:
            ids = [pid for pid in ids if pid != self.claim_source_id]
            if not ids:
                raise SearchError("excluding the source patent emptied the group")
        return ids


@dataclass(frozen=True)
class PieceResult:
    """Audit row: one classified piece with full provenance."""

    pair_id: str
    patent_id: str
    piece_index: int
    prob_label1: float
    predicted_label: int


@dataclass(frozen=True)
class SearchOutcome:
    ranking: Ranking
    audit: tuple[PieceResult, ...]


def build_query_inputs(job: SearchJob) -> list[PairInput]:
    """One unlabeled query pair per (patent, piece) of the target group.

    All pairs carry the same claim text, already fitted to the word budget
    (piece tail truncation only).
    """
    query_pairs = []
    for pid in job.target_ids():
        pieces = slice_patent(job.corpus[pid], job.slice_config)
        if not pieces:
            warnings.warn(f"patent {pid!r} produced no description pieces; "
                          "it will not appear in the ranking")
            continue
        for piece in pieces:
            raw = PairInput(
                pair_id=f"query:{pid}:{piece.piece_index}",
                claim_patent_id=job.claim_source_id or "",
                piece_patent_id=pid,
                piece_index=piece.piece_index,
                claim_text=job.claim_of_interest,
                piece_text=piece.text,
                label=None,
                purpose="search",
            )
            query_pairs.append(assemble(raw, job.assembly_config).pair)
    return query_pairs


def run_search(job: SearchJob) -> SearchOutcome:
    """Classify all query pairs and rank the group's patents.

    Any unscored pair aborts the whole ranking: a SearchError carries the
    unscored ids plus audit rows for whatever did complete.
    """
    query_pairs = build_query_inputs(job)
    if not query_pairs:
        raise SearchError("target group yielded no query pairs")
    by_id = {p.pair_id: p for p in query_pairs}
    try:
        results = classify_batch(query_pairs, job.backend)
    except TransportError as exc:
        partial = [
            _audit_row(by_id[r.pair_id], r) for r in exc.partial_results
        ]
        raise SearchError(
            f"search aborted, {len(exc.pair_ids)} of {len(query_pairs)} "
            f"pairs unscored: {exc}",
            unscored_pair_ids=exc.pair_ids,
            partial_audit=partial,
        ) from exc
    audit = tuple(_audit_row(by_id[r.pair_id], r) for r in results)
    scores = score_patents(results, query_pairs, mode=job.mode)
    ranking = rank(scores, mode=job.mode,
                   query_label=job.claim_source_id or "claim_of_interest")
    return SearchOutcome(ranking=ranking, audit=audit)


def _audit_row(pair: PairInput, result) -> PieceResult:
    return PieceResult(
        pair_id=result.pair_id,
        patent_id=pair.piece_patent_id,
        piece_index=pair.piece_index,
        prob_label1=result.prob_label1,
        predicted_label=result.predicted_label,
    )


def position_of(ranking: Ranking, patent_id: str) -> int | None:
    """1-based rank of ``patent_id``, or None when it was not ranked."""
    return ranking.positions().get(patent_id)


def ranking_from_audit(rows: Sequence[PieceResult], mode: str,
                       query_label: str = "") -> Ranking:
    """Re-rank an audit table under either scoring mode, no re-classification."""
    from .classify import ClassificationResult

    results = [ClassificationResult(r.pair_id, r.prob_label1, r.predicted_label)
               for r in rows]
    provenance = {r.pair_id: (r.patent_id, r.piece_index) for r in rows}
    return rank(score_patents(results, provenance, mode=mode), mode=mode,
                query_label=query_label)


def write_audit(rows: Iterable[PieceResult], path: str | Path,
                meta: Mapping | None = None, complete: bool = True) -> None:
    header = dict(meta or {})
    header["complete"] = complete
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"_meta": header}, sort_keys=True,
                            ensure_ascii=False) + "\n")
        for row in rows:
            fh.write(json.dumps({
                "pair_id": row.pair_id,
                "patent_id": row.patent_id,
                "piece_index": row.piece_index,
                "prob_label1": row.prob_label1,
                "predicted_label": row.predicted_label,
            }, ensure_ascii=False) + "\n")


def read_audit(path: str | Path) -> list[PieceResult]:
    return [
        PieceResult(
            pair_id=r["pair_id"],
            patent_id=r["patent_id"],
            piece_index=r["piece_index"],
            prob_label1=r["prob_label1"],
            predicted_label=r["predicted_label"],
        )
        for r in iter_jsonl(path)
    ]
