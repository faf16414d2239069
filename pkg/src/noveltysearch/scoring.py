"""Aggregate per-pair results into per-patent relevance scores and rank.

Both scores are densities over a patent's classified pieces, which is what
suppresses single stray relevant labels in long documents:

    score_label   = n_label1 / (n_label0 + n_label1)
    score_sigmoid = sum of prob_label1 over all pieces / (n_label0 + n_label1)

The sigmoid variant adds every label-1 probability, including those below
the decision threshold. Both are always computed; the mode only selects
which one orders the ranking.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .classify import ClassificationResult
from .errors import ScoringError
from .pairs import PairInput

MODES = ("label", "sigmoid")

RANKING_COLUMNS = ("rank", "patent_id", "score_label", "score_sigmoid",
                   "n_label1", "n_pieces")


@dataclass(frozen=True)
class PatentScore:
    patent_id: str
    n_label1: int
    n_label0: int
    sum_sigmoid1: float
    score_label: float
    score_sigmoid: float
    rank: int = 0  # 0 until ranked

    @property
    def n_pieces(self) -> int:
        return self.n_label0 + self.n_label1

    def score_for(self, mode: str) -> float:
        return self.score_label if mode == "label" else self.score_sigmoid


@dataclass(frozen=True)
class Ranking:
    query_label: str
    mode: str
    scores: tuple[PatentScore, ...]

    def __len__(self) -> int:
        return len(self.scores)

    def positions(self) -> dict[str, int]:
        return {s.patent_id: s.rank for s in self.scores}


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ScoringError(f"unknown scoring mode {mode!r}; pick one of {MODES}")


def score_patents(results: Sequence[ClassificationResult],
                  provenance: Sequence[PairInput] | Mapping[str, tuple[str, int]],
                  mode: str = "label") -> list[PatentScore]:
    """One PatentScore per patent appearing in ``results``.

    ``provenance`` joins each result's pair id back to its
    ``(patent_id, piece_index)``; a result without provenance, a duplicate
    pair id, or a piece scored twice is an error. Both scores are computed
    regardless of ``mode``.
    """
    _check_mode(mode)
    if isinstance(provenance, Mapping):
        piece_of = dict(provenance)
    else:
        piece_of = {p.pair_id: (p.piece_patent_id, p.piece_index)
                    for p in provenance}

    seen_pairs: set[str] = set()
    seen_pieces: set[tuple[str, int]] = set()
    patent_order: dict[str, int] = {}
    idx = np.zeros(len(results), dtype=np.int64)
    labels = np.zeros(len(results), dtype=np.int64)
    probs = np.zeros(len(results), dtype=np.float64)

    for i, result in enumerate(results):
        if result.pair_id in seen_pairs:
            raise ScoringError(f"duplicate result for pair {result.pair_id!r}")
        seen_pairs.add(result.pair_id)
        try:
            piece = piece_of[result.pair_id]
        except KeyError:
            raise ScoringError(
                f"result for unknown piece: pair {result.pair_id!r}"
            ) from None
        if piece in seen_pieces:
            raise ScoringError(
                f"piece {piece[0]!r}#{piece[1]} scored more than once"
            )
        seen_pieces.add(piece)
        idx[i] = patent_order.setdefault(piece[0], len(patent_order))
        labels[i] = result.predicted_label
        probs[i] = result.prob_label1

    n1, n0, sum_sig = _kernels.aggregate(idx, labels, probs, len(patent_order))
    scores = []
    for patent_id, j in patent_order.items():
        total = int(n0[j] + n1[j])
        scores.append(PatentScore(
            patent_id=patent_id,
            n_label1=int(n1[j]),
            n_label0=int(n0[j]),
            sum_sigmoid1=float(sum_sig[j]),
            score_label=int(n1[j]) / total,
            score_sigmoid=float(sum_sig[j]) / total,
        ))
    return scores


def rank(scores: Sequence[PatentScore], mode: str = "label",
         query_label: str = "") -> Ranking:
    """Total order: selected score descending, ties by ascending patent id."""
    _check_mode(mode)
    if not scores:
        raise ScoringError("cannot rank an empty score list")
    ordered = sorted(scores, key=lambda s: (-s.score_for(mode), s.patent_id))
    ranked = tuple(replace(s, rank=i) for i, s in enumerate(ordered, start=1))
    return Ranking(query_label=query_label, mode=mode, scores=ranked)


def _row_values(score: PatentScore) -> list:
    return [score.rank, score.patent_id, score.score_label,
            score.score_sigmoid, score.n_label1, score.n_pieces]


def write_ranking_csv(ranking: Ranking, path: str | Path,
                      meta: Mapping | None = None) -> None:
    """CSV export; reproducibility header rendered as leading # comments."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if meta is not None:
            fh.write("# " + json.dumps({"_meta": dict(meta)}, sort_keys=True,
                                       ensure_ascii=False) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RANKING_COLUMNS)
        for score in ranking.scores:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in _row_values(score)])


def write_ranking_json(ranking: Ranking, path: str | Path,
                       meta: Mapping | None = None) -> None:
    doc = {
        "query": ranking.query_label,
        "mode": ranking.mode,
        "rows": [dict(zip(RANKING_COLUMNS, _row_values(s)))
                 for s in ranking.scores],
    }
    if meta is not None:
        doc["_meta"] = dict(meta)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2, ensure_ascii=False)
        fh.write("\n")
