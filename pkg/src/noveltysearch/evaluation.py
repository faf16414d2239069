"""Two evaluations: a pair-level pretest and a cited-X position report.

The pretest asks whether the classifier recognizes a patent's own
description pieces for its claim: balanced labeled pairs are built over a
held-out group exactly as for training, classified, and summarized as an F1
score with label 1 as the positive class. The companion patent-level metric
checks, per patent, that its own description wins rank 1 when its claim is
searched over the group.

The position report runs one search per reference claim and records where
each cited prior-art patent landed in the ranking.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .classify import Backend, classify_batch
from .corpus import Corpus, CorpusGroup
from .errors import EvaluationError
from .pairs import (AssemblyConfig, assemble_all, build_negative_pairs,
                    build_positive_pairs)
from .scoring import MODES
from .search import (PieceResult, SearchJob, SearchOutcome, position_of,
                     ranking_from_audit, run_search)
from .slicer import SliceConfig, slice_corpus


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


def confusion_counts(gold: Sequence[int], predicted: Sequence[int]) -> ConfusionCounts:
    if len(gold) != len(predicted):
        raise EvaluationError("gold and predicted label lists differ in length")
    tp = fp = tn = fn = 0
    for g, p in zip(gold, predicted):
        if g == 1 and p == 1:
            tp += 1
        elif g == 0 and p == 1:
            fp += 1
        elif g == 0 and p == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def f1_score(counts: ConfusionCounts) -> tuple[float, bool]:
    """F1 with label 1 positive; the no-positives-anywhere case is defined
    as 1.0 and flagged degenerate instead of dividing by zero."""
    denominator = 2 * counts.tp + counts.fp + counts.fn
    if denominator == 0:
        return 1.0, True
    return 2 * counts.tp / denominator, False


@dataclass(frozen=True)
class PretestResult:
    counts: ConfusionCounts
    f1: float
    degenerate: bool
    n_pairs: int


def pretest(corpus: Corpus, group: CorpusGroup, slice_config: SliceConfig,
            seed: int, backend: Backend,
            assembly_config: AssemblyConfig = AssemblyConfig(),
            training_ids: Sequence[str] | None = None) -> PretestResult:
    """Balanced pair-level evaluation over a held-out group.

    Pairs are built exactly as for training: every piece with its own claim
    (label 1), then the same claims and pieces recombined across patents
    (label 0). ``training_ids``, when given, guards the group's
    disjointness from the training set.
    """
    if training_ids is not None:
        overlap = set(group.patent_ids) & set(training_ids)
        if overlap:
            raise EvaluationError(
                f"pretest group overlaps training group: {sorted(overlap)[:5]}"
            )
    subset = corpus.subset(group.patent_ids)
    pieces = slice_corpus(subset, slice_config)
    positives = build_positive_pairs(pieces, subset, purpose="pretest")
    negatives = build_negative_pairs(positives, seed)
    assembled = assemble_all(positives + negatives, assembly_config)
    pairs = [a.pair for a in assembled]
    results = classify_batch(pairs, backend)
    gold = [p.label for p in pairs]
    predicted = [r.predicted_label for r in results]
    counts = confusion_counts(gold, predicted)
    f1, degenerate = f1_score(counts)
    return PretestResult(counts=counts, f1=f1, degenerate=degenerate,
                         n_pairs=len(pairs))


@dataclass(frozen=True)
class OwnDescriptionResult:
    """Patent-level pretest: did each patent's own description win rank 1
    when its claim was searched over the whole group?"""

    n_top1: int
    n_patents: int
    misses: tuple[str, ...]

    @property
    def fraction(self) -> float:
        return self.n_top1 / self.n_patents if self.n_patents else 0.0


def own_description_top1(corpus: Corpus, group: CorpusGroup,
                         slice_config: SliceConfig, backend: Backend,
                         assembly_config: AssemblyConfig = AssemblyConfig(),
                         mode: str = "label") -> OwnDescriptionResult:
    misses = []
    for pid in group.patent_ids:
        job = SearchJob(
            corpus=corpus,
            target_group=group,
            claim_of_interest=corpus[pid].first_claim,
            slice_config=slice_config,
            backend=backend,
            assembly_config=assembly_config,
            mode=mode,
            claim_source_id=pid,
        )
        outcome = run_search(job)
        if position_of(outcome.ranking, pid) != 1:
            misses.append(pid)
    n = len(group.patent_ids)
    return OwnDescriptionResult(n_top1=n - len(misses), n_patents=n,
                                misses=tuple(misses))


# -- cited-X position report ----------------------------------------------

@dataclass(frozen=True)
class XReportRow:
    reference_id: str
    cited_x_id: str
    position: int
    score: float
    tie_group_size: int


@dataclass(frozen=True)
class XReport:
    mode: str
    corpus_size: int
    rows: tuple[XReportRow, ...]


def x_report_from_audits(audits: Mapping[str, Sequence[PieceResult]],
                         cited_x: Mapping[str, Sequence[str]],
                         mode: str = "label") -> XReport:
    """Build the report from persisted audit tables, re-ranking under
    ``mode`` without re-classifying anything."""
    if mode not in MODES:
        raise EvaluationError(f"unknown scoring mode {mode!r}")
    rows = []
    sizes = set()
    for reference_id, cited_ids in cited_x.items():
        if reference_id not in audits:
            raise EvaluationError(
                f"no audit table for reference {reference_id!r}; "
                "run its search first"
            )
        ranking = ranking_from_audit(audits[reference_id], mode=mode,
                                     query_label=reference_id)
        sizes.add(len(ranking))
        positions = ranking.positions()
        by_id = {s.patent_id: s for s in ranking.scores}
        for cited_id in cited_ids:
            if cited_id not in positions:
                raise EvaluationError(
                    f"cited X patent {cited_id!r} missing from the ranked "
                    f"group of reference {reference_id!r}"
                )
            score = by_id[cited_id].score_for(mode)
            ties = sum(1 for s in ranking.scores if s.score_for(mode) == score)
            rows.append(XReportRow(
                reference_id=reference_id,
                cited_x_id=cited_id,
                position=positions[cited_id],
                score=score,
                tie_group_size=ties,
            ))
    size = sizes.pop() if len(sizes) == 1 else 0
    return XReport(mode=mode, corpus_size=size, rows=tuple(rows))


def x_position_report(jobs: Sequence[SearchJob],
                      cited_x: Mapping[str, Sequence[str]],
                      mode: str = "label") -> tuple[XReport, dict[str, SearchOutcome]]:
    """Run each reference search, then report every cited X patent's rank.

    Every job's ``claim_source_id`` is its reference id. Returns the report
    plus the raw outcomes so callers can persist the audit tables.
    """
    outcomes: dict[str, SearchOutcome] = {}
    for job in jobs:
        if not job.claim_source_id:
            raise EvaluationError("every report job needs a claim_source_id")
        outcomes[job.claim_source_id] = run_search(job)
    missing = [ref for ref in cited_x if ref not in outcomes]
    if missing:
        raise EvaluationError(f"no search job for reference {missing[0]!r}")
    audits = {ref: outcome.audit for ref, outcome in outcomes.items()}
    return x_report_from_audits(audits, cited_x, mode=mode), outcomes


# -- emitters --------------------------------------------------------------

def citations_markdown(cited_x: Mapping[str, Sequence[str]]) -> str:
    """Reference patents and their cited X patents, one row per citation."""
    lines = ["| Reference patent | Cited X patent |",
             "| --- | --- |"]
    for reference_id, cited_ids in cited_x.items():
        for i, cited_id in enumerate(cited_ids):
            ref_cell = reference_id if i == 0 else ""
            lines.append(f"| {ref_cell} | {cited_id} |")
    return "\n".join(lines) + "\n"


def report_markdown(report: XReport) -> str:
    lines = [
        f"Scoring mode: {report.mode}; ranked group size: "
        f"{report.corpus_size or 'varies'}",
        "",
        "| Reference patent | Cited X patent | Pos. relevance score | "
        "Score | Tie group |",
        "| --- | --- | --- | --- | --- |",
    ]
    previous = None
    for row in report.rows:
        ref_cell = row.reference_id if row.reference_id != previous else ""
        previous = row.reference_id
        lines.append(
            f"| {ref_cell} | {row.cited_x_id} | {row.position} | "
            f"{row.score:.6f} | {row.tie_group_size} |"
        )
    return "\n".join(lines) + "\n"


def write_report_csv(report: XReport, path: str | Path,
                     meta: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if meta is not None:
            fh.write("# " + json.dumps({"_meta": dict(meta)}, sort_keys=True,
                                       ensure_ascii=False) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["reference_id", "cited_x_id", "position", "score",
                         "tie_group_size", "group_size", "mode"])
        for row in report.rows:
            writer.writerow([row.reference_id, row.cited_x_id, row.position,
                             repr(row.score), row.tie_group_size,
                             report.corpus_size, report.mode])
