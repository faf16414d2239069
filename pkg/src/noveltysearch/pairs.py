"""Assemble claim/piece input sequences.

Training data pairs every description piece with the claim of its own patent
(label 1), then reuses exactly the same claims and pieces in cross-patent
combinations (label 0), so both labels occur with the same frequency. Query
pairs carry a single claim of interest against every piece of a target group
and have no label.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import PairError
from .slicer import DescriptionPiece

PURPOSES = ("training", "validation", "pretest", "search")


@dataclass(frozen=True)
class PairInput:
    pair_id: str
    claim_patent_id: str
    piece_patent_id: str
    piece_index: int
    claim_text: str
    piece_text: str
    label: int | None = None
    purpose: str = "training"

    def __post_init__(self):
        if self.purpose not in PURPOSES:
            raise PairError(f"pair {self.pair_id!r}: unknown purpose {self.purpose!r}")
        if self.label not in (None, 0, 1):
            raise PairError(f"pair {self.pair_id!r}: label must be 0, 1, or absent")
        if self.purpose == "search" and self.label is not None:
            raise PairError(f"pair {self.pair_id!r}: search pairs carry no label")
        if self.label == 1 and self.claim_patent_id != self.piece_patent_id:
            raise PairError(
                f"pair {self.pair_id!r}: label 1 requires claim and piece "
                "from the same patent"
            )
        if self.label == 0 and self.claim_patent_id == self.piece_patent_id:
            raise PairError(
                f"pair {self.pair_id!r}: label 0 requires claim and piece "
                "from different patents"
            )


@dataclass(frozen=True)
class AssemblyConfig:
    """Word budget for claim plus piece, and marker rendering policy.

    ``max_words`` is a proxy for the downstream classifier's token limit;
    exact subword truncation is the serving side's job. When ``markers`` is
    False the rendered text is the plain claim/piece concatenation and
    marker tokens are left to the classifier adapter.
    """

    max_words: int = 500
    markers: bool = False

    def __post_init__(self):
        if self.max_words < 2:
            raise PairError(f"max_words must be >= 2, got {self.max_words}")


@dataclass(frozen=True)
class AssembledPair:
    pair: PairInput
    truncated: bool
    word_count: int
    rendered: str


def build_positive_pairs(pieces: Mapping[str, Sequence[DescriptionPiece]],
                         claims: Corpus,
                         purpose: str = "training") -> list[PairInput]:
    """One label-1 pair per piece: the piece with its own patent's claim."""
    pairs = []
    for patent_id, patent_pieces in pieces.items():
        if patent_id not in claims:
            raise PairError(f"piece references unknown patent {patent_id!r}")
        claim_text = claims[patent_id].first_claim
        for piece in patent_pieces:
            pairs.append(PairInput(
                pair_id=f"pos:{patent_id}:{piece.piece_index}",
                claim_patent_id=patent_id,
                piece_patent_id=patent_id,
                piece_index=piece.piece_index,
                claim_text=claim_text,
                piece_text=piece.text,
                label=1,
                purpose=purpose,
            ))
    return pairs


def build_negative_pairs(positive_pairs: Sequence[PairInput],
                         seed: int) -> list[PairInput]:
    """Cross-patent label-0 pairs reusing the positives' claims and pieces.

    The piece-to-claim assignment is a random permutation, re-drawn until no
    pair keeps claim and piece on the same patent; after 100 rejections a
    deterministic rotation of the patent-sorted order is used instead. Either
    way the claim multiset and the piece multiset match the positives exactly.
    """
    n = len(positive_pairs)
    patents = [p.piece_patent_id for p in positive_pairs]
    counts = Counter(patents)
    if len(counts) < 2:
        raise PairError(
            "negative pairs need positives from at least 2 distinct patents"
        )
    heaviest, heavy_count = counts.most_common(1)[0]
    if 2 * heavy_count > n:
        raise PairError(
            f"no valid cross-patent assignment: patent {heaviest!r} supplies "
            f"{heavy_count} of {n} pieces (more than half)"
        )

    rng = random.Random(seed)
    assignment = None
    perm = list(range(n))
    for _ in range(100):
        rng.shuffle(perm)
        if all(patents[i] != patents[perm[i]] for i in range(n)):
            assignment = list(perm)
            break
    if assignment is None:
        # Rotating the patent-sorted order by the largest patent's piece
        # count cannot map any index back into its own patent block.
        order = sorted(range(n), key=lambda i: (patents[i], positive_pairs[i].piece_index))
        assignment = [0] * n
        for j, i in enumerate(order):
            assignment[i] = order[(j + heavy_count) % n]

    negatives = []
    for i, source in enumerate(assignment):
        claim_side = positive_pairs[i]
        piece_side = positive_pairs[source]
        negatives.append(PairInput(
            pair_id=(f"neg:{claim_side.claim_patent_id}|"
                     f"{piece_side.piece_patent_id}:{piece_side.piece_index}"),
            claim_patent_id=claim_side.claim_patent_id,
            piece_patent_id=piece_side.piece_patent_id,
            piece_index=piece_side.piece_index,
            claim_text=claim_side.claim_text,
            piece_text=piece_side.piece_text,
            label=0,
            purpose=claim_side.purpose,
        ))
    return negatives


def assemble(pair: PairInput, config: AssemblyConfig) -> AssembledPair:
    """Fit a pair into the word budget, truncating only the piece tail.

    The claim is never altered; a claim that already fills the budget on its
    own is an error (splitting over-long claims into subclaims is out of
    scope, so callers must shorten the claim themselves).
    """
    claim_words = pair.claim_text.split()
    if not claim_words:
        raise PairError(f"pair {pair.pair_id!r}: claim text is empty")
    if len(claim_words) >= config.max_words:
        raise PairError(
            f"pair {pair.pair_id!r}: claim alone has {len(claim_words)} words, "
            f"budget is {config.max_words}; subclaim splitting is not supported"
        )
    piece_words = pair.piece_text.split()
    budget = config.max_words - len(claim_words)
    truncated = len(piece_words) > budget
    if truncated:
        piece_words = piece_words[:budget]
        pair = replace(pair, piece_text=" ".join(piece_words))
    if config.markers:
        rendered = f"[CLS] {pair.claim_text} [SEP] {pair.piece_text} [SEP]"
    else:
        rendered = f"{pair.claim_text} {pair.piece_text}"
    return AssembledPair(
        pair=pair,
        truncated=truncated,
        word_count=len(claim_words) + len(piece_words),
        rendered=rendered,
    )


def assemble_all(pairs: Iterable[PairInput],
                 config: AssemblyConfig) -> list[AssembledPair]:
    return [assemble(p, config) for p in pairs]


def split_validation(pairs: Sequence[PairInput], fraction: float,
                     seed: int) -> tuple[list[PairInput], list[PairInput]]:
    """Disjoint, exhaustive (training, validation) split, stable given seed."""
    if not 0 < fraction < 1:
        raise PairError(f"validation fraction must be in (0, 1), got {fraction}")
    indices = list(range(len(pairs)))
    random.Random(seed).shuffle(indices)
    n_val = int(round(fraction * len(pairs)))
    val_set = set(indices[:n_val])
    training = [p for i, p in enumerate(pairs) if i not in val_set]
    validation = [p for i, p in enumerate(pairs) if i in val_set]
    return training, validation


def write_pairs(pairs: Iterable[PairInput | AssembledPair], path: str | Path,
                meta: Mapping | None = None) -> None:
    """JSONL export: ``{pair_id, claim, piece, label}``; label omitted when absent."""
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": dict(meta)}, sort_keys=True,
                                ensure_ascii=False) + "\n")
        for item in pairs:
            pair = item.pair if isinstance(item, AssembledPair) else item
            record = {
                "pair_id": pair.pair_id,
                "claim": pair.claim_text,
                "piece": pair.piece_text,
            }
            if pair.label is not None:
                record["label"] = pair.label
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
