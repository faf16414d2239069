"""Cut patent descriptions into contiguous word pieces of seeded-random length.

A "word" is a maximal run of non-whitespace characters. Piece lengths are
drawn uniformly from ``[min_len, max_len]`` with a generator seeded by
``(seed, patent_id)``, so boundaries are stable per patent no matter how the
corpus is ordered or filtered. The last piece of a patent may run short.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Corpus, iter_jsonl
from .errors import SliceError

PieceTable = dict[str, list["DescriptionPiece"]]


@dataclass(frozen=True)
class SliceConfig:
    min_len: int
    max_len: int
    seed: int = 0

    def __post_init__(self):
        if self.min_len < 1 or self.min_len > self.max_len:
            raise SliceError(
                f"invalid slice range [{self.min_len}, {self.max_len}]: "
                "need 1 <= min_len <= max_len"
            )


@dataclass(frozen=True)
class DescriptionPiece:
    patent_id: str
    piece_index: int
    text: str
    word_count: int


def _piece_rng(seed: int, patent_id: str) -> random.Random:
    # String seeding is hash-randomization independent in CPython.
    return random.Random(f"{seed}\x1f{patent_id}")


def slice_description(patent_id: str, description: str,
                      config: SliceConfig) -> list[DescriptionPiece]:
    """Split one description into pieces.

    Joining the returned texts with single spaces reproduces the
    description's word sequence exactly.
    """
    words = description.split()
    if not words:
        raise SliceError(f"patent {patent_id!r}: description has no words")
    rng = _piece_rng(config.seed, patent_id)
    pieces = []
    pos = 0
    while pos < len(words):
        length = rng.randint(config.min_len, config.max_len)
        chunk = words[pos:pos + length]
        pieces.append(DescriptionPiece(
            patent_id=patent_id,
            piece_index=len(pieces),
            text=" ".join(chunk),
            word_count=len(chunk),
        ))
        pos += length
    return pieces


def slice_patent(patent, config: SliceConfig) -> list[DescriptionPiece]:
    return slice_description(patent.patent_id, patent.description, config)


def slice_corpus(corpus: Corpus | Iterable, config: SliceConfig) -> PieceTable:
    """Piece table keyed by patent id, in corpus iteration order."""
    return {p.patent_id: slice_patent(p, config) for p in corpus}


def total_pieces(table: Mapping[str, list[DescriptionPiece]]) -> int:
    return sum(len(pieces) for pieces in table.values())


def write_piece_table(table: PieceTable, path: str | Path,
                      meta: Mapping | None = None) -> None:
    """JSONL export, one ``{patent_id, piece_index, text}`` object per piece."""
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": dict(meta)}, sort_keys=True,
                                ensure_ascii=False) + "\n")
        for pieces in table.values():
            for piece in pieces:
                record = {
                    "patent_id": piece.patent_id,
                    "piece_index": piece.piece_index,
                    "text": piece.text,
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_piece_table(path: str | Path) -> PieceTable:
    table: PieceTable = {}
    for record in iter_jsonl(path):
        piece = DescriptionPiece(
            patent_id=record["patent_id"],
            piece_index=record["piece_index"],
            text=record["text"],
            word_count=len(record["text"].split()),
        )
        table.setdefault(piece.patent_id, []).append(piece)
    for pid, pieces in table.items():
        if [p.piece_index for p in pieces] != list(range(len(pieces))):
            raise SliceError(f"piece table for {pid!r} has gaps or disorder")
    return table
