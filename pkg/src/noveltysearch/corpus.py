"""Patent corpus: ingestion, validation, filtering, grouping, JSONL persistence.

A corpus is an immutable, insertion-ordered collection of patents keyed by
publication number. Text is stored verbatim; no normalization happens at
ingest time.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CorpusError

GROUP_NAMES = ("training", "pretest", "search")

_PATENT_FIELDS = ("patent_id", "kind_code", "ipc_classes", "first_claim",
                  "description", "language")


@dataclass(frozen=True)
class Patent:
    """One patent document, stored verbatim.

    ``first_claim`` and ``description`` must each contain at least one
    whitespace-separated word; ``patent_id`` must be non-empty.
    """

    patent_id: str
    kind_code: str
    ipc_classes: tuple[str, ...]
    first_claim: str
    description: str
    language: str = "en"

    def validate(self) -> None:
        if not self.patent_id:
            raise CorpusError("patent record has empty field 'patent_id'")
        for name in ("first_claim", "description"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value.split():
                raise CorpusError(
                    f"patent {self.patent_id!r}: empty field {name!r}"
                )

    @classmethod
    def from_record(cls, record: Mapping) -> "Patent":
        missing = [f for f in _PATENT_FIELDS if f not in record and f != "language"]
        if missing:
            pid = record.get("patent_id", "<unknown>")
            raise CorpusError(f"patent {pid!r}: missing field {missing[0]!r}")
        patent = cls(
            patent_id=record["patent_id"],
            kind_code=record["kind_code"],
            ipc_classes=tuple(record["ipc_classes"]),
            first_claim=record["first_claim"],
            description=record["description"],
            language=record.get("language", "en"),
        )
        patent.validate()
        return patent

    def to_record(self) -> dict:
        return {
            "patent_id": self.patent_id,
            "kind_code": self.kind_code,
            "ipc_classes": list(self.ipc_classes),
            "first_claim": self.first_claim,
            "description": self.description,
            "language": self.language,
        }


class Corpus:
    """Insertion-ordered patent collection, immutable after construction."""

    def __init__(self, patents: Iterable[Patent] = ()):
        self._by_id: dict[str, Patent] = {}
        for patent in patents:
            patent.validate()
            if patent.patent_id in self._by_id:
                raise CorpusError(f"duplicate patent_id {patent.patent_id!r}")
            self._by_id[patent.patent_id] = patent

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[Patent]:
        return iter(self._by_id.values())

    def __contains__(self, patent_id: str) -> bool:
        return patent_id in self._by_id

    def __getitem__(self, patent_id: str) -> Patent:
        try:
            return self._by_id[patent_id]
        except KeyError:
            raise CorpusError(f"unknown patent_id {patent_id!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return list(self) == list(other)

    def ids(self) -> list[str]:
        return list(self._by_id)

    def subset(self, patent_ids: Iterable[str]) -> "Corpus":
        """New corpus containing exactly ``patent_ids``, in the given order."""
        return Corpus(self[pid] for pid in patent_ids)


def ingest(records: Iterable[Mapping]) -> Corpus:
    """Build a corpus from a stream of raw records.

    Rejects duplicates and records with missing or empty required fields,
    naming the offending id or field. Text is kept exactly as received.
    """
    return Corpus(Patent.from_record(r) for r in records)


def filter_by_class(corpus: Corpus, class_prefix: str) -> Corpus:
    """Patents having at least one IPC class starting with ``class_prefix``.

    Order is preserved; an empty result is valid, an empty prefix is not.
    """
    if not class_prefix:
        raise CorpusError("class_prefix must be non-empty")
    return Corpus(
        p for p in corpus
        if any(c.startswith(class_prefix) for c in p.ipc_classes)
    )


@dataclass(frozen=True)
class CorpusGroup:
    """Named, ordered slice of a corpus (training, pretest, or search)."""

    name: str
    patent_ids: tuple[str, ...]

    def __post_init__(self):
        if self.name not in GROUP_NAMES:
            raise CorpusError(f"unknown group name {self.name!r}")
        if len(set(self.patent_ids)) != len(self.patent_ids):
            raise CorpusError(f"group {self.name!r} repeats a patent id")

    def __len__(self) -> int:
        return len(self.patent_ids)


def assign_groups(
    corpus: Corpus,
    sizes: Mapping[str, int],
    seed: int,
    must_include_search: Sequence[str] = (),
) -> dict[str, CorpusGroup]:
    """Partition a corpus into training / pretest / search groups.

    Deterministic for a given seed. The pretest group never overlaps the
    training group (and is kept clear of the search group as well); training
    and search may overlap. Ids in ``must_include_search`` are appended to
    the search group when the random draw misses them, so the search group
    may exceed its nominal size.
    """
    for name in GROUP_NAMES:
        if name not in sizes:
            raise CorpusError(f"sizes is missing group {name!r}")
        if sizes[name] < 0:
            raise CorpusError(f"group size for {name!r} must be >= 0")
    missing = [pid for pid in must_include_search if pid not in corpus]
    if missing:
        raise CorpusError(f"must_include_search id {missing[0]!r} not in corpus")

    ids = corpus.ids()
    n_train, n_pre, n_search = (sizes[g] for g in GROUP_NAMES)
    rng = random.Random(seed)

    if n_train > len(ids):
        raise CorpusError(
            f"corpus too small: training needs {n_train}, corpus has {len(ids)}"
        )
    training = rng.sample(ids, n_train)

    # Reserved ids are destined for the search group and must stay out of
    # the pretest draw, which also guarantees pretest/search disjointness.
    reserved = set(must_include_search)
    pretest_pool = [i for i in ids if i not in set(training) and i not in reserved]
    if n_pre > len(pretest_pool):
        raise CorpusError(
            f"corpus too small: pretest needs {n_pre} patents disjoint from "
            f"training, only {len(pretest_pool)} available"
        )
    pretest = rng.sample(pretest_pool, n_pre)

    search_pool = [i for i in ids if i not in set(pretest)]
    if n_search > len(search_pool):
        raise CorpusError(
            f"corpus too small: search needs {n_search}, only "
            f"{len(search_pool)} available outside the pretest group"
        )
    search = rng.sample(search_pool, n_search)
    present = set(search)
    for pid in must_include_search:
        if pid not in present:
            search.append(pid)
            present.add(pid)

    return {
        "training": CorpusGroup("training", tuple(training)),
        "pretest": CorpusGroup("pretest", tuple(pretest)),
        "search": CorpusGroup("search", tuple(search)),
    }


# -- JSONL persistence --
#
# One JSON object per line, field names exactly as in Patent. A line whose
# object carries a "_meta" key is a reproducibility header and is skipped
# on read.

def write_corpus(corpus: Corpus, path: str | Path, meta: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": dict(meta)}, sort_keys=True,
                                ensure_ascii=False) + "\n")
        for patent in corpus:
            fh.write(json.dumps(patent.to_record(), ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> Corpus:
    return ingest(iter_jsonl(path))


def iter_jsonl(path: str | Path) -> Iterator[dict]:
    """Data records of a JSONL file, skipping blank and ``_meta`` lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if isinstance(obj, dict) and "_meta" in obj:
                continue
            yield obj


def read_meta(path: str | Path) -> dict | None:
    """The ``_meta`` header of a JSONL artifact, if present."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if isinstance(obj, dict) and "_meta" in obj:
                return obj["_meta"]
            return None
    return None
