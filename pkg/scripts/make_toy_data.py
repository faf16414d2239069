#!/usr/bin/env python3
"""Regenerate the bundled toy data under data/.

The corpus is deterministic, so re-running this script must leave the
checked-in files unchanged.
"""

import json
from pathlib import Path

from noveltysearch import toy_corpus, write_corpus

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

# Two planted reference patents: each cites itself as the known X document,
# so a correct pipeline reports position 1 for both.
CITED_X = {
    "TP0003A1": ["TP0003A1"],
    "TP0006A1": ["TP0006A1"],
}

CONFIG = {
    "corpus": "data/toy_corpus.jsonl",
    "class_prefix": "G06T",
    "groups": {
        "training": 6,
        "pretest": 4,
        "search": 5,
        "seed": 11,
        "must_include_search": ["TP0003A1", "TP0006A1"],
    },
    "slice": {"min_len": 60, "max_len": 120, "seed": 42},
    "assembly": {"max_words": 500, "markers": False},
    "pairs": {"seed": 7, "validation_fraction": 0.1},
    "backend": "baseline",
    "mode": "label",
    "output_dir": "out",
    "report": {"cited_x": "data/toy_cited_x.json"},
}


def main():
    DATA.mkdir(exist_ok=True)
    corpus = toy_corpus()
    write_corpus(corpus, DATA / "toy_corpus.jsonl")
    with open(DATA / "toy_cited_x.json", "w", encoding="utf-8") as fh:
        json.dump(CITED_X, fh, indent=2)
        fh.write("\n")
    with open(DATA / "toy_config.json", "w", encoding="utf-8") as fh:
        json.dump(CONFIG, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(corpus)} patents and configs to {DATA}")


if __name__ == "__main__":
    main()
