"""Fine-tune a sequence-pair classifier on a pair JSONL export.

Input format: one JSON object per line with ``pair_id``, ``claim``,
``piece``, ``label`` (0 or 1); a leading ``{"_meta": ...}`` line is skipped.
That is exactly what the pipeline's gen-pairs stage writes.

The base model is either a saved/downloadable checkpoint (``base_model``)
or, by default, a small randomly initialized transformer whose lower-case
WordPiece vocabulary is built from the training data itself, so the smoke
path needs no network and no pretrained weights. Learning rate and batch
size default to common fine-tuning values and are fully exposed.
"""

from __future__ import annotations

import hashlib
import json
import random
import warnings
from collections import Counter
from pathlib import Path

from .config import DataFormatError

TINY_MODEL = {
    "hidden_size": 64,
    "num_hidden_layers": 2,
    "num_attention_heads": 2,
    "intermediate_size": 128,
    "max_position_embeddings": 512,
}

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")


def load_pair_records(path: str | Path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON: {exc}")
            if "_meta" in record:
                continue
            for field in ("pair_id", "claim", "piece", "label"):
                if field not in record:
                    raise DataFormatError(
                        f"{path}:{lineno}: missing field {field!r}"
                    )
            if record["label"] not in (0, 1):
                raise DataFormatError(
                    f"{path}:{lineno}: label must be 0 or 1, "
                    f"got {record['label']!r}"
                )
            records.append(record)
    if not records:
        raise DataFormatError(f"{path}: no training pairs found")
    return records


def check_balance(records: list[dict]) -> Counter:
    histogram = Counter(r["label"] for r in records)
    n0, n1 = histogram.get(0, 0), histogram.get(1, 0)
    if min(n0, n1) * 2 < max(n0, n1):
        warnings.warn(
            f"training labels are unbalanced ({n0} label-0 vs {n1} label-1); "
            "proceeding anyway"
        )
    return histogram


def build_vocab(records: list[dict], max_size: int = 8000) -> dict[str, int]:
    counts: Counter = Counter()
    for record in records:
        counts.update(record["claim"].lower().split())
        counts.update(record["piece"].lower().split())
    vocab = {token: i for i, token in enumerate(SPECIAL_TOKENS)}
    for word, _ in counts.most_common(max_size - len(vocab)):
        vocab[word] = len(vocab)
    return vocab


def _make_tiny_base(records: list[dict], seed: int):
    import torch
    from transformers import (BertConfig, BertForSequenceClassification,
                              BertTokenizerFast)

    torch.manual_seed(seed)
    vocab = build_vocab(records)
    tokenizer = BertTokenizerFast(vocab=vocab, do_lower_case=True)
    config = BertConfig(vocab_size=len(vocab), num_labels=2, **TINY_MODEL)
    return BertForSequenceClassification(config), tokenizer


def _load_base(base_model: str):
    from transformers import (AutoModelForSequenceClassification,
                              AutoTokenizer)

    tokenizer = AutoTokenizer.from_pretrained(base_model)
    model = AutoModelForSequenceClassification.from_pretrained(
        base_model, num_labels=2)
    return model, tokenizer


def finetune(data_path: str | Path, output_dir: str | Path,
             base_model: str | None = None, epochs: int = 2, seed: int = 0,
             learning_rate: float = 5e-5, batch_size: int = 8,
             max_tokens: int = 500, quiet: bool = False) -> Path:
    """Train and save a servable artifact; returns the artifact directory.

    The directory holds the standard saved model and tokenizer files plus
    ``training_meta.json`` with epochs, seed, and the data fingerprint.
    """
    import torch
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()

    records = load_pair_records(data_path)
    histogram = check_balance(records)

    if base_model:
        model, tokenizer = _load_base(base_model)
    else:
        model, tokenizer = _make_tiny_base(records, seed)

    capacity = int(model.config.max_position_embeddings)
    max_tokens = min(max_tokens, capacity)

    rng = random.Random(seed)
    torch.manual_seed(seed)
    order = list(range(len(records)))

    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate)
    for epoch in range(epochs):
        rng.shuffle(order)
        total_loss = 0.0
        for start in range(0, len(order), batch_size):
            batch = [records[i] for i in order[start:start + batch_size]]
            encoded = tokenizer(
                [r["claim"] for r in batch],
                [r["piece"] for r in batch],
                truncation="only_second", max_length=max_tokens,
                padding=True, return_tensors="pt",
            )
            labels = torch.tensor([r["label"] for r in batch])
            out = model(**encoded, labels=labels)
            out.loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            total_loss += float(out.loss.detach())
        if not quiet:
            print(f"epoch {epoch + 1}/{epochs}: "
                  f"mean loss {total_loss / max(1, len(order) // batch_size):.4f}")

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(output_dir)
    tokenizer.save_pretrained(output_dir)
    meta = {
        "epochs": epochs,
        "seed": seed,
        "learning_rate": learning_rate,
        "batch_size": batch_size,
        "max_tokens": max_tokens,
        "base_model": base_model or "tiny-random-init",
        "n_examples": len(records),
        "label_histogram": {str(k): v for k, v in sorted(histogram.items())},
        "data_sha256": hashlib.sha256(
            Path(data_path).read_bytes()).hexdigest(),
    }
    with open(output_dir / "training_meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return output_dir
