"""Model backends: the fake echo mode and saved transformer artifacts.

Both expose ``classify(claims, pieces) -> list[float]`` returning the
label-1 probability per pair, and a ``name``/``capacity`` for the health
endpoint and the token-budget check.
"""

from __future__ import annotations

from .config import ServingConfig, SidecarError


class ClaimTooLongError(SidecarError):
    """The claim alone exceeds the serving token budget."""


class EchoModel:
    """No model at all: answers 0.5 for every pair.

    Exists so the wire protocol can be conformance-tested end to end
    without any weights on disk.
    """

    name = "echo"
    capacity = None  # no positional limit

    def __init__(self, config: ServingConfig):
        self.config = config

    def classify(self, claims, pieces):
        return [0.5] * len(claims)


class TransformerModel:
    """A saved sequence-classification artifact.

    Claim and piece are tokenized lower-cased as a sentence pair with the
    standard start/separator markers; only the piece side is truncated to
    fit the budget. The two output scores are normalized so the returned
    value is the label-1 probability.
    """

    def __init__(self, config: ServingConfig):
        import torch
        from transformers import (AutoModelForSequenceClassification,
                                  AutoTokenizer)

        self.config = config
        self.torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            config.model)
        self.model.eval()
        self.name = config.model
        self.capacity = int(self.model.config.max_position_embeddings)
        if config.max_tokens > self.capacity:
            raise SidecarError(
                f"max_tokens {config.max_tokens} exceeds the model's "
                f"positional capacity {self.capacity}"
            )

    def classify(self, claims, pieces):
        probs: list[float] = []
        step = self.config.batch_size
        for start in range(0, len(claims), step):
            probs.extend(self._classify_chunk(
                claims[start:start + step], pieces[start:start + step]))
        return probs

    def _classify_chunk(self, claims, pieces):
        try:
            encoded = self.tokenizer(
                list(claims), list(pieces),
                truncation="only_second",
                max_length=self.config.max_tokens,
                padding=True,
                return_tensors="pt",
            )
        except Exception as exc:
            # Piece-side truncation cannot rescue an over-long claim.
            raise ClaimTooLongError(
                f"cannot fit claim within {self.config.max_tokens} tokens "
                f"by truncating the piece: {exc}"
            ) from exc
        with self.torch.no_grad():
            logits = self.model(**encoded).logits
        return self.torch.softmax(logits, dim=-1)[:, 1].tolist()


def load_model(config: ServingConfig):
    if config.model == "echo":
        return EchoModel(config)
    return TransformerModel(config)
