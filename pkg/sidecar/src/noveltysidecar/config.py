from __future__ import annotations

from dataclasses import dataclass


class SidecarError(Exception):
    pass


class DataFormatError(SidecarError):
    """Training export violates the pair JSONL contract."""


@dataclass(frozen=True)
class ServingConfig:
    """How to serve: which model, token budget, batching, request limit.

    ``model`` is either the literal ``"echo"`` (fake mode, every pair gets
    prob_label1 = 0.5, no model loaded) or a path to a saved artifact
    directory. ``max_tokens`` must not exceed the loaded model's positional
    capacity; that is checked against the artifact at load time.
    """

    model: str = "echo"
    max_tokens: int = 500
    batch_size: int = 16
    max_request_pairs: int = 1024
    port: int = 8400

    def __post_init__(self):
        if self.max_tokens < 8:
            raise SidecarError(f"max_tokens too small: {self.max_tokens}")
        if self.batch_size < 1:
            raise SidecarError("batch_size must be >= 1")
        if self.max_request_pairs < 1:
            raise SidecarError("max_request_pairs must be >= 1")
