"""Inference sidecar: serves a claim/piece relevance model over /v1."""

__version__ = "0.1.0"
