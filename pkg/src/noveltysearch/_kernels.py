"""Hot numeric kernels behind the lexical classifier and score aggregation.

Each kernel ships in two equivalent flavors: a numba ``@njit`` version and a
pure-numpy fallback. ``NOVELTYSEARCH_NUMBA=0`` (or ``false``/``off``/``no``)
in the environment forces the fallback; otherwise numba is used whenever it
imports. Both flavors accumulate in identical order, so results are
bit-identical either way (see ``benchmarks/bench_kernels.py``).

Word-id sets are packed CSR-style: a flat value array plus an offsets array,
where row ``i`` spans ``vals[offs[i]:offs[i+1]]`` and holds sorted unique ids.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "NOVELTYSEARCH_NUMBA"


def _env_allows_numba() -> bool:
    return os.environ.get(_ENV_FLAG, "1").strip().lower() not in {
        "0", "false", "off", "no",
    }


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and _env_allows_numba()


# -- claim coverage ------------------------------------------------------
#
# For pair i, coverage = |claim_set_i ∩ piece_set_i| / |claim_set_i|.
# Claim rows must be non-empty; piece rows may be empty (coverage 0).

def coverage_numpy(claim_vals: np.ndarray, claim_offs: np.ndarray,
                   piece_vals: np.ndarray, piece_offs: np.ndarray) -> np.ndarray:
    n_pairs = claim_offs.size - 1
    out = np.zeros(n_pairs, dtype=np.float64)
    for i in range(n_pairs):
        claim = claim_vals[claim_offs[i]:claim_offs[i + 1]]
        piece = piece_vals[piece_offs[i]:piece_offs[i + 1]]
        if piece.size:
            hits = int(np.isin(claim, piece, assume_unique=True).sum())
        else:
            hits = 0
        out[i] = hits / claim.size
    return out


if _HAVE_NUMBA:

    @njit(cache=True)
    def _coverage_numba(claim_vals, claim_offs, piece_vals, piece_offs, out):
        for i in range(out.size):
            a, b = claim_offs[i], claim_offs[i + 1]
            c, d = piece_offs[i], piece_offs[i + 1]
            hits = 0
            j, k = a, c
            while j < b and k < d:
                cj = claim_vals[j]
                pk = piece_vals[k]
                if cj == pk:
                    hits += 1
                    j += 1
                    k += 1
                elif cj < pk:
                    j += 1
                else:
                    k += 1
            out[i] = hits / (b - a)
        return out

    def coverage_numba(claim_vals, claim_offs, piece_vals, piece_offs):
        out = np.zeros(claim_offs.size - 1, dtype=np.float64)
        return _coverage_numba(claim_vals, claim_offs, piece_vals, piece_offs, out)


def coverage(claim_vals: np.ndarray, claim_offs: np.ndarray,
             piece_vals: np.ndarray, piece_offs: np.ndarray) -> np.ndarray:
    """Per-pair claim coverage, dispatching on the configured flavor."""
    if NUMBA_ENABLED:
        return coverage_numba(claim_vals, claim_offs, piece_vals, piece_offs)
    return coverage_numpy(claim_vals, claim_offs, piece_vals, piece_offs)


# -- per-patent aggregation ----------------------------------------------
#
# Inputs are one row per classified piece: the owning patent's dense index,
# the stored 0/1 label, and the label-1 probability. Outputs are per-patent
# label counts and probability sums.

def aggregate_numpy(patent_idx: np.ndarray, labels: np.ndarray,
                    probs: np.ndarray, n_patents: int):
    n_total = np.bincount(patent_idx, minlength=n_patents)
    n_label1 = np.bincount(patent_idx[labels == 1], minlength=n_patents)
    sum_sigmoid = np.bincount(patent_idx, weights=probs, minlength=n_patents)
    return n_label1.astype(np.int64), (n_total - n_label1).astype(np.int64), sum_sigmoid


if _HAVE_NUMBA:

    @njit(cache=True)
    def _aggregate_numba(patent_idx, labels, probs, n_label1, n_total, sum_sigmoid):
        for i in range(patent_idx.size):
            p = patent_idx[i]
            n_total[p] += 1
            n_label1[p] += labels[i]
            sum_sigmoid[p] += probs[i]

    def aggregate_numba(patent_idx, labels, probs, n_patents):
        n_label1 = np.zeros(n_patents, dtype=np.int64)
        n_total = np.zeros(n_patents, dtype=np.int64)
        sum_sigmoid = np.zeros(n_patents, dtype=np.float64)
        _aggregate_numba(patent_idx, labels.astype(np.int64), probs,
                         n_label1, n_total, sum_sigmoid)
        return n_label1, n_total - n_label1, sum_sigmoid


def aggregate(patent_idx: np.ndarray, labels: np.ndarray, probs: np.ndarray,
              n_patents: int):
    """Per-patent ``(n_label1, n_label0, sum_sigmoid1)`` arrays."""
    if NUMBA_ENABLED:
        return aggregate_numba(patent_idx, labels, probs, n_patents)
    return aggregate_numpy(patent_idx, labels, probs, n_patents)
