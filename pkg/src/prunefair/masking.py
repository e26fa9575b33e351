"""Unstructured pruning masks built from score matrices.

The budget is k = floor(ratio * cells) per layer (default) or
k = floor(ratio * row_length) per row. The k lowest-scoring cells are
pruned; ties are broken toward the lower row-major index, which makes the
result deterministic and makes the pruned set at a smaller ratio a subset
of the pruned set at a larger one.
"""

from dataclasses import dataclass
from math import floor

import numpy as np

GRANULARITIES = ("per_layer", "per_row")


@dataclass
class PruneMask:
    keep: np.ndarray  # [m, n] bool; False = pruned
    sparsity: float  # pruned fraction of all cells
    granularity: str


def _score_values(scores):
    values = getattr(scores, "values", scores)
    values = np.asarray(values)
    if values.ndim != 2 or values.size == 0:
        raise ValueError("scores must be a non-empty 2-D matrix")
    if not np.isfinite(values).all():
        raise ValueError("scores must be finite")
    return values


def build_mask(scores, ratio, granularity="per_layer") -> PruneMask:
    values = _score_values(scores)
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio %r outside [0, 1]" % (ratio,))
    if granularity not in GRANULARITIES:
        raise ValueError("unknown granularity %r" % (granularity,))
    m, n = values.shape
    keep = np.ones((m, n), dtype=bool)
    if granularity == "per_layer":
        k = floor(ratio * m * n)
        # stable sort on the flat view: equal scores keep row-major order
        order = np.argsort(values.ravel(), kind="stable")
        keep.ravel()[order[:k]] = False
    else:
        k = floor(ratio * n)
        for i in range(m):
            order = np.argsort(values[i], kind="stable")
            keep[i, order[:k]] = False
    pruned = int(m * n - keep.sum())
    return PruneMask(keep=keep, sparsity=pruned / (m * n), granularity=granularity)


def apply_mask(weight, mask) -> np.ndarray:
    w = np.asarray(weight)
    if w.shape != mask.keep.shape:
        raise ValueError("weight %r and mask %r differ" % (w.shape, mask.keep.shape))
    return np.where(mask.keep, w, np.zeros((), dtype=w.dtype))


def mask_jaccard(a, b) -> float:
    """Jaccard overlap of the two pruned sets; 1.0 when both prune nothing."""
    if a.keep.shape != b.keep.shape:
        raise ValueError("masks %r and %r differ" % (a.keep.shape, b.keep.shape))
    pa, pb = ~a.keep, ~b.keep
    union = int(np.logical_or(pa, pb).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(pa, pb).sum()) / union


def mask_to_tensor(mask) -> np.ndarray:
    return mask.keep.astype(np.float32)


def mask_from_tensor(values, granularity="per_layer") -> PruneMask:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError("mask tensor must be 2-D")
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("mask tensor entries must be 0.0 or 1.0")
    keep = arr.astype(bool)
    pruned = int(keep.size - keep.sum())
    return PruneMask(keep=keep, sparsity=pruned / keep.size, granularity=granularity)
