"""Internal log-domain helpers shared by the classifier and the estimators."""

from __future__ import annotations

import numpy as np

__all__ = ["counted_log_factor"]


def counted_log_factor(counts: np.ndarray, log_table: np.ndarray) -> np.ndarray:
    """Sum counts * log_table over score axes, treating 0 * (-inf) as 0.

    counts has shape (N, *S); log_table has shape (*S, C).  Returns (N, C),
    with -inf wherever a positive count meets a -inf log entry.
    """
    score_axes = list(range(1, counts.ndim))
    table_axes = list(range(log_table.ndim - 1))
    finite = np.isfinite(log_table)
    safe = np.where(finite, log_table, 0.0)
    out = np.tensordot(counts, safe, axes=(score_axes, table_axes))
    hits = np.tensordot((counts > 0).astype(np.int64), (~finite).astype(np.int64),
                        axes=(score_axes, table_axes))
    out[hits > 0] = -np.inf
    return out
