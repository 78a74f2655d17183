"""Binary mask intersection-over-union."""

from __future__ import annotations

import numpy as np

from .pose3d import MetricError


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """|a AND b| / |a OR b|; two empty masks count as identical (IoU 1)."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise MetricError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)
