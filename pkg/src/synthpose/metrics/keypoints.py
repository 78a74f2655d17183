"""Object Keypoint Similarity and COCO-style AP/AR for keypoint detection.

OKS for one prediction/ground-truth pair:

    OKS = mean over labeled keypoints of exp(-d_i^2 / (2 * area * (2*sigma_i)^2))

where d_i is the pixel distance, area is the object scale (ground-truth mask
pixel count), and sigma_i are the published COCO per-keypoint constants
(overridable). Matching is greedy by descending prediction score against the
highest-OKS unmatched ground truth in the same image; AP uses 101-point
interpolation and AR is recall over the full (score-capped) prediction list,
both averaged over the 0.50:0.05:0.95 thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pose3d import MetricError

# canonical published per-keypoint constants, COCO keypoint order
COCO_SIGMAS = np.array(
    [
        0.026, 0.025, 0.025, 0.035, 0.035,
        0.079, 0.079, 0.072, 0.072, 0.062, 0.062,
        0.107, 0.107, 0.087, 0.087, 0.089, 0.089,
    ]
)

DEFAULT_THRESHOLDS = np.round(np.arange(0.50, 0.951, 0.05), 2)
DEFAULT_MAX_DETECTIONS = 20
_RECALL_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class KeypointPrediction:
    image_id: int
    keypoints: np.ndarray  # (17, 2) or (17, 3); only x, y are used
    score: float

    def __post_init__(self) -> None:
        kp = np.asarray(self.keypoints, dtype=np.float64)
        if kp.ndim != 2 or kp.shape[0] != 17 or kp.shape[1] not in (2, 3):
            raise MetricError(f"prediction keypoints must be (17, 2|3), got {kp.shape}")
        object.__setattr__(self, "keypoints", kp[:, :2])
        if not 0.0 <= self.score <= 1.0:
            raise MetricError("prediction score must be in [0, 1]")


@dataclass(frozen=True)
class GroundTruthKeypoints:
    image_id: int
    keypoints: np.ndarray  # (17, 3) with x, y, flag
    area: float  # object scale in px^2 (mask pixel count)

    def __post_init__(self) -> None:
        kp = np.asarray(self.keypoints, dtype=np.float64)
        if kp.shape != (17, 3):
            raise MetricError(f"ground truth keypoints must be (17, 3), got {kp.shape}")
        object.__setattr__(self, "keypoints", kp)

    @property
    def num_labeled(self) -> int:
        return int((self.keypoints[:, 2] > 0).sum())


def oks(
    pred_keypoints: np.ndarray,
    gt_keypoints: np.ndarray,
    area: float,
    sigmas: np.ndarray | None = None,
) -> float:
    """Similarity of predicted (17, 2) keypoints to labeled ground truth."""
    if area <= 0:
        raise MetricError("OKS area must be positive")
    sigmas = COCO_SIGMAS if sigmas is None else np.asarray(sigmas, dtype=np.float64)
    pred = np.asarray(pred_keypoints, dtype=np.float64)[:, :2]
    gt = np.asarray(gt_keypoints, dtype=np.float64)
    labeled = gt[:, 2] > 0
    if not labeled.any():
        raise MetricError("OKS undefined: ground truth has no labeled keypoints")
    d2 = ((pred[labeled] - gt[labeled, :2]) ** 2).sum(axis=1)
    k2 = (2.0 * sigmas[labeled]) ** 2
    return float(np.exp(-d2 / (2.0 * area * k2)).mean())


def _greedy_match(
    preds: list[KeypointPrediction],
    gts: list[GroundTruthKeypoints],
    threshold: float,
    sigmas: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Match globally score-sorted predictions to per-image ground truths.

    Returns (tp flags aligned with the sorted predictions, number of
    matchable ground truths).
    """
    gts_by_image: dict[int, list[GroundTruthKeypoints]] = {}
    for gt in gts:
        if gt.num_labeled > 0:
            gts_by_image.setdefault(gt.image_id, []).append(gt)
    n_gt = sum(len(v) for v in gts_by_image.values())

    matched: dict[int, list[bool]] = {i: [False] * len(v) for i, v in gts_by_image.items()}
    tp = np.zeros(len(preds), dtype=bool)
    for k, pred in enumerate(preds):
        candidates = gts_by_image.get(pred.image_id, [])
        best_oks = 0.0
        best_j = -1
        for j, gt in enumerate(candidates):
            if matched[pred.image_id][j]:
                continue
            score = oks(pred.keypoints, gt.keypoints, gt.area, sigmas)
            if score > best_oks:
                best_oks = score
                best_j = j
        if best_j >= 0 and best_oks >= threshold:
            matched[pred.image_id][best_j] = True
            tp[k] = True
    return tp, n_gt


def _interpolated_ap(tp: np.ndarray, n_gt: int) -> float:
    if n_gt == 0:
        return 0.0
    if tp.size == 0:
        return 0.0
    cum_tp = np.cumsum(tp)
    precision = cum_tp / np.arange(1, tp.size + 1)
    recall = cum_tp / n_gt
    # precision envelope: best precision at any recall >= r
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    ap = 0.0
    for r in _RECALL_GRID:
        idx = np.searchsorted(recall, r, side="left")
        ap += envelope[idx] if idx < envelope.size else 0.0
    return ap / _RECALL_GRID.size


def keypoint_ap(
    predictions: list[KeypointPrediction],
    ground_truths: list[GroundTruthKeypoints],
    thresholds: np.ndarray | None = None,
    sigmas: np.ndarray | None = None,
    max_detections: int = DEFAULT_MAX_DETECTIONS,
) -> dict[str, float]:
    """COCO keypoint evaluation: AP (mean over thresholds), AP50, AP75, AR."""
    thresholds = DEFAULT_THRESHOLDS if thresholds is None else np.asarray(thresholds)
    sigmas = COCO_SIGMAS if sigmas is None else np.asarray(sigmas, dtype=np.float64)

    by_image: dict[int, list[tuple[int, KeypointPrediction]]] = {}
    for i, p in enumerate(predictions):
        by_image.setdefault(p.image_id, []).append((i, p))
    kept: list[tuple[float, int, int, KeypointPrediction]] = []
    for image_id, entries in by_image.items():
        entries.sort(key=lambda e: (-e[1].score, e[0]))
        for i, p in entries[:max_detections]:
            kept.append((-p.score, image_id, i, p))
    kept.sort()
    ordered = [p for _, _, _, p in kept]

    ap_per_threshold = []
    ar_per_threshold = []
    ap50 = ap75 = 0.0
    for threshold in thresholds:
        tp, n_gt = _greedy_match(ordered, ground_truths, float(threshold), sigmas)
        ap_t = _interpolated_ap(tp, n_gt)
        ar_t = float(tp.sum() / n_gt) if n_gt else 0.0
        ap_per_threshold.append(ap_t)
        ar_per_threshold.append(ar_t)
        if np.isclose(threshold, 0.50):
            ap50 = ap_t
        if np.isclose(threshold, 0.75):
            ap75 = ap_t

    return {
        "AP": float(np.mean(ap_per_threshold)) if ap_per_threshold else 0.0,
        "AP50": ap50,
        "AP75": ap75,
        "AR": float(np.mean(ar_per_threshold)) if ar_per_threshold else 0.0,
    }
