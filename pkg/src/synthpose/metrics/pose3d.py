"""3D pose errors: MPJPE, PA-MPJPE, per-joint MPJPE, H36M-17 -> 16 mapping.

Inputs are (N, J, 3) arrays in millimeters with a consistent joint order.
MPJPE applies root-joint translation alignment first; PA-MPJPE solves a full
similarity (scale + rotation + translation) Procrustes fit per sample with
reflections disallowed.
"""

from __future__ import annotations

import numpy as np


class MetricError(ValueError):
    pass


# H36M order: 0 pelvis, 1-3 right leg, 4-6 left leg, 7 spine, 8 thorax,
# 9 neck/nose, 10 head, 11-13 left arm, 14-16 right arm. The default map
# selects source joints for the 16-joint order (pelvis, spine, neck, head,
# left arm, right arm, left leg, right leg); the nose-like joint 9 is
# dropped and the thorax stands in for the neck.
DEFAULT_H36M17_TO_16 = (0, 7, 8, 10, 11, 12, 13, 14, 15, 16, 4, 5, 6, 1, 2, 3)

JOINT16_NAMES = (
    "pelvis", "spine", "neck", "head",
    "l_shoulder", "l_elbow", "l_wrist",
    "r_shoulder", "r_elbow", "r_wrist",
    "l_hip", "l_knee", "l_ankle",
    "r_hip", "r_knee", "r_ankle",
)


def _as_samples(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[2] != 3:
        raise MetricError(f"expected (N, J, 3) joints, got shape {a.shape}")
    return a


def _check_pair(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = _as_samples(pred)
    gt = _as_samples(gt)
    if pred.shape != gt.shape:
        raise MetricError(f"prediction shape {pred.shape} != ground truth shape {gt.shape}")
    return pred, gt


def root_align(pred: np.ndarray, gt: np.ndarray, root: int) -> tuple[np.ndarray, np.ndarray]:
    """Subtract each set's own root joint; both roots land at the origin."""
    pred, gt = _check_pair(pred, gt)
    return pred - pred[:, root : root + 1], gt - gt[:, root : root + 1]


def mpjpe(pred: np.ndarray, gt: np.ndarray, root: int | None = 0) -> float:
    """Mean per-joint position error (mm) after root translation alignment.

    root None skips alignment (inputs already aligned).
    """
    pred, gt = _check_pair(pred, gt)
    if root is not None:
        pred, gt = root_align(pred, gt, root)
    return float(np.linalg.norm(pred - gt, axis=2).mean())


def per_joint_mpjpe(pred: np.ndarray, gt: np.ndarray, root: int | None = 0) -> np.ndarray:
    """Per-joint mean error over samples, (J,) in mm."""
    pred, gt = _check_pair(pred, gt)
    if root is not None:
        pred, gt = root_align(pred, gt, root)
    return np.linalg.norm(pred - gt, axis=2).mean(axis=0)


def similarity_align(pred: np.ndarray, gt: np.ndarray) -> np.ndarray:
    """Optimal similarity transform of one sample's prediction onto ground truth.

    Solves min over (s > 0, R with det +1, t) of sum ||s R p_j + t - g_j||^2
    by the centered-covariance SVD method with reflection correction.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    mu_p = pred.mean(axis=0)
    mu_g = gt.mean(axis=0)
    p0 = pred - mu_p
    g0 = gt - mu_g
    var_p = float((p0**2).sum())
    if var_p < 1e-12:
        raise MetricError("degenerate pose: all predicted joints coincide")
    cov = g0.T @ p0  # 3x3
    u, s, vt = np.linalg.svd(cov)
    d = np.sign(np.linalg.det(u @ vt))
    corr = np.diag([1.0, 1.0, d])
    rot = u @ corr @ vt
    scale = float((s * np.diag(corr)).sum()) / var_p
    t = mu_g - scale * rot @ mu_p
    return scale * pred @ rot.T + t


def pa_mpjpe(pred: np.ndarray, gt: np.ndarray) -> float:
    """Procrustes-aligned MPJPE (mm): per-sample similarity fit, then mean error."""
    pred, gt = _check_pair(pred, gt)
    errors = []
    for k in range(pred.shape[0]):
        aligned = similarity_align(pred[k], gt[k])
        errors.append(np.linalg.norm(aligned - gt[k], axis=1).mean())
    return float(np.mean(errors))


def map_h36m17_to_16(joints: np.ndarray, mapping: tuple[int, ...] | None = None) -> np.ndarray:
    """Select 16 joints from H36M-17 input; mapping overrides the default."""
    joints = np.asarray(joints, dtype=np.float64)
    squeeze = joints.ndim == 2
    if squeeze:
        joints = joints[None]
    if joints.shape[1] != 17:
        raise MetricError(f"expected 17 input joints, got {joints.shape[1]}")
    mapping = DEFAULT_H36M17_TO_16 if mapping is None else tuple(mapping)
    if len(mapping) != 16 or any(not 0 <= m < 17 for m in mapping):
        raise MetricError("joint mapping must list 16 indices into 0..16")
    out = joints[:, list(mapping)]
    return out[0] if squeeze else out
