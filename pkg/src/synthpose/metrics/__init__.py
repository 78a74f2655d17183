from .pose3d import (
    DEFAULT_H36M17_TO_16,
    map_h36m17_to_16,
    mpjpe,
    pa_mpjpe,
    per_joint_mpjpe,
    root_align,
    similarity_align,
)
from .keypoints import COCO_SIGMAS, GroundTruthKeypoints, KeypointPrediction, keypoint_ap, oks
from .segmentation import mask_iou

__all__ = [
    "root_align",
    "mpjpe",
    "pa_mpjpe",
    "per_joint_mpjpe",
    "similarity_align",
    "map_h36m17_to_16",
    "DEFAULT_H36M17_TO_16",
    "oks",
    "keypoint_ap",
    "KeypointPrediction",
    "GroundTruthKeypoints",
    "COCO_SIGMAS",
    "mask_iou",
]
