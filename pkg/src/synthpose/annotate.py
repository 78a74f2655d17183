"""Per-frame annotation assembly and the two dataset filters.

Keypoint visibility flags follow the COCO convention:

    0  out of frame or behind the camera (the point is not labeled)
    1  in frame but occluded along the camera ray
    2  in frame and visible

Both 2D keypoint sets (the 16 projected skeleton joints and the 17 COCO
keypoints) carry these flags. 3D joints are exported in millimeters, in
world and camera coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from .camera import NEAR_PLANE, CameraModel, project_points
from .geometry.bvh import Bvh, point_visibility
from .geometry.raster import InstanceBuffer, mask_of, visible_bbox
from .rig import Skeleton, WorldPose, annotated_joint_positions
from .rle import encode_rle
from .transforms import quat_rotate

M_TO_MM = 1000.0

COCO_KEYPOINT_NAMES = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)

# canonical COCO person skeleton, 1-based keypoint indices
COCO_SKELETON = (
    (16, 14), (14, 12), (17, 15), (15, 13), (12, 13), (6, 12), (7, 13),
    (6, 7), (6, 8), (7, 9), (8, 10), (9, 11), (2, 3), (1, 2), (1, 3),
    (2, 4), (3, 5), (4, 6), (5, 7),
)


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class KeypointAttachment:
    coco_name: str
    joint: str
    offset: np.ndarray  # meters, in the joint's local frame

    def __post_init__(self) -> None:
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=np.float64).reshape(3))


class KeypointAttachmentTable:
    """Maps each of the 17 COCO keypoints to a skeleton joint + local offset."""

    def __init__(self, attachments: list[KeypointAttachment], skeleton: Skeleton):
        by_name = {a.coco_name: a for a in attachments}
        if len(by_name) != len(attachments):
            raise AnnotationError("duplicate COCO keypoint in attachment table")
        missing = [n for n in COCO_KEYPOINT_NAMES if n not in by_name]
        if missing:
            raise AnnotationError(f"attachment table missing keypoints: {', '.join(missing)}")
        extra = [n for n in by_name if n not in COCO_KEYPOINT_NAMES]
        if extra:
            raise AnnotationError(f"unknown COCO keypoint name(s): {', '.join(extra)}")
        for a in attachments:
            if a.joint not in skeleton.index_of:
                raise AnnotationError(f"keypoint '{a.coco_name}' attached to unknown joint '{a.joint}'")
        self.attachments = tuple(by_name[n] for n in COCO_KEYPOINT_NAMES)
        self.joint_indices = np.array([skeleton.index_of[a.joint] for a in self.attachments])
        self.offsets = np.stack([a.offset for a in self.attachments])


def load_attachment_table(text: str, skeleton: Skeleton) -> KeypointAttachmentTable:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise AnnotationError(f"attachment table parse error: {exc}") from exc
    entries = doc.get("keypoints") if isinstance(doc, dict) else None
    if not entries:
        raise AnnotationError("attachment table must contain a 'keypoints' list")
    attachments = [
        KeypointAttachment(e["name"], e["joint"], e.get("offset", [0.0, 0.0, 0.0])) for e in entries
    ]
    return KeypointAttachmentTable(attachments, skeleton)


def load_attachment_table_file(path, skeleton: Skeleton) -> KeypointAttachmentTable:
    with open(path, "r", encoding="utf-8") as fh:
        return load_attachment_table(fh.read(), skeleton)


def coco_world_points(
    table: KeypointAttachmentTable, skeleton: Skeleton, world: WorldPose
) -> np.ndarray:
    """World positions of the 17 COCO keypoints, (17, 3) meters."""
    pts = np.empty((len(table.attachments), 3))
    for i, j in enumerate(table.joint_indices):
        pts[i] = world.translations[j] + quat_rotate(world.rotations[j], table.offsets[i])
    return pts


def project_with_flags(
    world_points: np.ndarray, cam: CameraModel, bvh: Bvh | None, skin_tolerance: float
) -> np.ndarray:
    """(N, 3) rows of (u, v, flag) for world points.

    With bvh None only the in-frame test runs and every in-frame point gets
    flag 2 (used by the filtering pass, which does not need occlusion).
    """
    u, v, z = project_points(cam, world_points)
    out = np.zeros((world_points.shape[0], 3))
    origin = cam.origin_world()
    for i in range(world_points.shape[0]):
        if z[i] <= NEAR_PLANE:
            continue  # behind camera: flag 0, coordinates zeroed
        out[i, 0] = u[i]
        out[i, 1] = v[i]
        if not (0.0 <= u[i] < cam.width and 0.0 <= v[i] < cam.height):
            continue  # out of frame: flag 0
        if bvh is None or point_visibility(bvh, origin, world_points[i], skin_tolerance):
            out[i, 2] = 2.0
        else:
            out[i, 2] = 1.0
    return out


@dataclass(frozen=True)
class PersonAnnotation:
    instance_id: int
    joints3d_world: np.ndarray  # (16, 3) mm
    joints3d_camera: np.ndarray  # (16, 3) mm
    joints2d: np.ndarray  # (16, 3) u, v, flag
    coco_keypoints: np.ndarray  # (17, 3) u, v, flag
    bbox: tuple[int, int, int, int] | None  # x, y, w, h pixels
    mask_rle: dict  # {"size": [h, w], "counts": [...]}
    mask_area: int


@dataclass(frozen=True)
class FrameAnnotation:
    frame_index: int
    camera_id: str
    image_size: tuple[int, int]  # (width, height)
    persons: tuple[PersonAnnotation, ...]

    def __post_init__(self) -> None:
        ids = [p.instance_id for p in self.persons]
        if len(set(ids)) != len(ids):
            raise AnnotationError("instance ids must be unique within a frame")


@dataclass(frozen=True)
class PersonFrameInput:
    """One tracked character's posed skeleton for a single frame."""

    instance_id: int
    skeleton: Skeleton
    world_pose: WorldPose
    table: KeypointAttachmentTable


def annotate_frame(
    frame_index: int,
    cam: CameraModel,
    persons: list[PersonFrameInput],
    bvh: Bvh,
    buffer: InstanceBuffer,
    skin_tolerance: float,
) -> FrameAnnotation:
    """Assemble the full annotation record for one rendered frame.

    Persons with empty masks keep their keypoint data; bbox is None and the
    RLE encodes an all-background mask.
    """
    annotated: list[PersonAnnotation] = []
    for person in persons:
        joints_world = annotated_joint_positions(person.skeleton, person.world_pose)
        joints_cam = cam.extrinsic.apply(joints_world)
        coco_world = coco_world_points(person.table, person.skeleton, person.world_pose)

        joints2d = project_with_flags(joints_world, cam, bvh, skin_tolerance)
        coco2d = project_with_flags(coco_world, cam, bvh, skin_tolerance)

        mask = mask_of(buffer, person.instance_id)
        bbox = visible_bbox(mask)
        annotated.append(
            PersonAnnotation(
                instance_id=person.instance_id,
                joints3d_world=joints_world * M_TO_MM,
                joints3d_camera=joints_cam * M_TO_MM,
                joints2d=joints2d,
                coco_keypoints=coco2d,
                bbox=bbox,
                mask_rle=encode_rle(mask),
                mask_area=int(mask.sum()),
            )
        )
    return FrameAnnotation(
        frame_index=frame_index,
        camera_id=cam.id,
        image_size=(cam.width, cam.height),
        persons=tuple(annotated),
    )


def boundary_filter(frame: FrameAnnotation) -> bool:
    """True = keep. A frame is dropped when any tracked person has any of its
    17 COCO keypoints or 16 projected joints out of frame (flag 0)."""
    for person in frame.persons:
        if np.any(person.joints2d[:, 2] == 0) or np.any(person.coco_keypoints[:, 2] == 0):
            return False
    return True


class RedundancyFilter:
    """Temporal redundancy filter over one camera stream.

    Keeps a frame when at least one person moved by >= threshold_mm, where
    motion is the sum over the 16 joints of camera-space Euclidean distance
    to the last kept frame. A change in the set of present persons always
    keeps the frame. Kept frames become the new reference.
    """

    def __init__(self, threshold_mm: float):
        if threshold_mm < 0:
            raise AnnotationError("redundancy threshold must be >= 0")
        self.threshold_mm = threshold_mm
        self._reference: dict[int, np.ndarray] | None = None

    def keep(self, joints_camera_mm: dict[int, np.ndarray]) -> bool:
        current = {i: np.asarray(j, dtype=np.float64) for i, j in joints_camera_mm.items()}
        if self._reference is None or set(current) != set(self._reference):
            self._reference = current
            return True
        for instance_id, joints in current.items():
            motion = float(np.linalg.norm(joints - self._reference[instance_id], axis=1).sum())
            if motion >= self.threshold_mm:
                self._reference = current
                return True
        return False


def person_motion_mm(last: np.ndarray, current: np.ndarray) -> float:
    """Sum over joints of camera-space displacement, in millimeters."""
    last = np.asarray(last, dtype=np.float64)
    current = np.asarray(current, dtype=np.float64)
    if last.shape != current.shape:
        raise AnnotationError("joint sets must match between frames")
    return float(np.linalg.norm(current - last, axis=1).sum())
