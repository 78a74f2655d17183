"""COCO keypoint annotation JSON for one camera stream.

The document follows the standard COCO layout: images[], annotations[] with
51-element keypoint arrays, uncompressed column-major RLE segmentation, and
a single person category carrying the 17 keypoint names and skeleton edges.
Keypoints with flag 0 export as (0, 0, 0) per the COCO unlabeled convention.
"""

from __future__ import annotations

from pathlib import Path

from ..annotate import COCO_KEYPOINT_NAMES, COCO_SKELETON, FrameAnnotation
from .jsonio import write_canonical_json

PERSON_CATEGORY_ID = 1


def frame_file_name(frame_index: int) -> str:
    return f"frames/{frame_index:06d}.png"


def mask_file_name(frame_index: int) -> str:
    return f"masks/{frame_index:06d}.png"


def sidecar_file_name(frame_index: int) -> str:
    return f"joints3d/{frame_index:06d}.json"


def build_coco_document(
    frames: list[FrameAnnotation],
    image_ids: list[int] | None = None,
) -> dict:
    """Assemble the COCO dict; image_ids override the default 1-based order
    (used to keep ids globally unique across cameras in one dataset)."""
    if not frames:
        raise ValueError("cannot write a COCO document with no frames")
    if image_ids is None:
        image_ids = list(range(1, len(frames) + 1))
    if len(image_ids) != len(frames):
        raise ValueError("image_ids must align with frames")

    images = []
    annotations = []
    ann_id = 1
    for image_id, frame in zip(image_ids, frames):
        width, height = frame.image_size
        images.append(
            {
                "id": image_id,
                "file_name": frame_file_name(frame.frame_index),
                "width": width,
                "height": height,
            }
        )
        for person in frame.persons:
            keypoints: list[float] = []
            num_labeled = 0
            for u, v, flag in person.coco_keypoints:
                f = int(flag)
                if f == 0:
                    keypoints.extend([0.0, 0.0, 0])
                else:
                    keypoints.extend([float(u), float(v), f])
                    num_labeled += 1
            bbox = [0.0, 0.0, 0.0, 0.0] if person.bbox is None else [float(x) for x in person.bbox]
            annotations.append(
                {
                    "id": ann_id,
                    "image_id": image_id,
                    "category_id": PERSON_CATEGORY_ID,
                    "instance_id": person.instance_id,
                    "keypoints": keypoints,
                    "num_keypoints": num_labeled,
                    "bbox": bbox,
                    "segmentation": person.mask_rle,
                    "area": person.mask_area,
                    "iscrowd": 0,
                }
            )
            ann_id += 1

    return {
        "images": images,
        "annotations": annotations,
        "categories": [
            {
                "id": PERSON_CATEGORY_ID,
                "name": "person",
                "supercategory": "person",
                "keypoints": list(COCO_KEYPOINT_NAMES),
                "skeleton": [list(edge) for edge in COCO_SKELETON],
            }
        ],
    }


def write_coco(frames: list[FrameAnnotation], out_dir, image_ids: list[int] | None = None) -> Path:
    path = Path(out_dir) / "anno_coco.json"
    write_canonical_json(build_coco_document(frames, image_ids), path)
    return path
