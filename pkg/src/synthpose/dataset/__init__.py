from .coco import build_coco_document, write_coco
from .masks import read_mask_png, write_mask_png, write_rgb_png
from .sidecar import read_3d_sidecar, sidecar_document, write_3d_sidecar
from .split import SplitError, split_frames, write_splits
from .jsonio import dump_canonical_json

__all__ = [
    "build_coco_document",
    "write_coco",
    "write_mask_png",
    "read_mask_png",
    "write_rgb_png",
    "write_3d_sidecar",
    "read_3d_sidecar",
    "sidecar_document",
    "split_frames",
    "write_splits",
    "SplitError",
    "dump_canonical_json",
]
