"""Per-frame 3D joint sidecar files.

One JSON per frame holding, for every person, the 16 annotated joints in
world and camera coordinates (millimeters, keyed by joint name). Floats are
written with 6 fixed decimals so parsing recovers values to well under
1e-6 mm at scene scale.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..annotate import FrameAnnotation
from .coco import sidecar_file_name
from .jsonio import write_canonical_json


def sidecar_document(frame: FrameAnnotation, joint_names: list[str]) -> dict:
    persons = []
    for person in frame.persons:
        joints = {}
        for i, name in enumerate(joint_names):
            joints[name] = {
                "world_mm": [float(v) for v in person.joints3d_world[i]],
                "camera_mm": [float(v) for v in person.joints3d_camera[i]],
            }
        persons.append({"instance_id": person.instance_id, "joints": joints})
    return {
        "frame_index": frame.frame_index,
        "camera_id": frame.camera_id,
        "image_size": list(frame.image_size),
        "joint_order": list(joint_names),
        "persons": persons,
    }


def write_3d_sidecar(frame: FrameAnnotation, joint_names: list[str], out_dir) -> Path:
    path = Path(out_dir) / sidecar_file_name(frame.frame_index)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_canonical_json(sidecar_document(frame, joint_names), path)
    return path


def read_3d_sidecar(path) -> dict:
    """Parse a sidecar; joints come back as (16, 3) float arrays per person."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    order = doc["joint_order"]
    for person in doc["persons"]:
        world = np.array([person["joints"][n]["world_mm"] for n in order])
        camera = np.array([person["joints"][n]["camera_mm"] for n in order])
        person["world_mm"] = world
        person["camera_mm"] = camera
    return doc
