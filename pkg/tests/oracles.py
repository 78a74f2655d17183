"""Independent reference implementations used to check the package.

Everything here is deliberately written from the ground truth definitions
(homogeneous matrices, exhaustive triangle loops, a standalone COCO reader)
rather than reusing package code paths, so tests compare two independent
routes to the same answer.
"""

from __future__ import annotations

import json
import math

import numpy as np

RAY_EPS = 1e-6
DET_EPS = 1e-12


# ---------------------------------------------------------------- kinematics

def quat_to_mat44(q, t):
    w, x, y, z = q
    m = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y), t[0]],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x), t[1]],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y), t[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return m


def fk_matrix_chain(parents, local_quats, local_trans):
    """Forward kinematics by explicit 4x4 matrix products."""
    n = len(parents)
    mats = [None] * n
    for j in range(n):
        local = quat_to_mat44(local_quats[j], local_trans[j])
        mats[j] = local if parents[j] is None else mats[parents[j]] @ local
    return np.stack([m[:3, 3] for m in mats]), mats


# ------------------------------------------------------------- ray casting

def ray_triangle(origin, direction, a, b, c, t_max):
    """Scalar Möller-Trumbore with inclusive edges; returns t or None."""
    e1 = b - a
    e2 = c - a
    pvec = np.cross(direction, e2)
    det = float(np.dot(e1, pvec))
    if abs(det) <= DET_EPS:
        return None
    inv = 1.0 / det
    tvec = origin - a
    u = float(np.dot(tvec, pvec)) * inv
    if u < 0.0:
        return None
    qvec = np.cross(tvec, e1)
    v = float(np.dot(direction, qvec)) * inv
    if v < 0.0 or u + v > 1.0:
        return None
    t = float(np.dot(e2, qvec)) * inv
    if not (RAY_EPS < t < t_max):
        return None
    return t


def brute_force_nearest(triangles, instance_ids, origin, direction, t_max):
    """Exhaustive loop over every triangle; ties break to the lowest index.

    Returns (t, instance_id, triangle_index) or None.
    """
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    best = None
    for i in range(len(triangles)):
        t = ray_triangle(origin, direction, triangles[i, 0], triangles[i, 1], triangles[i, 2], t_max)
        if t is None:
            continue
        if best is None or t < best[0]:
            best = (t, int(instance_ids[i]), i)
    return best


def brute_force_nearest_fast(triangles, instance_ids, origin, direction, t_max):
    """Vectorized exhaustive nearest hit; same contract as brute_force_nearest."""
    origin = np.asarray(origin, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    a = triangles[:, 0]
    e1 = triangles[:, 1] - a
    e2 = triangles[:, 2] - a
    pvec = np.cross(direction, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) > DET_EPS
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = origin - a
    u = np.einsum("ij,ij->i", tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    v = (qvec @ direction) * inv
    t = np.einsum("ij,ij->i", e2, qvec) * inv
    ok &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > RAY_EPS) & (t < t_max)
    if not ok.any():
        return None
    idx = np.nonzero(ok)[0]
    best = idx[np.argmin(t[idx])]  # argmin returns the first minimum: lowest index ties
    return (float(t[best]), int(instance_ids[best]), int(best))


def all_hits_sorted(triangles, origin, direction, t_max):
    """Every hit distance along the ray, sorted ascending (for edge analysis)."""
    hits = []
    for i in range(len(triangles)):
        t = ray_triangle(origin, direction, triangles[i, 0], triangles[i, 1], triangles[i, 2], t_max)
        if t is not None:
            hits.append(t)
    return sorted(hits)


def visibility_by_ray(triangles, instance_ids, camera_origin, point, delta):
    origin = np.asarray(camera_origin, dtype=np.float64)
    point = np.asarray(point, dtype=np.float64)
    diff = point - origin
    dist = float(np.linalg.norm(diff))
    limit = dist - delta
    if limit <= RAY_EPS:
        return True
    return brute_force_nearest_fast(triangles, instance_ids, origin, diff / dist, limit) is None


def raycast_instance_image(triangles, instance_ids, cam, max_depth=1e9):
    """Per-pixel-center ray casting oracle for the rasterizer.

    Returns an (H, W) int array of instance ids, -1 where no hit.
    """
    rot = cam.extrinsic.rotation_matrix()
    origin = cam.origin_world()
    out = np.full((cam.height, cam.width), -1, dtype=np.int32)
    for py in range(cam.height):
        for px in range(cam.width):
            d_cam = np.array(
                [(px + 0.5 - cam.cx) / cam.fx, (py + 0.5 - cam.cy) / cam.fy, 1.0]
            )
            d_world = rot.T @ d_cam
            d_world /= np.linalg.norm(d_world)
            hit = brute_force_nearest_fast(triangles, instance_ids, origin, d_world, max_depth)
            if hit is not None:
                out[py, px] = hit[1]
    return out


# ------------------------------------------------------------- COCO reading

COCO_KEYPOINT_COUNT = 17


class CocoReadError(Exception):
    pass


def read_coco_file(path):
    """Standalone COCO keypoint dataset reader with schema checks.

    Returns (images by id, annotations by id, category). Raises CocoReadError
    on any schema violation.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("images", "annotations", "categories"):
        if key not in doc or not isinstance(doc[key], list):
            raise CocoReadError(f"missing or malformed '{key}'")
    if len(doc["categories"]) != 1:
        raise CocoReadError("expected a single person category")
    cat = doc["categories"][0]
    if len(cat.get("keypoints", [])) != COCO_KEYPOINT_COUNT:
        raise CocoReadError("category must define 17 keypoint names")
    for edge in cat.get("skeleton", []):
        if not (1 <= edge[0] <= 17 and 1 <= edge[1] <= 17):
            raise CocoReadError("skeleton edges must be 1-based keypoint indices")

    images = {}
    for img in doc["images"]:
        for key in ("id", "file_name", "width", "height"):
            if key not in img:
                raise CocoReadError(f"image missing '{key}'")
        if img["id"] in images:
            raise CocoReadError(f"duplicate image id {img['id']}")
        images[img["id"]] = img

    annotations = {}
    for ann in doc["annotations"]:
        for key in (
            "id", "image_id", "category_id", "keypoints", "num_keypoints",
            "bbox", "segmentation", "area", "iscrowd",
        ):
            if key not in ann:
                raise CocoReadError(f"annotation missing '{key}'")
        if ann["id"] in annotations:
            raise CocoReadError(f"duplicate annotation id {ann['id']}")
        if ann["image_id"] not in images:
            raise CocoReadError(f"annotation {ann['id']} references unknown image")
        kp = ann["keypoints"]
        if len(kp) != COCO_KEYPOINT_COUNT * 3:
            raise CocoReadError(f"annotation {ann['id']}: keypoints length {len(kp)} != 51")
        flags = kp[2::3]
        if any(f not in (0, 1, 2) for f in flags):
            raise CocoReadError(f"annotation {ann['id']}: bad visibility flag")
        if sum(1 for f in flags if f > 0) != ann["num_keypoints"]:
            raise CocoReadError(f"annotation {ann['id']}: num_keypoints mismatch")
        if len(ann["bbox"]) != 4:
            raise CocoReadError(f"annotation {ann['id']}: bbox must be xywh")
        annotations[ann["id"]] = ann
    return images, annotations, cat


def decode_coco_rle(segmentation):
    """Independent decoder for COCO uncompressed column-major RLE."""
    h, w = segmentation["size"]
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    val = False
    for count in segmentation["counts"]:
        if val:
            flat[pos : pos + count] = True
        pos += count
        val = not val
    if pos != h * w:
        raise CocoReadError("RLE counts do not cover the mask")
    return flat.reshape((h, w), order="F")


# ------------------------------------------------------------------ helpers

def random_unit_quaternion(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_rotation_matrix(rng):
    q = random_unit_quaternion(rng)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_about(axis, angle):
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    k = np.array(
        [[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]
    )
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)
