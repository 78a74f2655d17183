"""Pinhole camera model: FOV-derived intrinsics, projection, calibration files.

Camera frame is right-handed with +x right, +y down, +z forward along the
optical axis. Pixel (0, 0) is the top-left corner of the top-left pixel and
pixel centers sit at half-integer coordinates, so u ∈ [0, width) is in frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .transforms import RigidTransform, quat_from_matrix

NEAR_PLANE = 1e-4  # meters; projections at or behind this depth are rejected


class CameraError(ValueError):
    pass


def intrinsics_from_fov(fov_h_deg: float, width: int, height: int) -> tuple[float, float, float, float]:
    """(fx, fy, cx, cy) for a horizontal FOV; square pixels, centered principal point."""
    if not 0.0 < fov_h_deg < 180.0:
        raise CameraError(f"horizontal FOV must be in (0, 180) degrees, got {fov_h_deg}")
    fx = width / (2.0 * math.tan(math.radians(fov_h_deg) / 2.0))
    return fx, fx, width / 2.0, height / 2.0


@dataclass(frozen=True)
class PixelPoint:
    u: float
    v: float
    depth: float  # camera-space Z, meters


@dataclass(frozen=True)
class CameraModel:
    id: str
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float
    extrinsic: RigidTransform  # world -> camera
    fov_h_deg: float | None = None

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise CameraError("image dimensions must be positive")
        if self.fx <= 0 or self.fy <= 0:
            raise CameraError("focal lengths must be positive")
        if not (0 <= self.cx <= self.width and 0 <= self.cy <= self.height):
            raise CameraError("principal point must lie within the image")

    @classmethod
    def from_fov(
        cls,
        cam_id: str,
        position,
        look_at,
        fov_h_deg: float,
        width: int,
        height: int,
    ) -> "CameraModel":
        fx, fy, cx, cy = intrinsics_from_fov(fov_h_deg, width, height)
        return cls(
            id=cam_id,
            width=width,
            height=height,
            fx=fx,
            fy=fy,
            cx=cx,
            cy=cy,
            extrinsic=look_at_extrinsic(position, look_at),
            fov_h_deg=fov_h_deg,
        )

    def origin_world(self) -> np.ndarray:
        """Camera center expressed in world coordinates."""
        return self.extrinsic.inverse().translation


def look_at_extrinsic(position, target, world_up=(0.0, 0.0, 1.0)) -> RigidTransform:
    """World->camera transform for a camera at `position` aimed at `target`."""
    position = np.asarray(position, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    forward = target - position
    n = np.linalg.norm(forward)
    if n == 0.0:
        raise CameraError("camera position and look-at target coincide")
    forward /= n
    up = np.asarray(world_up, dtype=np.float64)
    right = np.cross(forward, up)
    if np.linalg.norm(right) < 1e-9:
        # looking straight along world up; pick an arbitrary horizontal right
        right = np.cross(forward, np.array([0.0, 1.0, 0.0]))
        if np.linalg.norm(right) < 1e-9:
            right = np.cross(forward, np.array([1.0, 0.0, 0.0]))
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rot = np.stack([right, down, forward])  # rows: camera axes in world coords
    return RigidTransform(quat_from_matrix(rot), -rot @ position)


def world_to_camera(cam: CameraModel, points: np.ndarray) -> np.ndarray:
    """Apply the extrinsic; accepts a single 3-vector or an (N, 3) array."""
    return cam.extrinsic.apply(np.asarray(points, dtype=np.float64))


def project(cam: CameraModel, point) -> PixelPoint | None:
    """Project one world point; None marks a point at or behind the near plane."""
    x, y, z = world_to_camera(cam, point)
    if z <= NEAR_PLANE:
        return None
    return PixelPoint(cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy, z)


def project_points(cam: CameraModel, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized projection of (N, 3) world points.

    Returns (u, v, depth); entries with depth <= NEAR_PLANE are behind the
    camera and their u, v are not meaningful.
    """
    p = world_to_camera(cam, points)
    z = p[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = cam.fx * p[:, 0] / z + cam.cx
        v = cam.fy * p[:, 1] / z + cam.cy
    return u, v, z


def in_frame(cam: CameraModel, pp: PixelPoint | None) -> bool:
    if pp is None:
        return False
    return 0.0 <= pp.u < cam.width and 0.0 <= pp.v < cam.height and pp.depth > NEAR_PLANE


def in_frame_uv(cam: CameraModel, u: np.ndarray, v: np.ndarray, depth: np.ndarray) -> np.ndarray:
    """Vectorized in_frame over projected arrays."""
    return (u >= 0.0) & (u < cam.width) & (v >= 0.0) & (v < cam.height) & (depth > NEAR_PLANE)


def unproject(cam: CameraModel, u: float, v: float, depth: float) -> np.ndarray:
    """Inverse of project for depth > 0: pixel + depth back to a world point."""
    x = (u - cam.cx) / cam.fx * depth
    y = (v - cam.cy) / cam.fy * depth
    return cam.extrinsic.inverse().apply(np.array([x, y, depth]))


def intrinsic_matrix(cam: CameraModel) -> np.ndarray:
    return np.array([[cam.fx, 0.0, cam.cx], [0.0, cam.fy, cam.cy], [0.0, 0.0, 1.0]])


def extrinsic_matrix(cam: CameraModel) -> np.ndarray:
    """3x4 [R|t] world->camera."""
    m = np.empty((3, 4))
    m[:, :3] = cam.extrinsic.rotation_matrix()
    m[:, 3] = cam.extrinsic.translation
    return m


def calibration_dict(cam: CameraModel) -> dict:
    return {
        "id": cam.id,
        "width": cam.width,
        "height": cam.height,
        "fov_h_deg": cam.fov_h_deg,
        "K": [[float(v) for v in row] for row in intrinsic_matrix(cam)],
        "extrinsic": [[float(v) for v in row] for row in extrinsic_matrix(cam)],
    }


def write_calibration(cam: CameraModel, path) -> None:
    from .dataset.jsonio import dump_canonical_json

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_canonical_json(calibration_dict(cam), float_fmt="%.9g"))


def load_calibration(path) -> CameraModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    k = np.asarray(doc["K"], dtype=np.float64)
    ext = np.asarray(doc["extrinsic"], dtype=np.float64)
    return CameraModel(
        id=doc["id"],
        width=int(doc["width"]),
        height=int(doc["height"]),
        fx=float(k[0, 0]),
        fy=float(k[1, 1]),
        cx=float(k[0, 2]),
        cy=float(k[1, 2]),
        extrinsic=RigidTransform(quat_from_matrix(ext[:, :3]), ext[:, 3]),
        fov_h_deg=doc.get("fov_h_deg"),
    )
