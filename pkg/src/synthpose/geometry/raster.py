"""Software z-buffer rasterizer producing per-pixel instance ids and depth.

Sampling is at pixel centers (x + 0.5, y + 0.5). Coverage uses edge
functions with a top-left boundary rule so a pixel exactly on an edge shared
by two triangles is owned by exactly one of them. Triangles are clipped
against the camera near plane before projection. At exactly equal depth the
lower instance id wins (then the lower triangle index), which makes the
output deterministic regardless of triangle submission order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..camera import NEAR_PLANE, CameraModel
from .mesh import TaggedTriangleSet

EMPTY_ID = -1


@dataclass
class InstanceBuffer:
    """Per-pixel instance id (EMPTY_ID where no geometry), depth, triangle index."""

    ids: np.ndarray  # (H, W) int16
    depth: np.ndarray  # (H, W) float64, +inf where empty
    tri_index: np.ndarray  # (H, W) int32 into the rasterized TaggedTriangleSet, -1 empty

    @property
    def width(self) -> int:
        return self.ids.shape[1]

    @property
    def height(self) -> int:
        return self.ids.shape[0]

    @classmethod
    def empty(cls, width: int, height: int) -> "InstanceBuffer":
        return cls(
            ids=np.full((height, width), EMPTY_ID, dtype=np.int16),
            depth=np.full((height, width), np.inf),
            tri_index=np.full((height, width), -1, dtype=np.int32),
        )


def _clip_near(tri_cam: np.ndarray) -> list[np.ndarray]:
    """Sutherland-Hodgman clip of one camera-space triangle against z >= NEAR_PLANE.

    Returns 0, 1, or 2 triangles (a clipped quad is fanned).
    """
    z = tri_cam[:, 2]
    inside = z > NEAR_PLANE
    n_in = int(inside.sum())
    if n_in == 3:
        return [tri_cam]
    if n_in == 0:
        return []
    poly: list[np.ndarray] = []
    for i in range(3):
        a, b = tri_cam[i], tri_cam[(i + 1) % 3]
        ain, bin_ = inside[i], inside[(i + 1) % 3]
        if ain:
            poly.append(a)
        if ain != bin_:
            s = (NEAR_PLANE - a[2]) / (b[2] - a[2])
            poly.append(a + s * (b - a))
    if len(poly) < 3:
        return []
    tris = [np.stack([poly[0], poly[k], poly[k + 1]]) for k in range(1, len(poly) - 1)]
    return tris


def _edge_coeffs(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float, bool]:
    """Coefficients of E(p) = A*px + B*py + C for edge a->b, plus the
    top-left acceptance of the E == 0 boundary."""
    ax, ay = a
    bx, by = b
    aa = float(ay - by)  # coefficient of px
    bb = float(bx - ax)  # coefficient of py
    cc = float(ax * by - ay * bx)
    dx, dy = bx - ax, by - ay
    accept = dy < 0.0 or (dy == 0.0 and dx > 0.0)
    return aa, bb, cc, accept


def rasterize_instances(tri_set: TaggedTriangleSet, cam: CameraModel) -> InstanceBuffer:
    buf = InstanceBuffer.empty(cam.width, cam.height)
    if len(tri_set) == 0:
        return buf

    rot = cam.extrinsic.rotation_matrix()
    trans = cam.extrinsic.translation
    cam_verts = tri_set.vertices @ rot.T + trans  # (T, 3, 3)

    ids = buf.ids
    depth = buf.depth
    tri_buf = buf.tri_index
    width, height = cam.width, cam.height

    for t_idx in range(len(tri_set)):
        inst = int(tri_set.instance_ids[t_idx])
        for tri_cam in _clip_near(cam_verts[t_idx]):
            z = tri_cam[:, 2]
            inv_z = 1.0 / z
            sx = cam.fx * tri_cam[:, 0] * inv_z + cam.cx
            sy = cam.fy * tri_cam[:, 1] * inv_z + cam.cy
            v = np.stack([sx, sy], axis=1)

            area2 = (v[1, 0] - v[0, 0]) * (v[2, 1] - v[0, 1]) - (v[1, 1] - v[0, 1]) * (
                v[2, 0] - v[0, 0]
            )
            if area2 == 0.0:
                continue
            if area2 < 0.0:
                v = v[[0, 2, 1]]
                inv_z = inv_z[[0, 2, 1]]
                area2 = -area2

            x0 = max(0, int(np.ceil(v[:, 0].min() - 0.5)))
            x1 = min(width - 1, int(np.floor(v[:, 0].max() - 0.5)))
            y0 = max(0, int(np.ceil(v[:, 1].min() - 0.5)))
            y1 = min(height - 1, int(np.floor(v[:, 1].max() - 0.5)))
            if x0 > x1 or y0 > y1:
                continue

            px = np.arange(x0, x1 + 1) + 0.5
            py = np.arange(y0, y1 + 1) + 0.5

            covered = None
            lam_iz = None
            # edge k runs from vertex k+1 to k+2; its E is the barycentric
            # weight (times area2) of vertex k
            for k in range(3):
                a = v[(k + 1) % 3]
                b = v[(k + 2) % 3]
                aa, bb, cc, accept = _edge_coeffs(a, b)
                e = np.add.outer(bb * py, aa * px) + cc
                inside = (e > 0.0) | ((e == 0.0) if accept else False)
                covered = inside if covered is None else (covered & inside)
                contrib = (e / area2) * inv_z[k]
                lam_iz = contrib if lam_iz is None else lam_iz + contrib
            if not covered.any():
                continue

            ys, xs = np.nonzero(covered)
            zpix = 1.0 / lam_iz[ys, xs]
            gys = ys + y0
            gxs = xs + x0
            old_z = depth[gys, gxs]
            old_id = ids[gys, gxs]
            old_tri = tri_buf[gys, gxs]
            better = (zpix < old_z) | (
                (zpix == old_z) & ((inst < old_id) | ((inst == old_id) & (t_idx < old_tri)))
            )
            if not better.any():
                continue
            sel = np.nonzero(better)[0]
            depth[gys[sel], gxs[sel]] = zpix[sel]
            ids[gys[sel], gxs[sel]] = inst
            tri_buf[gys[sel], gxs[sel]] = t_idx

    return buf


def mask_of(buffer: InstanceBuffer, instance_id: int) -> np.ndarray:
    """Boolean (H, W) mask of pixels owned by a tracked person."""
    if not 1 <= instance_id <= 255:
        raise ValueError("person instance ids are 1..255")
    return buffer.ids == instance_id


def visible_bbox(mask: np.ndarray) -> tuple[int, int, int, int] | None:
    """Tight (x, y, w, h) around true pixels, or None for an empty mask."""
    rows = np.any(mask, axis=1)
    if not rows.any():
        return None
    cols = np.any(mask, axis=0)
    y0 = int(np.argmax(rows))
    y1 = int(len(rows) - 1 - np.argmax(rows[::-1]))
    x0 = int(np.argmax(cols))
    x1 = int(len(cols) - 1 - np.argmax(cols[::-1]))
    return (x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def _instance_color(instance_id: int) -> np.ndarray:
    """Stable, well-separated tint per person id (golden-angle hue walk)."""
    import colorsys

    hue = (instance_id * 0.618033988749895) % 1.0
    return np.array(colorsys.hsv_to_rgb(hue, 0.55, 1.0))


def shade_pixels(tri_set: TaggedTriangleSet, cam: CameraModel, buffer: InstanceBuffer) -> np.ndarray:
    """Flat Lambert shading with a camera headlight; returns (H, W, 3) uint8.

    Environment pixels are gray, person pixels are tinted by instance id,
    empty pixels are a light backdrop. Intended for overlays and debugging.
    """
    h, w = buffer.ids.shape
    out = np.full((h, w, 3), 235, dtype=np.uint8)
    if len(tri_set) == 0:
        return out

    a = tri_set.vertices[:, 0]
    normals = np.cross(tri_set.vertices[:, 1] - a, tri_set.vertices[:, 2] - a)
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    normals = normals / np.where(norms > 0, norms, 1.0)
    centroids = tri_set.vertices.mean(axis=1)
    view = centroids - cam.origin_world()
    view /= np.linalg.norm(view, axis=1, keepdims=True)
    lambert = np.abs(np.einsum("ij,ij->i", normals, view))
    brightness = 0.25 + 0.7 * lambert

    colors = np.empty((len(tri_set), 3))
    for inst in np.unique(tri_set.instance_ids):
        base = np.array([0.78, 0.78, 0.78]) if inst == 0 else _instance_color(int(inst))
        colors[tri_set.instance_ids == inst] = base
    shaded = np.clip(colors * brightness[:, None] * 255.0, 0, 255).astype(np.uint8)

    filled = buffer.tri_index >= 0
    out[filled] = shaded[buffer.tri_index[filled]]
    return out
