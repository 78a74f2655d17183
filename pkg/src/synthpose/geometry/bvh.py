"""Bounding volume hierarchy for nearest-hit ray queries over tagged triangles.

Hit semantics (shared with any reference implementation that checks this
tree): a ray origin + s*dir hits a triangle when the Möller-Trumbore
barycentrics satisfy u >= 0, v >= 0, u + v <= 1 (edges inclusive), the
determinant is not vanishing (|det| > 1e-12, parallel rays miss), and
RAY_EPS < s < s_max. Among valid hits the smallest s wins; an exact tie is
broken by the smaller original triangle index. RAY_EPS guards against
self-intersection at the ray origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import MeshError, TaggedTriangleSet

RAY_EPS = 1e-6  # meters
LEAF_SIZE = 8
_DET_EPS = 1e-12


@dataclass(frozen=True)
class RayHit:
    t: float
    instance_id: int
    triangle_index: int  # index into the original TaggedTriangleSet


class Bvh:
    """Immutable after build; queries are pure and thread-safe."""

    def __init__(self, tri_set: TaggedTriangleSet):
        if len(tri_set) == 0:
            raise MeshError("cannot build a BVH over an empty triangle set")
        tris = tri_set.vertices
        lo = tris.min(axis=1)
        hi = tris.max(axis=1)
        centroids = tris.mean(axis=1)

        # median split on the widest centroid axis, stable order for determinism
        bounds_min: list[np.ndarray] = []
        bounds_max: list[np.ndarray] = []
        left: list[int] = []
        right: list[int] = []
        axis: list[int] = []
        start: list[int] = []
        count: list[int] = []
        order: list[np.ndarray] = []

        def new_node(idx: np.ndarray) -> int:
            node = len(bounds_min)
            bounds_min.append(lo[idx].min(axis=0))
            bounds_max.append(hi[idx].max(axis=0))
            left.append(-1)
            right.append(-1)
            axis.append(0)
            start.append(-1)
            count.append(0)
            if idx.size <= LEAF_SIZE:
                start[node] = sum(o.size for o in order)
                count[node] = idx.size
                order.append(idx)
                return node
            ext = centroids[idx].max(axis=0) - centroids[idx].min(axis=0)
            ax = int(np.argmax(ext))
            srt = idx[np.argsort(centroids[idx, ax], kind="stable")]
            mid = idx.size // 2
            axis[node] = ax
            left[node] = new_node(srt[:mid])
            right[node] = new_node(srt[mid:])
            return node

        new_node(np.arange(len(tri_set)))
        perm = np.concatenate(order)

        self._v0 = tris[perm, 0].copy()
        self._e1 = tris[perm, 1] - tris[perm, 0]
        self._e2 = tris[perm, 2] - tris[perm, 0]
        self._instance_by_orig = tri_set.instance_ids.copy()
        self._orig_index = perm
        self._bounds = [
            (float(a[0]), float(a[1]), float(a[2]), float(b[0]), float(b[1]), float(b[2]))
            for a, b in zip(bounds_min, bounds_max)
        ]
        self._left = left
        self._right = right
        self._axis = axis
        self._start = start
        self._count = count
        self.triangle_count = len(tri_set)

    def _leaf_hit(self, s: int, c: int, origin, direction, t_best, best_idx, t_max):
        v0 = self._v0[s : s + c]
        e1 = self._e1[s : s + c]
        e2 = self._e2[s : s + c]
        pvec = np.cross(direction, e2)
        det = np.einsum("ij,ij->i", e1, pvec)
        valid = np.abs(det) > _DET_EPS
        safe_det = np.where(valid, det, 1.0)
        tvec = origin - v0
        u = np.einsum("ij,ij->i", tvec, pvec) / safe_det
        qvec = np.cross(tvec, e1)
        v = qvec @ direction
        v = v / safe_det
        t = np.einsum("ij,ij->i", e2, qvec) / safe_det
        valid &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > RAY_EPS) & (t < t_max)
        if not valid.any():
            return t_best, best_idx
        for k in np.nonzero(valid)[0]:
            tk = float(t[k])
            ok = int(self._orig_index[s + k])
            if tk < t_best or (tk == t_best and (best_idx < 0 or ok < best_idx)):
                t_best, best_idx = tk, ok
        return t_best, best_idx

    def nearest_hit(self, origin, direction, t_max: float) -> RayHit | None:
        """Nearest intersection with RAY_EPS < t < t_max, or None."""
        origin = np.asarray(origin, dtype=np.float64)
        direction = np.asarray(direction, dtype=np.float64)
        ox, oy, oz = float(origin[0]), float(origin[1]), float(origin[2])
        dx, dy, dz = float(direction[0]), float(direction[1]), float(direction[2])
        o = (ox, oy, oz)
        d = (dx, dy, dz)

        t_best = math.inf
        best_idx = -1
        stack = [0]
        bounds = self._bounds
        left = self._left
        while stack:
            node = stack.pop()
            b = bounds[node]
            tmin = RAY_EPS
            tmax = min(t_max, t_best)
            hit_box = True
            for k in range(3):
                dk = d[k]
                ok_ = o[k]
                if dk != 0.0:
                    inv = 1.0 / dk
                    t0 = (b[k] - ok_) * inv
                    t1 = (b[k + 3] - ok_) * inv
                    if t0 > t1:
                        t0, t1 = t1, t0
                    if t0 > tmin:
                        tmin = t0
                    if t1 < tmax:
                        tmax = t1
                    if tmin > tmax:
                        hit_box = False
                        break
                elif ok_ < b[k] or ok_ > b[k + 3]:
                    hit_box = False
                    break
            if not hit_box:
                continue
            l = left[node]
            if l < 0:
                t_best, best_idx = self._leaf_hit(
                    self._start[node], self._count[node], origin, direction, t_best, best_idx, t_max
                )
            else:
                r = self._right[node]
                if d[self._axis[node]] >= 0.0:
                    stack.append(r)
                    stack.append(l)  # near child popped first
                else:
                    stack.append(l)
                    stack.append(r)

        if best_idx < 0:
            return None
        return RayHit(t_best, int(self._instance_by_orig[best_idx]), best_idx)


def build_bvh(tri_set: TaggedTriangleSet) -> Bvh:
    return Bvh(tri_set)


def ray_nearest_hit(bvh: Bvh, origin, direction, t_max: float) -> RayHit | None:
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    return bvh.nearest_hit(origin, direction, t_max)


def point_visibility(bvh: Bvh, camera_origin, point, skin_tolerance: float) -> bool:
    """True when no occluder blocks the camera->point segment.

    Hits within skin_tolerance of the target do not count: they are the
    subject's own surface over the queried joint. Distant body parts still
    occlude because they intersect the ray well before the tolerance band.
    """
    camera_origin = np.asarray(camera_origin, dtype=np.float64)
    point = np.asarray(point, dtype=np.float64)
    delta = point - camera_origin
    dist = float(np.linalg.norm(delta))
    if dist == 0.0:
        raise ValueError("point coincides with the camera origin")
    limit = dist - skin_tolerance
    if limit <= RAY_EPS:
        return True
    return bvh.nearest_hit(camera_origin, delta / dist, limit) is None
