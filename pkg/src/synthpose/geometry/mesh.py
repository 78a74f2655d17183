"""Triangle meshes (skinned and static) and linear blend skinning.

Mesh files are line-based text:

    v x y z                         vertex position (bind space for skinned)
    f i j k                         triangle, 0-based vertex indices
    w i joint weight [joint weight ...]   skin influences for vertex i (<= 4)

Static meshes omit `w` lines and their vertices are world-space. Joints are
referenced by name and resolved against a skeleton at load time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rig import Skeleton, WorldPose
from ..transforms import quat_to_matrix

MAX_INFLUENCES = 4
WEIGHT_SUM_TOL = 1e-6
DEGENERATE_AREA = 1e-12


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class SkinnedMesh:
    vertices: np.ndarray  # (V, 3) bind-space meters
    triangles: np.ndarray  # (T, 3) int
    skin_joints: np.ndarray  # (V, 4) int joint indices, -1 padding
    skin_weights: np.ndarray  # (V, 4) float, rows sum to 1

    def __post_init__(self) -> None:
        _check_triangles(self.vertices, self.triangles)
        v = self.vertices.shape[0]
        if self.skin_joints.shape != (v, MAX_INFLUENCES) or self.skin_weights.shape != (v, MAX_INFLUENCES):
            raise MeshError("skin arrays must be (V, 4)")
        sums = self.skin_weights.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > WEIGHT_SUM_TOL)[0]
        if bad.size:
            raise MeshError(f"skin weights of vertex {bad[0]} sum to {sums[bad[0]]}, expected 1")
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        degenerate = np.nonzero(areas < DEGENERATE_AREA)[0]
        if degenerate.size:
            raise MeshError(f"triangle {degenerate[0]} is degenerate in bind pose")

    def validate_against(self, skeleton: Skeleton) -> None:
        used = self.skin_joints[self.skin_weights > 0]
        if used.size and (used.min() < 0 or used.max() >= len(skeleton)):
            raise MeshError("skin joint index out of range for skeleton")


@dataclass(frozen=True)
class StaticMesh:
    vertices: np.ndarray  # (V, 3) world-space meters
    triangles: np.ndarray  # (T, 3) int

    def __post_init__(self) -> None:
        _check_triangles(self.vertices, self.triangles)


def _check_triangles(vertices: np.ndarray, triangles: np.ndarray) -> None:
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError("vertices must be (V, 3)")
    if triangles.ndim != 2 or triangles.shape[1] != 3:
        raise MeshError("triangles must be (T, 3)")
    if triangles.size and (triangles.min() < 0 or triangles.max() >= vertices.shape[0]):
        raise MeshError("triangle vertex index out of range")


@dataclass(frozen=True)
class TaggedTriangleSet:
    """World-space triangles tagged with an instance id.

    id 0 marks environment geometry; ids 1-255 mark tracked persons.
    """

    vertices: np.ndarray  # (T, 3, 3)
    instance_ids: np.ndarray  # (T,) int

    def __post_init__(self) -> None:
        if self.vertices.ndim != 3 or self.vertices.shape[1:] != (3, 3):
            raise MeshError("tagged triangle vertices must be (T, 3, 3)")
        if self.instance_ids.shape != (self.vertices.shape[0],):
            raise MeshError("instance_ids must be (T,)")
        if self.instance_ids.size and (self.instance_ids.min() < 0 or self.instance_ids.max() > 255):
            raise MeshError("instance ids must be in 0..255")

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @classmethod
    def from_parts(cls, parts: list[tuple[np.ndarray, int]]) -> "TaggedTriangleSet":
        """parts: list of ((T_i, 3, 3) world triangles, instance_id)."""
        if not parts:
            return cls(np.zeros((0, 3, 3)), np.zeros(0, dtype=np.int32))
        tris = np.concatenate([np.asarray(t, dtype=np.float64) for t, _ in parts])
        ids = np.concatenate(
            [np.full(len(t), i, dtype=np.int32) for t, i in parts]
        )
        return cls(tris, ids)


def _parse_mesh_lines(text: str, skinned: bool, source: str):
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    weights: dict[int, list[tuple[str, float]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "v":
                verts.append([float(p) for p in parts[1:4]])
            elif tag == "f":
                faces.append([int(p) for p in parts[1:4]])
            elif tag == "w":
                if not skinned:
                    raise MeshError(f"{source}:{lineno}: skin weights in a static mesh")
                vi = int(parts[1])
                pairs = parts[2:]
                if len(pairs) % 2 != 0 or not pairs:
                    raise MeshError(f"{source}:{lineno}: malformed weight line")
                weights[vi] = [(pairs[i], float(pairs[i + 1])) for i in range(0, len(pairs), 2)]
            else:
                raise MeshError(f"{source}:{lineno}: unknown record '{tag}'")
        except (ValueError, IndexError) as exc:
            raise MeshError(f"{source}:{lineno}: {exc}") from exc
    return np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64), weights


def load_static_mesh(text: str, source: str = "<static mesh>") -> StaticMesh:
    verts, faces, _ = _parse_mesh_lines(text, skinned=False, source=source)
    return StaticMesh(verts, faces)


def load_static_mesh_file(path) -> StaticMesh:
    with open(path, "r", encoding="utf-8") as fh:
        return load_static_mesh(fh.read(), source=str(path))


def load_skinned_mesh(text: str, skeleton: Skeleton, source: str = "<skinned mesh>") -> SkinnedMesh:
    verts, faces, weights = _parse_mesh_lines(text, skinned=True, source=source)
    nv = verts.shape[0]
    joints = np.full((nv, MAX_INFLUENCES), -1, dtype=np.int64)
    w = np.zeros((nv, MAX_INFLUENCES))
    for vi in range(nv):
        if vi not in weights:
            raise MeshError(f"{source}: vertex {vi} has no skin weights")
        pairs = weights[vi]
        if len(pairs) > MAX_INFLUENCES:
            raise MeshError(f"{source}: vertex {vi} has more than {MAX_INFLUENCES} influences")
        for k, (jname, wk) in enumerate(pairs):
            if jname not in skeleton.index_of:
                raise MeshError(f"{source}: vertex {vi} references unknown joint '{jname}'")
            joints[vi, k] = skeleton.index_of[jname]
            w[vi, k] = wk
    mesh = SkinnedMesh(verts, faces, joints, w)
    mesh.validate_against(skeleton)
    return mesh


def load_skinned_mesh_file(path, skeleton: Skeleton) -> SkinnedMesh:
    with open(path, "r", encoding="utf-8") as fh:
        return load_skinned_mesh(fh.read(), skeleton, source=str(path))


def skin_mesh(mesh: SkinnedMesh, skeleton: Skeleton, world: WorldPose) -> np.ndarray:
    """Linear blend skinning: world-space vertex positions (V, 3).

    Each vertex is transformed by its weight-blended (current global ∘
    inverse bind global) joint matrices.
    """
    mesh.validate_against(skeleton)
    if len(world) != len(skeleton):
        raise MeshError("world pose does not match skeleton")

    bind = skeleton.bind_world()
    nj = len(skeleton)
    rot = np.empty((nj, 3, 3))
    off = np.empty((nj, 3))
    for j in range(nj):
        rg = quat_to_matrix(world.rotations[j])
        rb = quat_to_matrix(bind.rotations[j])
        # G_j ∘ B_j^-1 as a 3x3 rotation plus offset
        m = rg @ rb.T
        rot[j] = m
        off[j] = world.translations[j] - m @ bind.translations[j]

    idx = np.where(mesh.skin_joints >= 0, mesh.skin_joints, 0)
    per_influence = (
        np.einsum("vkij,vj->vki", rot[idx], mesh.vertices) + off[idx]
    )  # (V, 4, 3)
    return np.einsum("vk,vki->vi", mesh.skin_weights, per_influence)


def skinned_triangles(mesh: SkinnedMesh, skeleton: Skeleton, world: WorldPose) -> np.ndarray:
    """World-space (T, 3, 3) triangle array for the posed mesh."""
    verts = skin_mesh(mesh, skeleton, world)
    return verts[mesh.triangles]


def static_triangles(mesh: StaticMesh) -> np.ndarray:
    return mesh.vertices[mesh.triangles]
