"""Skeleton hierarchy, animation clip sampling, and forward kinematics.

Rig files are YAML: a `joints` list in topological order where each entry
holds `name`, `parent` (a previously declared joint name, or null for the
single root) and `bind` local transform, plus an `annotated_joints` list
naming the 16 joints exported as 3D ground truth. Clip files are YAML with
`name`, `duration`, `loop`, `speed` and per-joint keyframe `tracks`; joints
a clip does not track hold their bind-pose local transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .transforms import RigidTransform, quat_mul, quat_rotate, quat_slerp

NUM_ANNOTATED_JOINTS = 16


class RigError(ValueError):
    """Malformed rig or clip document."""


@dataclass(frozen=True)
class Joint:
    name: str
    parent: int | None
    bind_local: RigidTransform


@dataclass(frozen=True)
class Pose:
    """Per-joint local transforms, same order as the skeleton."""

    rotations: np.ndarray  # (J, 4) quaternions, wxyz
    translations: np.ndarray  # (J, 3) meters

    def __len__(self) -> int:
        return self.rotations.shape[0]

    def local(self, j: int) -> RigidTransform:
        return RigidTransform(self.rotations[j], self.translations[j])

    def with_root(self, root_transform: RigidTransform) -> "Pose":
        """Compose an external character transform onto the root local."""
        rot = self.rotations.copy()
        trans = self.translations.copy()
        rot[0] = quat_mul(root_transform.rotation, rot[0])
        trans[0] = root_transform.translation + quat_rotate(root_transform.rotation, trans[0])
        return Pose(rot, trans)


@dataclass(frozen=True)
class WorldPose:
    """Per-joint global transforms in the world frame."""

    rotations: np.ndarray  # (J, 4)
    translations: np.ndarray  # (J, 3)

    def __len__(self) -> int:
        return self.rotations.shape[0]

    def global_(self, j: int) -> RigidTransform:
        return RigidTransform(self.rotations[j], self.translations[j])


class Skeleton:
    """Joint hierarchy in topological order with one root.

    annotated_joints names the joints whose world positions become the
    exported 3D annotation, in export order. Dataset generation requires
    exactly NUM_ANNOTATED_JOINTS of them (checked when a rig is attached to
    a tracked character); smaller rigs are fine for tooling and tests.
    """

    def __init__(self, joints: list[Joint], annotated_joints: list[str]):
        names = [j.name for j in joints]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise RigError(f"duplicate joint name(s): {', '.join(dup)}")
        roots = [j for j in joints if j.parent is None]
        if len(roots) != 1:
            raise RigError(f"skeleton must have exactly one root, found {len(roots)}")
        if joints[0].parent is not None:
            raise RigError("root joint must come first: not topologically ordered")
        for i, j in enumerate(joints):
            if j.parent is not None and not (0 <= j.parent < i):
                raise RigError(f"joint '{j.name}': not topologically ordered (parent index {j.parent} >= {i})")
        missing = [n for n in annotated_joints if n not in names]
        if missing:
            raise RigError(f"annotated joint(s) not in skeleton: {', '.join(missing)}")
        if len(set(annotated_joints)) != len(annotated_joints):
            raise RigError("annotated joint names must be unique")

        self.joints = list(joints)
        self.annotated_joints = list(annotated_joints)
        self.index_of = {j.name: i for i, j in enumerate(joints)}
        self.annotated_indices = np.array([self.index_of[n] for n in annotated_joints])

    def __len__(self) -> int:
        return len(self.joints)

    def bind_pose(self) -> Pose:
        rot = np.stack([j.bind_local.rotation for j in self.joints])
        trans = np.stack([j.bind_local.translation for j in self.joints])
        return Pose(rot, trans)

    def bind_world(self) -> WorldPose:
        return forward_kinematics(self, self.bind_pose())


@dataclass(frozen=True)
class JointTrack:
    times: np.ndarray  # (K,), strictly increasing, within [0, duration]
    rotations: np.ndarray  # (K, 4)
    translations: np.ndarray  # (K, 3)


class AnimationClip:
    """Keyframed local transforms for every joint of a skeleton.

    locomotion_speed is the ground speed the movement driver uses while this
    clip plays; idle clips use 0.
    """

    def __init__(
        self,
        name: str,
        duration: float,
        loopable: bool,
        locomotion_speed: float,
        tracks: list[JointTrack],
    ):
        if not duration > 0:
            raise RigError(f"clip '{name}': duration must be > 0")
        if locomotion_speed < 0:
            raise RigError(f"clip '{name}': locomotion speed must be >= 0")
        for j, tr in enumerate(tracks):
            if tr.times.size == 0:
                raise RigError(f"clip '{name}': empty track for joint index {j}")
            if np.any(np.diff(tr.times) <= 0):
                raise RigError(f"clip '{name}': keyframe times must be strictly increasing")
            if tr.times[0] < 0 or tr.times[-1] > duration + 1e-12:
                raise RigError(f"clip '{name}': keyframe times must lie within [0, duration]")
        self.name = name
        self.duration = float(duration)
        self.loopable = bool(loopable)
        self.locomotion_speed = float(locomotion_speed)
        self.tracks = tracks


def _parse_transform(node: dict, where: str) -> RigidTransform:
    try:
        rot = np.asarray(node.get("rot", [1.0, 0.0, 0.0, 0.0]), dtype=np.float64)
        trans = np.asarray(node.get("trans", [0.0, 0.0, 0.0]), dtype=np.float64)
        return RigidTransform(rot, trans)
    except (TypeError, ValueError) as exc:
        raise RigError(f"{where}: bad transform ({exc})") from exc


def load_skeleton(document: str) -> Skeleton:
    """Parse a rig document into a validated Skeleton."""
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise RigError(f"rig parse error: {exc}") from exc
    if not isinstance(doc, dict) or "joints" not in doc:
        raise RigError("rig document must be a mapping with a 'joints' list")

    joints: list[Joint] = []
    seen: dict[str, int] = {}
    for entry in doc["joints"]:
        name = entry.get("name")
        if not name:
            raise RigError("joint entry missing 'name'")
        parent_name = entry.get("parent")
        if parent_name is None:
            parent = None
        elif parent_name == name:
            raise RigError(f"joint '{name}': cycle in hierarchy (joint is its own parent)")
        elif parent_name in seen:
            parent = seen[parent_name]
        elif any(e.get("name") == parent_name for e in doc["joints"]):
            raise RigError(f"joint '{name}': not topologically ordered (parent '{parent_name}' declared later)")
        else:
            raise RigError(f"joint '{name}': unknown parent '{parent_name}'")
        joints.append(Joint(name, parent, _parse_transform(entry.get("bind", {}), f"joint '{name}'")))
        seen[name] = len(joints) - 1

    annotated = doc.get("annotated_joints", [])
    return Skeleton(joints, annotated)


def load_skeleton_file(path) -> Skeleton:
    with open(path, "r", encoding="utf-8") as fh:
        return load_skeleton(fh.read())


def skeleton_to_document(skeleton: Skeleton) -> str:
    """Serialize so that load_skeleton round-trips structurally."""
    joints = []
    for j in skeleton.joints:
        joints.append(
            {
                "name": j.name,
                "parent": None if j.parent is None else skeleton.joints[j.parent].name,
                "bind": {
                    "rot": [float(v) for v in j.bind_local.rotation],
                    "trans": [float(v) for v in j.bind_local.translation],
                },
            }
        )
    doc = {"joints": joints, "annotated_joints": list(skeleton.annotated_joints)}
    return yaml.safe_dump(doc, sort_keys=False)


def load_clip(document: str, skeleton: Skeleton) -> AnimationClip:
    """Parse a clip document, resolving tracks against the skeleton.

    Untracked joints get a single bind-pose keyframe at t=0.
    """
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise RigError(f"clip parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise RigError("clip document must be a mapping")
    name = doc.get("name", "unnamed")
    raw_tracks = doc.get("tracks", {}) or {}
    for joint_name in raw_tracks:
        if joint_name not in skeleton.index_of:
            raise RigError(f"clip '{name}': track for unknown joint '{joint_name}'")

    tracks: list[JointTrack] = []
    for j, joint in enumerate(skeleton.joints):
        keys = raw_tracks.get(joint.name)
        if not keys:
            tracks.append(
                JointTrack(
                    np.zeros(1),
                    joint.bind_local.rotation[None, :].copy(),
                    joint.bind_local.translation[None, :].copy(),
                )
            )
            continue
        times = np.array([float(k["t"]) for k in keys])
        rots = np.stack(
            [
                _parse_transform(k, f"clip '{name}' joint '{joint.name}'").rotation
                for k in keys
            ]
        )
        trans = np.stack(
            [
                _parse_transform(k, f"clip '{name}' joint '{joint.name}'").translation
                for k in keys
            ]
        )
        tracks.append(JointTrack(times, rots, trans))

    return AnimationClip(
        name=name,
        duration=float(doc.get("duration", 0.0)),
        loopable=bool(doc.get("loop", False)),
        locomotion_speed=float(doc.get("speed", 0.0)),
        tracks=tracks,
    )


def load_clip_file(path, skeleton: Skeleton) -> AnimationClip:
    with open(path, "r", encoding="utf-8") as fh:
        return load_clip(fh.read(), skeleton)


def sample_clip(clip: AnimationClip, t: float, looped: bool = False) -> Pose:
    """Sample per-joint local transforms at time t.

    Translation is linearly interpolated and rotation slerped between the
    bracketing keyframes; a time exactly on a keyframe returns that keyframe.
    Looped sampling uses t mod duration; unlooped t must lie in [0, duration].
    """
    if t < 0:
        raise RigError(f"sample time {t} < 0")
    if looped:
        t = math.fmod(t, clip.duration)
    elif t > clip.duration:
        raise RigError(f"sample time {t} out of range for unlooped clip of duration {clip.duration}")

    n = len(clip.tracks)
    rotations = np.empty((n, 4))
    translations = np.empty((n, 3))
    for j, track in enumerate(clip.tracks):
        times = track.times
        k = int(np.searchsorted(times, t))
        if k < times.size and times[k] == t:
            rotations[j] = track.rotations[k]
            translations[j] = track.translations[k]
            continue
        if k == 0:
            rotations[j] = track.rotations[0]
            translations[j] = track.translations[0]
            continue
        if k == times.size:
            rotations[j] = track.rotations[-1]
            translations[j] = track.translations[-1]
            continue
        t0, t1 = times[k - 1], times[k]
        u = (t - t0) / (t1 - t0)
        rotations[j] = quat_slerp(track.rotations[k - 1], track.rotations[k], u)
        translations[j] = (1.0 - u) * track.translations[k - 1] + u * track.translations[k]
    return Pose(rotations, translations)


def forward_kinematics(skeleton: Skeleton, pose: Pose) -> WorldPose:
    """Accumulate local transforms down the hierarchy: g[j] = g[parent] ∘ l[j]."""
    if len(pose) != len(skeleton):
        raise RigError(f"pose has {len(pose)} joints, skeleton has {len(skeleton)}")
    n = len(skeleton)
    rot = np.empty((n, 4))
    trans = np.empty((n, 3))
    for j, joint in enumerate(skeleton.joints):
        if joint.parent is None:
            rot[j] = pose.rotations[j]
            trans[j] = pose.translations[j]
        else:
            p = joint.parent
            rot[j] = quat_mul(rot[p], pose.rotations[j])
            trans[j] = trans[p] + quat_rotate(rot[p], pose.translations[j])
    return WorldPose(rot, trans)


def annotated_joint_positions(skeleton: Skeleton, world: WorldPose) -> np.ndarray:
    """World positions of the 16 annotated joints, (16, 3) meters."""
    if len(world) != len(skeleton):
        raise RigError("world pose does not match skeleton")
    return world.translations[skeleton.annotated_indices].copy()
