"""Character movement drivers: scripted marker routes and seeded random roaming.

Characters advance on a flat ground plane with a two-phase machine
(moving -> idle -> moving). Randomness comes exclusively from a per-character
Philox counter-based generator keyed as seed XOR instance_id, which makes
whole simulations reproducible bit-for-bit. Characters never interact;
overlapping paths are the only source of multi-person occlusion.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .rig import AnimationClip, Pose, sample_clip
from .transforms import RigidTransform, quat_from_axis_angle

ARRIVAL_RADIUS = 0.1  # meters
DEFAULT_IDLE_DWELL = (0.5, 2.0)  # seconds, uniform range for random mode


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class Marker:
    position: np.ndarray  # world, meters
    idle_clip: str
    dwell: float  # seconds >= 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64).reshape(3))
        if self.dwell < 0:
            raise SimulationError("marker dwell must be >= 0")


@dataclass(frozen=True)
class ScriptedPlan:
    markers: tuple[Marker, ...]
    locomotion_clip: str
    repeat: bool = True

    def __post_init__(self) -> None:
        if len(self.markers) < 2:
            raise SimulationError("scripted plan needs at least 2 markers")


@dataclass(frozen=True)
class RandomPlan:
    area_min: np.ndarray  # (2,) world x, y
    area_max: np.ndarray  # (2,)
    ground_z: float
    clip_names: tuple[str, ...]
    seed: int
    idle_dwell: tuple[float, float] = DEFAULT_IDLE_DWELL

    def __post_init__(self) -> None:
        object.__setattr__(self, "area_min", np.asarray(self.area_min, dtype=np.float64).reshape(2))
        object.__setattr__(self, "area_max", np.asarray(self.area_max, dtype=np.float64).reshape(2))
        if not np.all(self.area_max > self.area_min):
            raise SimulationError("random plan area is degenerate")
        if not self.clip_names:
            raise SimulationError("random plan clip library is empty")


@dataclass(frozen=True)
class CharacterState:
    instance_id: int
    position: np.ndarray  # world, meters
    heading: float  # radians about world z
    active_clip: str
    clip_time: float
    phase: str  # "moving" | "idle"
    target: np.ndarray | None
    # driver bookkeeping
    marker_index: int = 0
    dwell_remaining: float = 0.0

    def __post_init__(self) -> None:
        if not 1 <= self.instance_id <= 255:
            raise SimulationError("instance_id must be in 1..255")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64).reshape(3))
        if self.target is not None:
            object.__setattr__(self, "target", np.asarray(self.target, dtype=np.float64).reshape(3))
        if self.phase not in ("moving", "idle"):
            raise SimulationError(f"unknown phase '{self.phase}'")
        if self.phase == "moving" and self.target is None:
            raise SimulationError("moving phase requires a target")

    def world_transform(self) -> RigidTransform:
        """Character-root placement: yaw about world z, then translation."""
        return RigidTransform(quat_from_axis_angle([0.0, 0.0, 1.0], self.heading), self.position)


def character_rng(seed: int, instance_id: int) -> np.random.Generator:
    """Philox counter-based substream for one character (seed XOR instance_id)."""
    return np.random.Generator(np.random.Philox(key=(seed ^ instance_id) & (2**64 - 1)))


def _advance_clip(clip: AnimationClip, clip_time: float, dt: float) -> float:
    if clip.loopable:
        return math.fmod(clip_time + dt, clip.duration)
    return min(clip_time + dt, clip.duration)


def _heading_toward(position: np.ndarray, target: np.ndarray) -> float:
    d = target - position
    if abs(d[0]) < 1e-12 and abs(d[1]) < 1e-12:
        return 0.0
    return math.atan2(d[1], d[0])


def step_scripted(
    plan: ScriptedPlan,
    state: CharacterState,
    dt: float,
    clips: dict[str, AnimationClip],
) -> CharacterState:
    """Advance dt seconds along the marker route."""
    if dt <= 0:
        raise SimulationError("dt must be positive")
    loco = clips[plan.locomotion_clip]
    if state.phase == "moving":
        target = state.target
        to_target = target - state.position
        dist = float(np.linalg.norm(to_target))
        step = loco.locomotion_speed * dt
        new_pos = target.copy() if step >= dist else state.position + to_target * (step / dist)
        heading = _heading_toward(state.position, target)
        clip_time = _advance_clip(loco, state.clip_time, dt)
        if float(np.linalg.norm(target - new_pos)) <= ARRIVAL_RADIUS:
            marker = plan.markers[state.marker_index]
            return dataclasses.replace(
                state,
                position=new_pos,
                heading=heading,
                phase="idle",
                active_clip=marker.idle_clip,
                clip_time=0.0,
                dwell_remaining=marker.dwell,
                target=None,
            )
        return dataclasses.replace(
            state, position=new_pos, heading=heading, clip_time=clip_time
        )

    # idle
    idle = clips[state.active_clip]
    clip_time = _advance_clip(idle, state.clip_time, dt)
    dwell = state.dwell_remaining - dt
    if dwell > 0:
        return dataclasses.replace(state, clip_time=clip_time, dwell_remaining=dwell)
    next_index = state.marker_index + 1
    if next_index >= len(plan.markers):
        if not plan.repeat:
            return dataclasses.replace(state, clip_time=clip_time, dwell_remaining=0.0)
        next_index = 0
    target = plan.markers[next_index].position
    return dataclasses.replace(
        state,
        phase="moving",
        marker_index=next_index,
        target=target,
        heading=_heading_toward(state.position, target),
        active_clip=plan.locomotion_clip,
        clip_time=0.0,
        dwell_remaining=0.0,
    )


def _locomotion_names(plan: RandomPlan, clips: dict[str, AnimationClip]) -> list[str]:
    return [n for n in plan.clip_names if clips[n].locomotion_speed > 0]


def _idle_names(plan: RandomPlan, clips: dict[str, AnimationClip]) -> list[str]:
    return [n for n in plan.clip_names if clips[n].locomotion_speed == 0]


def random_plan_check(plan: RandomPlan, clips: dict[str, AnimationClip]) -> None:
    if not _locomotion_names(plan, clips):
        raise SimulationError("random plan needs at least one locomotion clip (speed > 0)")
    if not _idle_names(plan, clips):
        raise SimulationError("random plan needs at least one idle clip (speed = 0)")


def _sample_target(plan: RandomPlan, rng: np.random.Generator) -> np.ndarray:
    x = rng.uniform(plan.area_min[0], plan.area_max[0])
    y = rng.uniform(plan.area_min[1], plan.area_max[1])
    return np.array([x, y, plan.ground_z])


def step_random(
    plan: RandomPlan,
    state: CharacterState,
    dt: float,
    rng: np.random.Generator,
    clips: dict[str, AnimationClip],
) -> CharacterState:
    """Same phase machine as scripted, with targets/clips/dwell drawn from rng."""
    if dt <= 0:
        raise SimulationError("dt must be positive")
    if state.phase == "moving":
        loco = clips[state.active_clip]
        target = state.target
        to_target = target - state.position
        dist = float(np.linalg.norm(to_target))
        step = loco.locomotion_speed * dt
        new_pos = target.copy() if step >= dist else state.position + to_target * (step / dist)
        heading = _heading_toward(state.position, target)
        clip_time = _advance_clip(loco, state.clip_time, dt)
        if float(np.linalg.norm(target - new_pos)) <= ARRIVAL_RADIUS:
            idle_name = str(rng.choice(_idle_names(plan, clips)))
            dwell = float(rng.uniform(plan.idle_dwell[0], plan.idle_dwell[1]))
            return dataclasses.replace(
                state,
                position=new_pos,
                heading=heading,
                phase="idle",
                active_clip=idle_name,
                clip_time=0.0,
                dwell_remaining=dwell,
                target=None,
            )
        return dataclasses.replace(state, position=new_pos, heading=heading, clip_time=clip_time)

    idle = clips[state.active_clip]
    clip_time = _advance_clip(idle, state.clip_time, dt)
    dwell = state.dwell_remaining - dt
    if dwell > 0:
        return dataclasses.replace(state, clip_time=clip_time, dwell_remaining=dwell)
    target = _sample_target(plan, rng)
    loco_name = str(rng.choice(_locomotion_names(plan, clips)))
    return dataclasses.replace(
        state,
        phase="moving",
        target=target,
        heading=_heading_toward(state.position, target),
        active_clip=loco_name,
        clip_time=0.0,
        dwell_remaining=0.0,
    )


def simulate_sequence(
    characters: list[tuple[CharacterState, ScriptedPlan | RandomPlan]],
    frame_rate: float,
    n_frames: int,
    clips: dict[str, AnimationClip],
) -> list[list[tuple[CharacterState, Pose]]]:
    """Step all characters n_frames times at dt = 1/frame_rate.

    frames[f][c] is character c's state after f+1 steps and the raw clip
    pose sampled at that state (root motion not yet applied; compose
    state.world_transform() onto the pose root for world-space FK).
    """
    if n_frames <= 0:
        raise SimulationError("n_frames must be positive")
    if frame_rate <= 0:
        raise SimulationError("frame_rate must be positive")
    dt = 1.0 / frame_rate

    states = []
    rngs = []
    for state, plan in characters:
        if isinstance(plan, RandomPlan):
            random_plan_check(plan, clips)
            rngs.append(character_rng(plan.seed, state.instance_id))
        else:
            rngs.append(None)
        states.append(state)

    frames: list[list[tuple[CharacterState, Pose]]] = []
    for _ in range(n_frames):
        row: list[tuple[CharacterState, Pose]] = []
        for c, (_, plan) in enumerate(characters):
            if isinstance(plan, RandomPlan):
                states[c] = step_random(plan, states[c], dt, rngs[c], clips)
            else:
                states[c] = step_scripted(plan, states[c], dt, clips)
            clip = clips[states[c].active_clip]
            pose = sample_clip(clip, states[c].clip_time, looped=clip.loopable)
            row.append((states[c], pose))
        frames.append(row)
    return frames
