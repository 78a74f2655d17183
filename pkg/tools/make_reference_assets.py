"""Regenerate the reference assets shipped under synthpose/assets/reference.

The body is a slim 14-box figure (~168 triangles) rigged to the 16-joint
humanoid skeleton. Box half-widths stay under the default 0.05 m skin
tolerance so that frontal views report every joint visible; overhead views
legitimately self-occlude (pelvis under the torso, ankles under the shins).

Run from the repository root:  python3 tools/make_reference_assets.py
"""

from __future__ import annotations

import math
from pathlib import Path

import yaml

from synthpose.transforms import quat_from_axis_angle

OUT = Path(__file__).resolve().parent.parent / "src" / "synthpose" / "assets" / "reference"

JOINTS = [
    # name, parent, local translation
    ("pelvis", None, (0.0, 0.0, 0.95)),
    ("spine", "pelvis", (0.0, 0.0, 0.20)),
    ("neck", "spine", (0.0, 0.0, 0.35)),
    ("head", "neck", (0.0, 0.0, 0.15)),
    ("l_shoulder", "spine", (0.0, 0.20, 0.33)),
    ("l_elbow", "l_shoulder", (0.0, 0.28, 0.0)),
    ("l_wrist", "l_elbow", (0.0, 0.26, 0.0)),
    ("r_shoulder", "spine", (0.0, -0.20, 0.33)),
    ("r_elbow", "r_shoulder", (0.0, -0.28, 0.0)),
    ("r_wrist", "r_elbow", (0.0, -0.26, 0.0)),
    ("l_hip", "pelvis", (0.0, 0.10, -0.05)),
    ("l_knee", "l_hip", (0.0, 0.0, -0.42)),
    ("l_ankle", "l_knee", (0.0, 0.0, -0.40)),
    ("r_hip", "pelvis", (0.0, -0.10, -0.05)),
    ("r_knee", "r_hip", (0.0, 0.0, -0.42)),
    ("r_ankle", "r_knee", (0.0, 0.0, -0.40)),
]

ANNOTATED = [name for name, _, _ in JOINTS]

# body boxes: (skin joint, center in bind space, half extents)
BODY_BOXES = [
    ("pelvis", (0.0, 0.0, 1.00), (0.045, 0.13, 0.10)),
    ("spine", (0.0, 0.0, 1.32), (0.045, 0.16, 0.19)),
    ("neck", (0.0, 0.0, 1.535), (0.030, 0.03, 0.035)),
    ("head", (0.0, 0.0, 1.625), (0.045, 0.05, 0.065)),
    ("l_shoulder", (0.0, 0.34, 1.48), (0.040, 0.14, 0.04)),
    ("l_elbow", (0.0, 0.61, 1.48), (0.035, 0.13, 0.035)),
    ("r_shoulder", (0.0, -0.34, 1.48), (0.040, 0.14, 0.04)),
    ("r_elbow", (0.0, -0.61, 1.48), (0.035, 0.13, 0.035)),
    ("l_hip", (0.0, 0.10, 0.69), (0.045, 0.055, 0.21)),
    ("l_knee", (0.0, 0.10, 0.27), (0.040, 0.045, 0.21)),
    ("l_ankle", (0.06, 0.10, 0.035), (0.090, 0.045, 0.035)),
    ("r_hip", (0.0, -0.10, 0.69), (0.045, 0.055, 0.21)),
    ("r_knee", (0.0, -0.10, 0.27), (0.040, 0.045, 0.21)),
    ("r_ankle", (0.06, -0.10, 0.035), (0.090, 0.045, 0.035)),
]

ATTACHMENTS = [
    ("nose", "head", (0.080, 0.0, 0.025)),
    ("left_eye", "head", (0.050, 0.028, 0.050)),
    ("right_eye", "head", (0.050, -0.028, 0.050)),
    ("left_ear", "head", (0.005, 0.058, 0.030)),
    ("right_ear", "head", (0.005, -0.058, 0.030)),
    ("left_shoulder", "l_shoulder", (0.0, 0.0, 0.0)),
    ("right_shoulder", "r_shoulder", (0.0, 0.0, 0.0)),
    ("left_elbow", "l_elbow", (0.0, 0.0, 0.0)),
    ("right_elbow", "r_elbow", (0.0, 0.0, 0.0)),
    ("left_wrist", "l_wrist", (0.0, 0.0, 0.0)),
    ("right_wrist", "r_wrist", (0.0, 0.0, 0.0)),
    ("left_hip", "l_hip", (0.0, 0.0, 0.0)),
    ("right_hip", "r_hip", (0.0, 0.0, 0.0)),
    ("left_knee", "l_knee", (0.0, 0.0, 0.0)),
    ("right_knee", "r_knee", (0.0, 0.0, 0.0)),
    ("left_ankle", "l_ankle", (0.0, 0.0, 0.0)),
    ("right_ankle", "r_ankle", (0.0, 0.0, 0.0)),
]


def rot(axis, degrees):
    q = quat_from_axis_angle(axis, math.radians(degrees))
    return [round(float(v), 9) for v in q]


IDENT = [1.0, 0.0, 0.0, 0.0]
Y = [0.0, 1.0, 0.0]
X = [1.0, 0.0, 0.0]
Z = [0.0, 0.0, 1.0]


def walk_clip():
    # legsswing about y (sagittal plane for a +x-facing character), arms
    # counter-swing, pelvis bobs twice per cycle
    def leg(sign):
        return [
            {"t": 0.0, "rot": rot(Y, 25 * sign)},
            {"t": 0.25, "rot": rot(Y, 0)},
            {"t": 0.5, "rot": rot(Y, -25 * sign)},
            {"t": 0.75, "rot": rot(Y, 0)},
            {"t": 1.0, "rot": rot(Y, 25 * sign)},
        ]

    def knee(phase):
        angles = [8, 40, 8, 20, 8] if phase == 0 else [8, 20, 8, 40, 8]
        return [{"t": 0.25 * i, "rot": rot(Y, -a)} for i, a in enumerate(angles)]

    def arm(sign):
        return [
            {"t": 0.0, "rot": rot(Y, -18 * sign)},
            {"t": 0.5, "rot": rot(Y, 18 * sign)},
            {"t": 1.0, "rot": rot(Y, -18 * sign)},
        ]

    pelvis = [
        {"t": 0.0, "trans": [0.0, 0.0, 0.93]},
        {"t": 0.25, "trans": [0.0, 0.0, 0.955]},
        {"t": 0.5, "trans": [0.0, 0.0, 0.93]},
        {"t": 0.75, "trans": [0.0, 0.0, 0.955]},
        {"t": 1.0, "trans": [0.0, 0.0, 0.93]},
    ]
    return {
        "name": "walk",
        "duration": 1.0,
        "loop": True,
        "speed": 1.2,
        "tracks": {
            "pelvis": pelvis,
            "l_hip": leg(1),
            "r_hip": leg(-1),
            "l_knee": knee(0),
            "r_knee": knee(1),
            "l_shoulder": arm(-1),
            "r_shoulder": arm(1),
        },
    }


def idle_a_clip():
    return {
        "name": "idle_a",
        "duration": 2.0,
        "loop": True,
        "speed": 0.0,
        "tracks": {
            "pelvis": [
                {"t": 0.0, "trans": [0.0, 0.0, 0.95]},
                {"t": 1.0, "trans": [0.0, 0.0, 0.942]},
                {"t": 2.0, "trans": [0.0, 0.0, 0.95]},
            ],
            "spine": [
                {"t": 0.0, "rot": rot(X, 3)},
                {"t": 1.0, "rot": rot(X, -3)},
                {"t": 2.0, "rot": rot(X, 3)},
            ],
            "head": [
                {"t": 0.0, "rot": rot(Z, 8)},
                {"t": 1.0, "rot": rot(Z, -8)},
                {"t": 2.0, "rot": rot(Z, 8)},
            ],
        },
    }


def idle_b_clip():
    return {
        "name": "idle_b",
        "duration": 1.6,
        "loop": True,
        "speed": 0.0,
        "tracks": {
            "neck": [
                {"t": 0.0, "rot": rot(Z, 0)},
                {"t": 0.4, "rot": rot(Z, 17)},
                {"t": 0.8, "rot": rot(Z, 0)},
                {"t": 1.2, "rot": rot(Z, -17)},
                {"t": 1.6, "rot": rot(Z, 0)},
            ],
            "l_shoulder": [
                {"t": 0.0, "rot": rot(X, 0)},
                {"t": 0.8, "rot": rot(X, 6)},
                {"t": 1.6, "rot": rot(X, 0)},
            ],
        },
    }


def box_mesh_lines(boxes):
    """Triangulated axis-aligned boxes, one `w` record per vertex (rigid skin)."""
    lines = ["# synthpose skinned mesh: slim reference body"]
    vert_lines = []
    face_lines = []
    weight_lines = []
    base = 0
    for joint, center, he in boxes:
        cx, cy, cz = center
        hx, hy, hz = he
        corners = [
            (cx - hx, cy - hy, cz - hz),
            (cx + hx, cy - hy, cz - hz),
            (cx + hx, cy + hy, cz - hz),
            (cx - hx, cy + hy, cz - hz),
            (cx - hx, cy - hy, cz + hz),
            (cx + hx, cy - hy, cz + hz),
            (cx + hx, cy + hy, cz + hz),
            (cx - hx, cy + hy, cz + hz),
        ]
        faces = [
            (0, 2, 1), (0, 3, 2),  # bottom
            (4, 5, 6), (4, 6, 7),  # top
            (0, 1, 5), (0, 5, 4),  # -y
            (2, 3, 7), (2, 7, 6),  # +y
            (1, 2, 6), (1, 6, 5),  # +x
            (3, 0, 4), (3, 4, 7),  # -x
        ]
        for vx, vy, vz in corners:
            vert_lines.append(f"v {vx:.6f} {vy:.6f} {vz:.6f}")
        for a, b, c in faces:
            face_lines.append(f"f {base + a} {base + b} {base + c}")
        for k in range(8):
            weight_lines.append(f"w {base + k} {joint} 1.0")
        base += 8
    return "\n".join(lines + vert_lines + face_lines + weight_lines) + "\n"


def quad_lines(corners, comment):
    lines = [f"# {comment}"]
    for vx, vy, vz in corners:
        lines.append(f"v {vx:.6f} {vy:.6f} {vz:.6f}")
    lines.append("f 0 1 2")
    lines.append("f 0 2 3")
    return lines


def static_box_lines(lo, hi, base):
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    corners = [
        (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
        (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1),
    ]
    faces = [
        (0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7),
        (0, 1, 5), (0, 5, 4), (2, 3, 7), (2, 7, 6),
        (1, 2, 6), (1, 6, 5), (3, 0, 4), (3, 4, 7),
    ]
    lines = [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in corners]
    lines += [f"f {base + a} {base + b} {base + c}" for a, b, c in faces]
    return lines


def open_ground_mesh():
    return "\n".join(quad_lines(
        [(-12.0, -12.0, 0.0), (12.0, -12.0, 0.0), (12.0, 12.0, 0.0), (-12.0, 12.0, 0.0)],
        "open ground plane",
    )) + "\n"


def walled_yard_mesh():
    lines = quad_lines(
        [(-12.0, -12.0, 0.0), (12.0, -12.0, 0.0), (12.0, 12.0, 0.0), (-12.0, 12.0, 0.0)],
        "ground plane with two occluding walls",
    )
    # wall between the walking area and the front camera
    lines += static_box_lines((-1.513, -2.737, 0.0), (0.071, -2.513, 1.613), base=4)
    # tall wall east of the area, occluding the elevated side camera
    lines += static_box_lines((2.581, -0.819, 0.0), (2.803, 1.207, 2.017), base=12)
    return "\n".join(lines) + "\n"


def rig_doc():
    joints = []
    for name, parent, trans in JOINTS:
        joints.append(
            {
                "name": name,
                "parent": parent,
                "bind": {"rot": list(IDENT), "trans": [float(v) for v in trans]},
            }
        )
    return {"name": "human16", "joints": joints, "annotated_joints": ANNOTATED}


def attach_doc():
    return {
        "keypoints": [
            {"name": n, "joint": j, "offset": [float(v) for v in off]}
            for n, j, off in ATTACHMENTS
        ]
    }


def camera_entries():
    return [
        {"id": "cam0", "position": [0.0, -5.8, 1.65], "look_at": [0.0, 0.0, 1.0],
         "fov_deg": 70.0, "resolution": [640, 480]},
        {"id": "cam1", "position": [5.2, 3.9, 2.4], "look_at": [0.0, 0.0, 0.9],
         "fov_deg": 70.0, "resolution": [640, 480]},
        {"id": "cam2", "position": [-5.0, 3.2, 3.0], "look_at": [0.0, 0.0, 0.8],
         "fov_deg": 75.0, "resolution": [640, 480]},
    ]


def characters():
    scripted = {
        "instance_id": 1,
        "rig": "../rig_human16.yaml",
        "mesh": "../meshes/body_slim.mesh",
        "attachment": "../attach_coco17.yaml",
        "start": {"position": [-2.0, -1.2, 0.0], "heading": 0.0},
        "plan": {
            "kind": "scripted",
            "locomotion_clip": "walk",
            "repeat": True,
            "markers": [
                {"position": [2.0, -1.2, 0.0], "idle_clip": "idle_a", "dwell": 0.8},
                {"position": [2.0, 1.2, 0.0], "idle_clip": "idle_b", "dwell": 0.6},
                {"position": [-2.0, 1.2, 0.0], "idle_clip": "idle_a", "dwell": 0.7},
                {"position": [-2.0, -1.2, 0.0], "idle_clip": "idle_b", "dwell": 0.5},
            ],
        },
    }
    roaming = {
        "instance_id": 2,
        "rig": "../rig_human16.yaml",
        "mesh": "../meshes/body_slim.mesh",
        "attachment": "../attach_coco17.yaml",
        "start": {"position": [1.0, 0.5, 0.0], "heading": 3.1},
        "plan": {
            "kind": "random",
            "seed": 99,
            "area": {"min": [-2.3, -1.8], "max": [2.3, 1.8], "ground_z": 0.0},
            "clips": ["walk", "idle_a", "idle_b"],
            "idle_dwell": [0.6, 1.8],
        },
    }
    return [scripted, roaming]


def reference_config(scene_file, sequence_id, n_frames):
    return {
        "name": "reference",
        "sequence_id": sequence_id,
        "seed": 20240817,
        "frame_rate": 30.0,
        "n_frames": n_frames,
        "output_dir": "out/" + sequence_id,
        "assets": {
            "clips": ["../clips/walk.yaml", "../clips/idle_a.yaml", "../clips/idle_b.yaml"],
            "scene": ["../" + scene_file],
        },
        "characters": characters(),
        "cameras": camera_entries(),
        "filters": {"boundary": True, "redundancy_mm": 100.0},
        "visibility": {"skin_tolerance_m": 0.05},
        "render": {"write_rgb": False},
    }


def minimal_config():
    doc = {
        "name": "minimal",
        "sequence_id": "seq_minimal",
        "seed": 7,
        "frame_rate": 30.0,
        "n_frames": 10,
        "output_dir": "out/seq_minimal",
        "assets": {
            "clips": ["../clips/walk.yaml", "../clips/idle_a.yaml", "../clips/idle_b.yaml"],
            "scene": ["../scenes/open_ground.mesh"],
        },
        "characters": [
            {
                "instance_id": 1,
                "rig": "../rig_human16.yaml",
                "mesh": "../meshes/body_slim.mesh",
                "attachment": "../attach_coco17.yaml",
                "start": {"position": [-0.8, 0.0, 0.0], "heading": 0.0},
                "plan": {
                    "kind": "scripted",
                    "locomotion_clip": "walk",
                    "repeat": True,
                    "markers": [
                        {"position": [0.8, 0.0, 0.0], "idle_clip": "idle_a", "dwell": 0.5},
                        {"position": [-0.8, 0.0, 0.0], "idle_clip": "idle_b", "dwell": 0.5},
                    ],
                },
            }
        ],
        "cameras": [
            {"id": "cam0", "position": [0.0, -7.0, 1.5], "look_at": [0.0, 0.0, 0.9],
             "fov_deg": 70.0, "resolution": [640, 480]},
        ],
        "filters": {"boundary": True, "redundancy_mm": 100.0},
        "visibility": {"skin_tolerance_m": 0.05},
        "render": {"write_rgb": False},
    }
    return doc


def dump_yaml(doc, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False, default_flow_style=None)


def main():
    dump_yaml(rig_doc(), OUT / "rig_human16.yaml")
    dump_yaml(attach_doc(), OUT / "attach_coco17.yaml")
    dump_yaml(walk_clip(), OUT / "clips" / "walk.yaml")
    dump_yaml(idle_a_clip(), OUT / "clips" / "idle_a.yaml")
    dump_yaml(idle_b_clip(), OUT / "clips" / "idle_b.yaml")

    meshes = OUT / "meshes"
    meshes.mkdir(parents=True, exist_ok=True)
    (meshes / "body_slim.mesh").write_text(box_mesh_lines(BODY_BOXES), encoding="utf-8")

    scenes = OUT / "scenes"
    scenes.mkdir(parents=True, exist_ok=True)
    (scenes / "open_ground.mesh").write_text(open_ground_mesh(), encoding="utf-8")
    (scenes / "walled_yard.mesh").write_text(walled_yard_mesh(), encoding="utf-8")

    dump_yaml(reference_config("scenes/open_ground.mesh", "seq_open", 1000),
              OUT / "configs" / "reference_open.yaml")
    dump_yaml(reference_config("scenes/walled_yard.mesh", "seq_walls", 300),
              OUT / "configs" / "reference_walls.yaml")
    dump_yaml(minimal_config(), OUT / "configs" / "minimal_open.yaml")
    print(f"assets written under {OUT}")


if __name__ == "__main__":
    main()
