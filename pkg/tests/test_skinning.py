import numpy as np
import pytest

from synthpose.geometry.mesh import (
    MeshError,
    SkinnedMesh,
    TaggedTriangleSet,
    load_skinned_mesh,
    load_static_mesh,
    skin_mesh,
    skinned_triangles,
)
from synthpose.rig import Joint, Pose, Skeleton, forward_kinematics
from synthpose.transforms import RigidTransform, quat_from_axis_angle


def _two_joint_skeleton():
    joints = [
        Joint("root", None, RigidTransform()),
        Joint("tip", 0, RigidTransform(translation=np.array([0.0, 1.0, 0.0]))),
    ]
    return Skeleton(joints, ["root", "tip"])


def _pose(skel, root_trans=(0, 0, 0), tip_rot=None):
    rot = np.tile([1.0, 0.0, 0.0, 0.0], (2, 1))
    if tip_rot is not None:
        rot[1] = tip_rot
    trans = np.array([list(root_trans), [0.0, 1.0, 0.0]])
    return Pose(rot, trans)


def _tri_mesh(weights_rows):
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    tris = np.array([[0, 1, 2]])
    joints = np.array([[r[0], r[2], -1, -1] for r in weights_rows])
    w = np.array([[r[1], r[3], 0.0, 0.0] for r in weights_rows])
    return SkinnedMesh(verts, tris, joints, w)


def test_bind_pose_is_identity():
    skel = _two_joint_skeleton()
    mesh = _tri_mesh([(0, 1.0, 1, 0.0)] * 3)
    world = forward_kinematics(skel, skel.bind_pose())
    out = skin_mesh(mesh, skel, world)
    assert np.allclose(out, mesh.vertices, atol=1e-9)


def test_rigid_single_joint_translation():
    skel = _two_joint_skeleton()
    mesh = _tri_mesh([(1, 1.0, 0, 0.0)] * 3)
    world = forward_kinematics(skel, _pose(skel, root_trans=(0, 0, 3)))
    out = skin_mesh(mesh, skel, world)
    assert np.allclose(out, mesh.vertices + [0, 0, 3], atol=1e-12)


def test_fifty_fifty_blend():
    skel = _two_joint_skeleton()
    mesh = _tri_mesh([(0, 0.5, 1, 0.5)] * 3)
    # move only the root joint... moving root moves child too, so instead
    # rotate nothing and translate root: both joints translate equally.
    # For a pure blend test, shift the tip's local translation via the pose.
    rot = np.tile([1.0, 0.0, 0.0, 0.0], (2, 1))
    trans = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 0.0]])  # tip shifted +x by 1
    world = forward_kinematics(skel, Pose(rot, trans))
    out = skin_mesh(mesh, skel, world)
    assert np.allclose(out, mesh.vertices + [0.5, 0, 0], atol=1e-12)


def test_rotation_about_joint():
    skel = _two_joint_skeleton()
    mesh = _tri_mesh([(1, 1.0, 0, 0.0)] * 3)
    q = quat_from_axis_angle([0, 0, 1], np.pi / 2)
    world = forward_kinematics(skel, _pose(skel, tip_rot=q))
    out = skin_mesh(mesh, skel, world)
    # vertices rotate 90° about z around the tip joint at (0, 1, 0)
    pivot = np.array([0.0, 1.0, 0.0])
    rel = mesh.vertices - pivot
    expected = np.stack([-rel[:, 1], rel[:, 0], rel[:, 2]], axis=1) + pivot
    assert np.allclose(out, expected, atol=1e-12)


def test_weight_sum_validation():
    verts = np.zeros((3, 3))
    verts[1, 0] = 1.0
    verts[2, 2] = 1.0
    with pytest.raises(MeshError, match="sum"):
        SkinnedMesh(
            verts,
            np.array([[0, 1, 2]]),
            np.zeros((3, 4), dtype=int),
            np.full((3, 4), 0.3),
        )


def test_degenerate_triangle_rejected():
    verts = np.zeros((3, 3))  # all at origin
    with pytest.raises(MeshError, match="degenerate"):
        SkinnedMesh(verts, np.array([[0, 1, 2]]), np.full((3, 4), -1), _unit_weights(3))


def _unit_weights(n):
    w = np.zeros((n, 4))
    w[:, 0] = 1.0
    return w


def test_mesh_file_parsing():
    skel = _two_joint_skeleton()
    text = """# demo
v 0 0 0
v 1 0 0
v 0 0 1
f 0 1 2
w 0 root 1.0
w 1 root 0.5 tip 0.5
w 2 tip 1.0
"""
    mesh = load_skinned_mesh(text, skel)
    assert mesh.vertices.shape == (3, 3)
    assert mesh.skin_joints[1, 0] == 0 and mesh.skin_joints[1, 1] == 1
    assert np.allclose(mesh.skin_weights[1, :2], [0.5, 0.5])

    static = load_static_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n")
    assert static.triangles.shape == (1, 3)

    with pytest.raises(MeshError, match="unknown joint"):
        load_skinned_mesh(text.replace("w 2 tip", "w 2 ghost"), skel)
    with pytest.raises(MeshError, match="no skin weights"):
        load_skinned_mesh("v 0 0 0\nv 1 0 0\nv 0 0 1\nf 0 1 2\n", skel)


def test_reference_body_loads_and_skins(reference_skeleton, asset_dir):
    from synthpose.geometry.mesh import load_skinned_mesh_file

    mesh = load_skinned_mesh_file(asset_dir / "meshes" / "body_slim.mesh", reference_skeleton)
    assert 100 < mesh.triangles.shape[0] < 500
    world = forward_kinematics(reference_skeleton, reference_skeleton.bind_pose())
    out = skin_mesh(mesh, reference_skeleton, world)
    assert np.allclose(out, mesh.vertices, atol=1e-9)
    tris = skinned_triangles(mesh, reference_skeleton, world)
    assert tris.shape == (mesh.triangles.shape[0], 3, 3)


def test_tagged_set_instance_range():
    tris = np.zeros((1, 3, 3))
    tris[0, 1, 0] = 1.0
    tris[0, 2, 1] = 1.0
    with pytest.raises(MeshError):
        TaggedTriangleSet(tris, np.array([300]))
    ok = TaggedTriangleSet.from_parts([(tris, 7)])
    assert ok.instance_ids[0] == 7
