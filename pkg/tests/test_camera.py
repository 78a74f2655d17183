import math

import numpy as np
import pytest

from synthpose.camera import (
    CameraError,
    CameraModel,
    NEAR_PLANE,
    PixelPoint,
    in_frame,
    in_frame_uv,
    intrinsics_from_fov,
    load_calibration,
    project,
    project_points,
    unproject,
    world_to_camera,
    write_calibration,
)
from synthpose.transforms import RigidTransform

from oracles import random_rotation_matrix, quat_to_mat44
from synthpose.transforms import quat_from_matrix


def _camera(fov=90.0, width=640, height=480, extrinsic=None, cam_id="c"):
    fx, fy, cx, cy = intrinsics_from_fov(fov, width, height)
    return CameraModel(
        id=cam_id, width=width, height=height, fx=fx, fy=fy, cx=cx, cy=cy,
        extrinsic=extrinsic or RigidTransform(), fov_h_deg=fov,
    )


def test_fov90_focal():
    fx, fy, cx, cy = intrinsics_from_fov(90.0, 640, 480)
    assert math.isclose(fx, 320.0, rel_tol=1e-12)
    assert fy == fx
    assert cx == 320.0 and cy == 240.0


def test_fov60_focal_formula():
    fx, _, _, _ = intrinsics_from_fov(60.0, 1920, 1080)
    # direct evaluation: 960 / tan(30 deg)
    assert math.isclose(fx, 960.0 / math.tan(math.radians(30.0)), rel_tol=1e-12)
    assert math.isclose(fx, 1662.7687752661222, rel_tol=1e-9)


def test_fov_out_of_range():
    for bad in (0.0, -10.0, 180.0, 200.0):
        with pytest.raises(CameraError):
            intrinsics_from_fov(bad, 640, 480)


def test_world_to_camera_identity():
    cam = _camera()
    p = np.array([0.3, -0.2, 5.0])
    assert np.allclose(world_to_camera(cam, p), p)


def test_world_to_camera_translation():
    # camera 2 m behind the origin on its own optical axis
    cam = _camera(extrinsic=RigidTransform(translation=np.array([0.0, 0.0, 2.0])))
    assert np.allclose(world_to_camera(cam, np.zeros(3)), [0, 0, 2])


def test_world_to_camera_matches_matrix_oracle():
    rng = np.random.default_rng(21)
    for _ in range(20):
        rot = random_rotation_matrix(rng)
        t = rng.normal(size=3)
        cam = _camera(extrinsic=RigidTransform(quat_from_matrix(rot), t))
        p = rng.normal(size=3)
        m = quat_to_mat44(quat_from_matrix(rot), t)
        expected = (m @ np.append(p, 1.0))[:3]
        assert np.allclose(world_to_camera(cam, p), expected, atol=1e-9)


def test_project_on_axis():
    cam = _camera()
    pp = project(cam, np.array([0.0, 0.0, 1.0]))
    assert pp is not None
    assert math.isclose(pp.u, cam.cx) and math.isclose(pp.v, cam.cy)
    assert math.isclose(pp.depth, 1.0)


def test_project_behind_camera():
    cam = _camera()
    assert project(cam, np.array([0.0, 0.0, -1.0])) is None


def test_resolution_scaling():
    cam1 = _camera(fov=70.0, width=640, height=480)
    cam2 = _camera(fov=70.0, width=1280, height=960)
    p = np.array([0.3, 0.2, 2.0])
    a = project(cam1, p)
    b = project(cam2, p)
    assert math.isclose(b.u, 2 * a.u, rel_tol=1e-12)
    assert math.isclose(b.v, 2 * a.v, rel_tol=1e-12)
    # normalized coordinates are resolution independent
    assert math.isclose(a.u / 640, b.u / 1280, rel_tol=1e-9)
    assert math.isclose(a.v / 480, b.v / 960, rel_tol=1e-9)


def test_in_frame_conventions():
    cam = _camera()
    assert in_frame(cam, PixelPoint(0.0, 0.0, 1.0))
    assert not in_frame(cam, PixelPoint(float(cam.width), 10.0, 1.0))
    assert not in_frame(cam, PixelPoint(10.0, float(cam.height), 1.0))
    assert in_frame(cam, PixelPoint(cam.width - 0.5, cam.height - 0.5, 1.0))
    assert not in_frame(cam, None)


def test_unproject_round_trip():
    rng = np.random.default_rng(22)
    rot = random_rotation_matrix(rng)
    cam = _camera(fov=55.0, extrinsic=RigidTransform(quat_from_matrix(rot), rng.normal(size=3)))
    for _ in range(50):
        p = rng.normal(size=3) * 3.0
        u, v, z = project_points(cam, p[None])
        if z[0] <= NEAR_PLANE:
            continue
        back = unproject(cam, float(u[0]), float(v[0]), float(z[0]))
        assert np.allclose(back, p, atol=1e-6)


def test_frustum_boundary_projects_to_image_edge():
    cam = _camera(fov=70.0)
    half = math.radians(35.0)
    # points on the horizontal frustum boundary planes: x = ±z tan(half)
    for z in (0.5, 2.0, 7.0):
        left = project(cam, np.array([-z * math.tan(half), 0.0, z]))
        right = project(cam, np.array([z * math.tan(half), 0.0, z]))
        assert abs(left.u - 0.0) < 1e-6
        assert abs(right.u - cam.width) < 1e-6


def test_project_points_vectorized_matches_scalar():
    rng = np.random.default_rng(23)
    rot = random_rotation_matrix(rng)
    cam = _camera(extrinsic=RigidTransform(quat_from_matrix(rot), rng.normal(size=3)))
    pts = rng.normal(size=(40, 3)) * 4.0
    u, v, z = project_points(cam, pts)
    flags = in_frame_uv(cam, u, v, z)
    for i in range(40):
        pp = project(cam, pts[i])
        if pp is None:
            assert z[i] <= NEAR_PLANE
            assert not flags[i]
        else:
            assert math.isclose(pp.u, u[i], rel_tol=1e-12)
            assert math.isclose(pp.v, v[i], rel_tol=1e-12)
            assert flags[i] == in_frame(cam, pp)


def test_look_at_geometry():
    cam = CameraModel.from_fov("c", [0.0, -2.0, 0.0], [0.0, 0.0, 0.0], 90.0, 640, 480)
    # target straight ahead: projects to the principal point at depth 2
    pp = project(cam, np.zeros(3))
    assert math.isclose(pp.u, cam.cx, abs_tol=1e-9)
    assert math.isclose(pp.v, cam.cy, abs_tol=1e-9)
    assert math.isclose(pp.depth, 2.0, rel_tol=1e-12)
    # a point above the target lands in the upper half (v < cy, y-down image)
    above = project(cam, np.array([0.0, 0.0, 0.5]))
    assert above.v < cam.cy
    # facing +y with z up, world +x is the camera's right: u > cx
    right = project(cam, np.array([0.5, 0.0, 0.0]))
    assert right.u > cam.cx
    assert np.allclose(cam.origin_world(), [0.0, -2.0, 0.0], atol=1e-12)


def test_calibration_round_trip(tmp_path):
    rng = np.random.default_rng(24)
    rot = random_rotation_matrix(rng)
    cam = _camera(fov=62.0, extrinsic=RigidTransform(quat_from_matrix(rot), rng.normal(size=3)), cam_id="camX")
    path = tmp_path / "camX.json"
    write_calibration(cam, path)
    again = load_calibration(path)
    assert again.id == "camX"
    assert again.width == cam.width and again.height == cam.height
    assert math.isclose(again.fx, cam.fx, rel_tol=1e-8)
    p = rng.normal(size=3)
    assert np.allclose(world_to_camera(again, p), world_to_camera(cam, p), atol=1e-6)
    # serialization is byte-stable
    write_calibration(cam, tmp_path / "again.json")
    assert (tmp_path / "camX.json").read_bytes() == (tmp_path / "again.json").read_bytes()
