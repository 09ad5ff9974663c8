import os
import shutil
import tempfile
import unittest

import numpy as np

from fusedock.utils.errors import ConfigInvalid, FixtureNotVisible, IoFailure
from fusedock.utils.pose import Pose
from fusedock.data.imaging import (
    RenderSettings,
    background,
    default_fixture,
    native_intrinsics,
    project,
    read_ppm,
    read_ppm_size,
    render,
    sun_from_elevation,
    sun_in_camera,
    write_ppm,
)


class TestFixture(unittest.TestCase):
    def test_geometry(self) -> None:
        fixture = default_fixture()
        lo = fixture.vertices.min(axis=0)
        hi = fixture.vertices.max(axis=0)
        for name, kp in fixture.keypoints.items():
            self.assertTrue(np.all(kp >= lo - 1e-12) and np.all(kp <= hi + 1e-12), name)
        np.testing.assert_allclose(np.linalg.norm(fixture.normals, axis=1), 1.0)
        self.assertEqual(fixture.faces.shape[1], 3)
        self.assertLess(fixture.faces.max(), len(fixture.vertices))
        self.assertEqual(len(fixture.albedo), len(fixture.faces))
        self.assertEqual(len(fixture.keypoint_names), 9)

    def test_front_faces_camera(self) -> None:
        fixture = default_fixture()
        # plate front triangles lie in z = 0 and point along -z
        front = np.all(np.abs(fixture.vertices[fixture.faces][:, :, 2]) < 1e-12, axis=1)
        self.assertTrue(np.any(front))
        np.testing.assert_allclose(fixture.normals[front], np.tile([0.0, 0.0, -1.0], (front.sum(), 1)), atol=1e-12)


class TestRender(unittest.TestCase):
    def setUp(self) -> None:
        self.K = native_intrinsics()
        self.pose = Pose(translation=[0.0, 0.0, 2.0])

    def _pixel(self, pose: Pose, point: list) -> tuple:
        u, v = project(self.K, pose, point)
        return int(round(v)), int(round(u))

    def test_behind_camera(self) -> None:
        with self.assertRaises(FixtureNotVisible):
            render(self.K, Pose(translation=[0.0, 0.0, -5.0]), default_fixture(), RenderSettings())

    def test_ambient_only(self) -> None:
        img = render(self.K, self.pose, default_fixture(), RenderSettings(sun_direction=(1.0, 0.0, 0.0)))
        row, col = self._pixel(self.pose, [0.24, 0.0, 0.0])
        np.testing.assert_allclose(img[row, col], [21, 21, 21], atol=1)

    def test_fully_lit(self) -> None:
        img = render(self.K, self.pose, default_fixture(), RenderSettings(sun_direction=(0.0, 0.0, -1.0)))
        row, col = self._pixel(self.pose, [0.24, 0.0, 0.0])
        np.testing.assert_allclose(img[row, col], [161, 161, 161], atol=1)
        # marked pin
        pose = Pose(translation=[0.0, 0.0, 3.0])
        img = render(self.K, pose, default_fixture(), RenderSettings(sun_direction=(0.0, 0.0, -1.0)))
        row, col = self._pixel(pose, [0.25, 0.25, -0.06])
        np.testing.assert_allclose(img[row, col], [255, 88, 59], atol=1)
        row, col = self._pixel(pose, [-0.25, 0.25, -0.06])
        np.testing.assert_allclose(img[row, col], [255, 255, 255], atol=1)

    def test_background_untouched(self) -> None:
        settings = RenderSettings(background="perlin", seed=4)
        img = render(self.K, Pose(translation=[0.0, 0.0, 9.0]), default_fixture(), settings)
        bg = background(self.K.width, self.K.height, "perlin", 4)
        np.testing.assert_array_equal(img[:40, :40], bg[:40, :40])
        self.assertFalse(bg.flags.writeable)

    def test_deterministic(self) -> None:
        pose = Pose.from_dcm(np.eye(3), [0.3, -0.2, 6.0])
        for mode in ("black", "perlin", "clutter"):
            settings = RenderSettings(background=mode, sun_direction=(0.0, 0.6, -0.8), seed=12)
            a = render(self.K, pose, default_fixture(), settings)
            b = render(self.K, pose, default_fixture(), settings)
            np.testing.assert_array_equal(a, b)
            self.assertEqual(a.shape, (480, 744, 3))
            self.assertEqual(a.dtype, np.uint8)

    def test_settings(self) -> None:
        with self.assertRaises(ConfigInvalid):
            RenderSettings(sun_direction=(1.0, 1.0, 0.0))
        with self.assertRaises(ConfigInvalid):
            RenderSettings(background="stars")

    def test_sun_elevation(self) -> None:
        np.testing.assert_allclose(sun_from_elevation(90.0), [0.0, 0.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(sun_from_elevation(37.0, 20.0)), 1.0)
        np.testing.assert_allclose(sun_in_camera(self.pose, [0.0, 0.0, -2.0]), [0.0, 0.0, -1.0])


class TestPPM(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()

    def test_round_trip(self) -> None:
        img = np.random.default_rng(0).integers(0, 256, size=(3, 4, 3), dtype=np.uint8)
        path = os.path.join(self.root, "frame.ppm")
        write_ppm(img, path)
        with open(path, "rb") as f:
            data = f.read()
        self.assertEqual(data, b"P6\n4 3\n255\n" + img.tobytes())
        np.testing.assert_array_equal(read_ppm(path), img)
        self.assertEqual(read_ppm_size(path), (4, 3))
        self.assertFalse(os.path.exists(path + ".tmp"))

    def test_missing(self) -> None:
        with self.assertRaises(IoFailure):
            read_ppm(os.path.join(self.root, "missing.ppm"))

    def tearDown(self) -> None:
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()
