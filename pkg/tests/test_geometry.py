"""Tests for coordinate conversions, pixel indexing, and poses."""

import math

import numpy as np
import pytest

from sonarmap.geometry import (
    CartesianPoint,
    Pose,
    SonarConfig,
    SphericalPoint,
    cartesian_to_spherical,
    cartesian_to_spherical_array,
    load_poses,
    pixel_to_ray,
    quaternion_from_yaw,
    save_poses,
    spherical_to_cartesian,
    spherical_to_cartesian_array,
    transform_to_world,
)

IDENT = (1.0, 0.0, 0.0, 0.0)


class TestSphericalToCartesian:
    def test_boresight_axis(self):
        c = spherical_to_cartesian(SphericalPoint(0.0, 1.0, 0.0))
        np.testing.assert_allclose([c.x, c.y, c.z], [1, 0, 0], atol=1e-15)

    def test_port_axis(self):
        c = spherical_to_cartesian(SphericalPoint(math.pi / 2, 2.0, 0.0))
        np.testing.assert_allclose([c.x, c.y, c.z], [0, 2, 0], atol=1e-15)

    def test_general_point_extended_precision(self):
        # (theta=pi/6, r=3, phi=pi/18), expected values frozen from a
        # 50-digit evaluation of the conversion formula.
        c = spherical_to_cartesian(SphericalPoint(math.pi / 6, 3.0, math.pi / 18))
        np.testing.assert_allclose(
            [c.x, c.y, c.z],
            [2.5586055958573296289, 1.4772116295183120891, 0.52094453300079104656],
            rtol=0,
            atol=1e-12,
        )
        back = cartesian_to_spherical(c)
        assert abs(back.bearing - math.pi / 6) < 1e-9
        assert abs(back.range - 3.0) < 1e-9
        assert abs(back.elevation - math.pi / 18) < 1e-9

    def test_range_preserved_as_norm(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = SphericalPoint(
                rng.uniform(-math.pi, math.pi),
                rng.uniform(0, 100),
                rng.uniform(-math.pi / 2, math.pi / 2),
            )
            c = spherical_to_cartesian(p)
            assert abs(math.sqrt(c.x**2 + c.y**2 + c.z**2) - p.range) < 1e-9

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SphericalPoint(0.0, -1.0, 0.0)
        with pytest.raises(ValueError):
            SphericalPoint(4.0, 1.0, 0.0)


class TestCartesianToSpherical:
    def test_unit_x(self):
        p = cartesian_to_spherical(CartesianPoint(1, 0, 0))
        assert (p.bearing, p.range, p.elevation) == (0.0, 1.0, 0.0)

    def test_pole_gets_zero_bearing(self):
        p = cartesian_to_spherical(CartesianPoint(0, 0, 5))
        assert p.bearing == 0.0
        assert p.range == 5.0
        assert abs(p.elevation - math.pi / 2) < 1e-15

    def test_diagonal_point(self):
        p = cartesian_to_spherical(CartesianPoint(1, 1, 1))
        assert abs(p.bearing - math.pi / 4) < 1e-15
        assert abs(p.range - 1.7320508075688772935) < 1e-15
        assert abs(p.elevation - 0.61547970867038734107) < 1e-15

    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            cartesian_to_spherical(CartesianPoint(0, 0, 0))

    def test_round_trip(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            p = SphericalPoint(
                rng.uniform(-math.pi, math.pi),
                rng.uniform(1e-3, 100),
                rng.uniform(-math.pi / 2, math.pi / 2),
            )
            q = cartesian_to_spherical(spherical_to_cartesian(p))
            d_bearing = (q.bearing - p.bearing + math.pi) % (2 * math.pi) - math.pi
            assert abs(d_bearing) < 1e-9 or abs(abs(p.elevation) - math.pi / 2) < 1e-6
            assert abs(q.range - p.range) < 1e-9
            assert abs(q.elevation - p.elevation) < 1e-9

    def test_array_round_trip_matches_scalar(self):
        rng = np.random.default_rng(3)
        bearing = rng.uniform(-1, 1, 64)
        r = rng.uniform(0.5, 10, 64)
        elev = rng.uniform(-0.5, 0.5, 64)
        pts = spherical_to_cartesian_array(bearing, r, elev)
        b2, r2, e2 = cartesian_to_spherical_array(pts)
        np.testing.assert_allclose(b2, bearing, atol=1e-9)
        np.testing.assert_allclose(r2, r, atol=1e-9)
        np.testing.assert_allclose(e2, elev, atol=1e-9)


class TestPixelToRay:
    CONFIG = SonarConfig(
        r_min=0.1, r_max=5.0,
        theta_min=-0.5, theta_max=0.5,
        phi_min=-0.1, phi_max=0.1,
        n_bearing_bins=10, n_range_bins=500, n_elevation_samples=5,
    )

    def test_first_bins_map_to_cell_centers(self):
        p = pixel_to_ray(self.CONFIG, 0, 0, 2)
        assert abs(p.bearing - (-0.5 + 0.05)) < 1e-12
        assert abs(p.range - (0.1 + 0.5 * 0.0098)) < 1e-12
        assert abs(p.elevation - 0.0) < 1e-12  # middle sample is arc midpoint

    def test_last_bins_stay_inside_extents(self):
        p = pixel_to_ray(self.CONFIG, 9, 499, 4)
        assert p.bearing < self.CONFIG.theta_max
        assert p.range < self.CONFIG.r_max
        assert p.elevation < self.CONFIG.phi_max

    def test_midrange_bin_value(self):
        # r = 0.1 + 250.5 * (5 - 0.1)/500 = 2.5549
        p = pixel_to_ray(self.CONFIG, 0, 250, 0)
        assert abs(p.range - 2.5549) < 1e-12

    def test_monotonic_in_indices(self):
        ranges = [pixel_to_ray(self.CONFIG, 0, k, 0).range for k in range(500)]
        assert all(b > a for a, b in zip(ranges, ranges[1:]))
        bearings = [pixel_to_ray(self.CONFIG, k, 0, 0).bearing for k in range(10)]
        assert all(b > a for a, b in zip(bearings, bearings[1:]))

    def test_out_of_range_rejected(self):
        with pytest.raises(IndexError):
            pixel_to_ray(self.CONFIG, 10, 0, 0)
        with pytest.raises(IndexError):
            pixel_to_ray(self.CONFIG, 0, 500, 0)
        with pytest.raises(IndexError):
            pixel_to_ray(self.CONFIG, 0, 0, -1)


class TestTransformToWorld:
    def test_identity(self):
        pose = Pose(0.0, CartesianPoint(0, 0, 0), IDENT)
        c = transform_to_world(pose, CartesianPoint(1, 2, 3))
        np.testing.assert_allclose([c.x, c.y, c.z], [1, 2, 3], atol=1e-15)

    def test_pure_translation(self):
        pose = Pose(0.0, CartesianPoint(1, 0, 0), IDENT)
        c = transform_to_world(pose, CartesianPoint(0, 0, 0))
        np.testing.assert_allclose([c.x, c.y, c.z], [1, 0, 0], atol=1e-15)

    def test_quarter_yaw(self):
        pose = Pose(0.0, CartesianPoint(0, 0, 0), quaternion_from_yaw(math.pi / 2))
        c = transform_to_world(pose, CartesianPoint(1, 0, 0))
        np.testing.assert_allclose([c.x, c.y, c.z], [0, 1, 0], atol=1e-12)

    def test_distances_preserved(self):
        rng = np.random.default_rng(5)
        yaw = rng.uniform(0, 2 * math.pi)
        pose = Pose(0.0, CartesianPoint(2.0, -1.0, 0.5), quaternion_from_yaw(yaw))
        pts = [CartesianPoint(*rng.uniform(-5, 5, 3)) for _ in range(10)]
        moved = [transform_to_world(pose, p) for p in pts]
        for a, b, ma, mb in zip(pts, pts[1:], moved, moved[1:]):
            da = math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))
            db = math.dist((ma.x, ma.y, ma.z), (mb.x, mb.y, mb.z))
            assert abs(da - db) < 1e-9

    def test_inverse_composes_to_identity(self):
        pose = Pose(0.0, CartesianPoint(1.5, -2.0, 0.7), quaternion_from_yaw(1.1))
        inv = pose.inverse()
        p = CartesianPoint(3.0, 1.0, -0.4)
        back = transform_to_world(inv, transform_to_world(pose, p))
        np.testing.assert_allclose([back.x, back.y, back.z], [p.x, p.y, p.z], atol=1e-9)

    def test_quaternion_norm_checked(self):
        with pytest.raises(ValueError):
            Pose(0.0, CartesianPoint(0, 0, 0), (1.0, 0.5, 0.0, 0.0))


class TestPoseFile:
    def test_round_trip_with_comments(self, tmp_path):
        poses = [
            Pose(0.0, CartesianPoint(0, 0, 0), IDENT),
            Pose(1.0, CartesianPoint(0.5, 0.2, -0.1), quaternion_from_yaw(0.3)),
        ]
        path = tmp_path / "poses.csv"
        save_poses(path, poses)
        text = path.read_text()
        path.write_text("# trajectory\n" + text)
        loaded = load_poses(path)
        assert len(loaded) == 2
        for a, b in zip(poses, loaded):
            assert abs(a.timestamp - b.timestamp) < 1e-12
            np.testing.assert_allclose(a.translation.as_array(), b.translation.as_array())
            np.testing.assert_allclose(a.rotation, b.rotation, atol=1e-15)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,0,0,0,1,0,0\n")  # 7 fields
        with pytest.raises(ValueError):
            load_poses(path)
