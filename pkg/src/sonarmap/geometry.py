"""Sonar frame geometry: spherical/Cartesian conversions, pixel indexing, poses.

Conventions used throughout the package:

- The sensor frame is right-handed with +x along the acoustic axis.
- ``bearing`` (theta) is the azimuth in the x-y plane, measured from +x,
  positive toward +y.
- ``elevation`` (phi) is measured from the x-y plane, positive toward +z.
- Angles are radians everywhere inside the library; degrees appear only at
  config-file and CLI boundaries.
- Quaternions are stored as (w, x, y, z), unit norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SphericalPoint:
    """Point in the sensor's spherical frame (bearing, range, elevation)."""

    bearing: float
    range: float
    elevation: float

    def __post_init__(self):
        if self.range < 0:
            raise ValueError(f"range must be >= 0, got {self.range}")
        if not -math.pi <= self.bearing <= math.pi:
            raise ValueError(f"bearing must be in [-pi, pi], got {self.bearing}")
        if not -math.pi / 2 <= self.elevation <= math.pi / 2:
            raise ValueError(
                f"elevation must be in [-pi/2, pi/2], got {self.elevation}"
            )


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class SonarConfig:
    """Frustum extents and bin counts for one imaging-sonar configuration.

    Range images produced under a config have shape
    (n_range_bins, n_bearing_bins); row 0 is the bin nearest ``r_min``.
    """

    r_min: float
    r_max: float
    theta_min: float
    theta_max: float
    phi_min: float
    phi_max: float
    n_bearing_bins: int
    n_range_bins: int
    n_elevation_samples: int

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise ValueError("require r_min < r_max")
        if not self.theta_min < self.theta_max:
            raise ValueError("require theta_min < theta_max")
        if not self.phi_min < self.phi_max:
            raise ValueError("require phi_min < phi_max")
        if min(self.n_bearing_bins, self.n_range_bins, self.n_elevation_samples) < 1:
            raise ValueError("all bin counts must be >= 1")

    @property
    def range_bin_width(self) -> float:
        return (self.r_max - self.r_min) / self.n_range_bins

    @property
    def bearing_bin_width(self) -> float:
        return (self.theta_max - self.theta_min) / self.n_bearing_bins

    @property
    def elevation_sample_width(self) -> float:
        return (self.phi_max - self.phi_min) / self.n_elevation_samples

    def range_bin_centers(self) -> np.ndarray:
        return self.r_min + (np.arange(self.n_range_bins) + 0.5) * self.range_bin_width

    def bearing_bin_centers(self) -> np.ndarray:
        return (
            self.theta_min
            + (np.arange(self.n_bearing_bins) + 0.5) * self.bearing_bin_width
        )

    def elevation_sample_centers(self) -> np.ndarray:
        return (
            self.phi_min
            + (np.arange(self.n_elevation_samples) + 0.5) * self.elevation_sample_width
        )


@dataclass(frozen=True)
class Pose:
    """Timestamped rigid-body pose: world_point = R(q) @ sensor_point + t."""

    timestamp: float
    translation: CartesianPoint
    rotation: tuple[float, float, float, float]  # (w, x, y, z), unit norm

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.rotation))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"quaternion norm must be 1 within 1e-6, got {norm}")

    def rotation_matrix(self) -> np.ndarray:
        return quaternion_to_matrix(self.rotation)

    def inverse(self) -> "Pose":
        """Pose mapping world coordinates back into the sensor frame."""
        w, x, y, z = self.rotation
        conj = (w, -x, -y, -z)
        r_inv = quaternion_to_matrix(conj)
        t = -(r_inv @ self.translation.as_array())
        return Pose(self.timestamp, CartesianPoint(*t), conj)


IDENTITY_QUAT = (1.0, 0.0, 0.0, 0.0)


def quaternion_to_matrix(q: tuple[float, float, float, float]) -> np.ndarray:
    """Rotation matrix of a unit quaternion (w, x, y, z)."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ],
        dtype=float,
    )


def quaternion_from_yaw(yaw: float) -> tuple[float, float, float, float]:
    """Unit quaternion for a rotation of ``yaw`` radians about +z."""
    return (math.cos(yaw / 2), 0.0, 0.0, math.sin(yaw / 2))


def spherical_to_cartesian(p: SphericalPoint) -> CartesianPoint:
    """Convert a sensor-frame spherical point to sensor-frame Cartesian.

    x = r cos(phi) cos(theta), y = r cos(phi) sin(theta), z = r sin(phi).
    """
    cos_phi = math.cos(p.elevation)
    return CartesianPoint(
        p.range * cos_phi * math.cos(p.bearing),
        p.range * cos_phi * math.sin(p.bearing),
        p.range * math.sin(p.elevation),
    )


def cartesian_to_spherical(c: CartesianPoint) -> SphericalPoint:
    """Inverse of :func:`spherical_to_cartesian`.

    theta = atan2(y, x), r = sqrt(x^2+y^2+z^2), phi = atan2(z, sqrt(x^2+y^2)).
    On the z-axis (x = y = 0) the bearing is defined as 0.

    Raises:
        ValueError: for the origin, where all angles are undefined.
    """
    r_xy = math.hypot(c.x, c.y)
    r = math.sqrt(c.x * c.x + c.y * c.y + c.z * c.z)
    if r == 0.0:
        raise ValueError("cannot convert the origin to spherical coordinates")
    return SphericalPoint(math.atan2(c.y, c.x), r, math.atan2(c.z, r_xy))


def spherical_to_cartesian_array(
    bearing: np.ndarray, rng: np.ndarray, elevation: np.ndarray
) -> np.ndarray:
    """Vectorized spherical -> Cartesian; returns an array of shape (..., 3)."""
    cos_phi = np.cos(elevation)
    return np.stack(
        [
            rng * cos_phi * np.cos(bearing),
            rng * cos_phi * np.sin(bearing),
            rng * np.sin(elevation),
        ],
        axis=-1,
    )


def cartesian_to_spherical_array(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized Cartesian -> spherical on an array of shape (..., 3)."""
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    r_xy = np.hypot(x, y)
    return np.arctan2(y, x), np.sqrt(x * x + y * y + z * z), np.arctan2(z, r_xy)


def pixel_to_ray(
    config: SonarConfig, bearing_bin: int, range_bin: int, elevation_sample: int
) -> SphericalPoint:
    """Spherical coordinates of a pixel's bin center at one elevation sample.

    Bin centers (not edges) define pixel coordinates, so bin k maps to the
    midpoint of its cell: e.g. r = r_min + (k + 0.5) * bin_width.
    """
    if not 0 <= bearing_bin < config.n_bearing_bins:
        raise IndexError(f"bearing_bin {bearing_bin} out of range")
    if not 0 <= range_bin < config.n_range_bins:
        raise IndexError(f"range_bin {range_bin} out of range")
    if not 0 <= elevation_sample < config.n_elevation_samples:
        raise IndexError(f"elevation_sample {elevation_sample} out of range")
    return SphericalPoint(
        config.theta_min + (bearing_bin + 0.5) * config.bearing_bin_width,
        config.r_min + (range_bin + 0.5) * config.range_bin_width,
        config.phi_min + (elevation_sample + 0.5) * config.elevation_sample_width,
    )


def transform_to_world(pose: Pose, c: CartesianPoint) -> CartesianPoint:
    """Apply the rigid-body transform of ``pose`` to a sensor-frame point."""
    out = pose.rotation_matrix() @ c.as_array() + pose.translation.as_array()
    return CartesianPoint(*out)


def transform_to_world_array(pose: Pose, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`transform_to_world` on an array of shape (..., 3)."""
    return points @ pose.rotation_matrix().T + pose.translation.as_array()


def load_poses(path) -> list[Pose]:
    """Read a pose file: CSV lines ``timestamp,x,y,z,qw,qx,qy,qz``.

    A header line is optional; '#' comments and blank lines are ignored.
    """
    poses = []
    first_data_line = True
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 8:
                raise ValueError(f"{path}:{lineno}: expected 8 fields, got {len(fields)}")
            try:
                vals = [float(f) for f in fields]
            except ValueError:
                if first_data_line:  # optional header line
                    first_data_line = False
                    continue
                raise ValueError(f"{path}:{lineno}: non-numeric pose fields")
            first_data_line = False
            poses.append(
                Pose(vals[0], CartesianPoint(vals[1], vals[2], vals[3]), tuple(vals[4:8]))
            )
    return poses


def save_poses(path, poses) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("timestamp,x,y,z,qw,qx,qy,qz\n")
        for p in poses:
            t = p.translation
            w, x, y, z = p.rotation
            fh.write(
                f"{p.timestamp:.9g},{t.x:.9g},{t.y:.9g},{t.z:.9g},"
                f"{w:.17g},{x:.17g},{y:.17g},{z:.17g}\n"
            )
