"""Shared fixtures: desk-scale corpora reused across test modules."""

import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from sonarmap.geometry import CartesianPoint, Pose, SonarConfig, quaternion_from_yaw
from sonarmap.simulator import Box, NoiseParams, Scene, generate_corpus, save_scene


def desk_config(n_bearing=48, n_range=96, n_elev=3):
    return SonarConfig(
        r_min=0.1, r_max=4.0,
        theta_min=-math.radians(28), theta_max=math.radians(28),
        phi_min=-math.radians(6), phi_max=math.radians(6),
        n_bearing_bins=n_bearing, n_range_bins=n_range, n_elevation_samples=n_elev,
    )


def desk_scene():
    return Scene(
        boxes=[
            Box((2.0, -3.0, -1.0), (2.4, 3.0, 1.0), 1.0),
            Box((1.1, -0.9, -1.0), (1.4, -0.5, 1.0), 0.85),
        ]
    )


def lawnmower_trajectory(n_frames, y_span=0.9):
    poses = []
    for i in range(n_frames):
        frac = i / max(n_frames - 1, 1)
        y = -y_span / 2 + y_span * frac
        yaw = 0.05 * math.sin(2 * math.pi * frac)
        poses.append(Pose(float(i), CartesianPoint(0.0, y, 0.0), quaternion_from_yaw(yaw)))
    return poses


@pytest.fixture(scope="session")
def desk_corpus(tmp_path_factory):
    """12-frame corpus with speckle + background clutter, plus its scene file."""
    root = tmp_path_factory.mktemp("desk_corpus")
    scene = desk_scene()
    config = desk_config()
    poses = lawnmower_trajectory(12)
    manifest = generate_corpus(
        scene, poses, config, NoiseParams(sigma=0.35, rng_seed=77, sigma_floor=18.0), root
    )
    scene_path = root / "scene.txt"
    save_scene(scene_path, scene)
    return {
        "dir": root,
        "scene": scene,
        "scene_path": scene_path,
        "config": config,
        "poses": poses,
        "manifest": manifest,
    }
