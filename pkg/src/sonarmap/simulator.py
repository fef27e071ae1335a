"""Range-image simulation: scenes of boxes, rendering, speckle, corpora.

Range images are plain 2D uint8 arrays of shape (n_range_bins,
n_bearing_bins); row 0 is the bin nearest r_min. Binary masks share the
shape and hold only {0, 255}.

Rendering marches each (bearing, elevation) ray through the range bins in
order and keeps the first obstacle hit, so nearer obstacles shadow anything
behind them; the elevation dimension is collapsed by taking the maximum
intensity per (range, bearing) pixel, which is what makes the elevation
angle unobservable in the image.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, SonarConfig
from .pgm import read_pgm, write_pgm


@dataclass(frozen=True)
class Box:
    """Axis-aligned box obstacle with a surface reflectivity in (0, 1]."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]
    reflectivity: float = 1.0

    def __post_init__(self):
        if not all(a < b for a, b in zip(self.min_corner, self.max_corner)):
            raise ValueError("box min corner must be < max corner per axis")
        if not 0.0 < self.reflectivity <= 1.0:
            raise ValueError("reflectivity must be in (0, 1]")


@dataclass
class Scene:
    boxes: list[Box] = field(default_factory=list)
    bounds: tuple[tuple[float, float, float], tuple[float, float, float]] = (
        (-10.0, -10.0, -10.0),
        (10.0, 10.0, 10.0),
    )


@dataclass(frozen=True)
class NoiseParams:
    """Multiplicative speckle parameters.

    ``sigma`` is the std of the multiplicative Gaussian term. ``sigma_floor``
    optionally adds |N(0, sigma_floor)| background clutter to pixels that are
    exactly zero (default off), since purely multiplicative noise preserves
    zeros.
    """

    sigma: float
    rng_seed: int = 0
    sigma_floor: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.sigma_floor < 0:
            raise ValueError("sigma_floor must be >= 0")


def validate_range_image(pixels: np.ndarray, config: SonarConfig | None = None) -> np.ndarray:
    pixels = np.asarray(pixels)
    if pixels.ndim != 2 or pixels.dtype != np.uint8:
        raise ValueError("range image must be a 2D uint8 array")
    if config is not None and pixels.shape != (config.n_range_bins, config.n_bearing_bins):
        raise ValueError(
            f"image shape {pixels.shape} does not match config "
            f"({config.n_range_bins}, {config.n_bearing_bins})"
        )
    return pixels


def validate_mask(mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.dtype != np.uint8:
        raise ValueError("mask must be a 2D uint8 array")
    bad = ~np.isin(mask, (0, 255))
    if bad.any():
        raise ValueError("mask must be strictly two-valued {0, 255}")
    return mask


def load_scene(path) -> Scene:
    """Read a scene file: one box per line,
    ``min_x min_y min_z max_x max_y max_z reflectivity``; '#' comments allowed.
    """
    boxes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 7:
                raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(fields)}")
            v = [float(f) for f in fields]
            boxes.append(Box(tuple(v[0:3]), tuple(v[3:6]), v[6]))
    return Scene(boxes=boxes)


def save_scene(path, scene: Scene) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# min_x min_y min_z max_x max_y max_z reflectivity\n")
        for b in scene.boxes:
            lo, hi = b.min_corner, b.max_corner
            fh.write(
                f"{lo[0]:.9g} {lo[1]:.9g} {lo[2]:.9g} "
                f"{hi[0]:.9g} {hi[1]:.9g} {hi[2]:.9g} {b.reflectivity:.9g}\n"
            )


def _ray_directions(config: SonarConfig) -> np.ndarray:
    """Unit ray directions, shape (n_bearing, n_elevation, 3), sensor frame."""
    theta = config.bearing_bin_centers()[:, None]
    phi = config.elevation_sample_centers()[None, :]
    cos_phi = np.cos(phi)
    return np.stack(
        [
            cos_phi * np.cos(theta),
            cos_phi * np.sin(theta),
            np.broadcast_to(np.sin(phi), (config.n_bearing_bins, config.n_elevation_samples)),
        ],
        axis=-1,
    )


def render_range_image(
    scene: Scene, pose: Pose, config: SonarConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Render the noise-free range image and its ground-truth binary mask.

    Hit intensity is 255 * reflectivity * |cos incidence| against the struck
    box face, quantized to 8 bits. The mask is 255 exactly where the rendered
    image is nonzero.

    Returns:
        (image, mask), both uint8 of shape (n_range_bins, n_bearing_bins).
    """
    n_b, n_e, n_r = config.n_bearing_bins, config.n_elevation_samples, config.n_range_bins
    image = np.zeros((n_r, n_b), dtype=np.uint8)
    if not scene.boxes:
        return image, np.zeros_like(image)

    dirs = _ray_directions(config) @ pose.rotation_matrix().T  # (n_b, n_e, 3)
    origin = pose.translation.as_array()
    r_centers = config.range_bin_centers()
    # Sample points along every ray at every range-bin center.
    pts = origin + r_centers[None, None, :, None] * dirs[:, :, None, :]

    hit_any = np.zeros((n_b, n_e, n_r), dtype=bool)
    for box in scene.boxes:
        lo = np.array(box.min_corner)
        hi = np.array(box.max_corner)
        inside = np.all((pts >= lo) & (pts <= hi), axis=-1)
        hit_any |= inside

    ray_has_hit = hit_any.any(axis=-1)
    first_bin = np.argmax(hit_any, axis=-1)  # valid only where ray_has_hit

    # Intensity at the first hit: strongest contribution among boxes that
    # contain the sample point, using the slab entry face for the incidence.
    intensity = np.zeros((n_b, n_e))
    hit_pts = origin + r_centers[first_bin][..., None] * dirs
    with np.errstate(divide="ignore", invalid="ignore"):
        for box in scene.boxes:
            lo = np.array(box.min_corner)
            hi = np.array(box.max_corner)
            in_box = ray_has_hit & np.all((hit_pts >= lo) & (hit_pts <= hi), axis=-1)
            if not in_box.any():
                continue
            t0 = (lo - origin) / dirs
            t1 = (hi - origin) / dirs
            t_near = np.minimum(t0, t1)  # per-axis entry times
            entry_axis = np.argmax(np.where(np.isfinite(t_near), t_near, -np.inf), axis=-1)
            cos_inc = np.abs(np.take_along_axis(dirs, entry_axis[..., None], axis=-1))[..., 0]
            cand = 255.0 * box.reflectivity * cos_inc
            intensity = np.where(in_box & (cand > intensity), cand, intensity)

    quantized = np.round(intensity).astype(np.uint8)
    # Collapse elevation per (range, bearing) pixel with the per-pixel maximum.
    flat_bins = first_bin.ravel()
    flat_bearings = np.repeat(np.arange(n_b), n_e)
    flat_vals = quantized.ravel()
    keep = ray_has_hit.ravel()
    np.maximum.at(image, (flat_bins[keep], flat_bearings[keep]), flat_vals[keep])

    mask = np.where(image > 0, 255, 0).astype(np.uint8)
    return image, mask


def add_speckle(img: np.ndarray, params: NoiseParams) -> np.ndarray:
    """Inject multiplicative speckle: out = clip(round(in * (1 + sigma*n)), 0, 255).

    n ~ N(0,1) i.i.d. per pixel, drawn from a generator seeded with
    ``params.rng_seed``, so the result is deterministic given the seed.
    With sigma = 0 (and no floor) the image passes through unchanged.
    """
    img = validate_range_image(img)
    rng = np.random.default_rng(params.rng_seed)
    vals = img.astype(np.float64)
    if params.sigma > 0:
        vals = vals * (1.0 + params.sigma * rng.standard_normal(img.shape))
    if params.sigma_floor > 0:
        floor = np.abs(params.sigma_floor * rng.standard_normal(img.shape))
        vals = np.where(img == 0, floor, vals)
    return np.clip(np.round(vals), 0, 255).astype(np.uint8)


def _frame_name(i: int) -> str:
    return f"frame_{i:04d}.pgm"


def generate_corpus(
    scene: Scene,
    trajectory: list[Pose],
    config: SonarConfig,
    params: NoiseParams,
    out_dir,
) -> dict:
    """Render a corpus of (noisy, clean, mask) frame triples to ``out_dir``.

    Layout: ``noisy/``, ``clean/``, ``masks/`` subdirectories with matching
    frame filenames, plus ``poses.csv`` and ``manifest.txt``. Frame i's noise
    is seeded with rng_seed + i, so regeneration is byte-identical.

    Returns the manifest as a dict (see :func:`load_manifest`).
    """
    from .geometry import save_poses

    out_dir = os.fspath(out_dir)
    for sub in ("noisy", "clean", "masks"):
        os.makedirs(os.path.join(out_dir, sub), exist_ok=True)

    frames = []
    for i, pose in enumerate(trajectory):
        clean, mask = render_range_image(scene, pose, config)
        noisy = add_speckle(
            clean,
            NoiseParams(params.sigma, params.rng_seed + i, params.sigma_floor),
        )
        name = _frame_name(i)
        write_pgm(os.path.join(out_dir, "noisy", name), noisy)
        write_pgm(os.path.join(out_dir, "clean", name), clean)
        write_pgm(os.path.join(out_dir, "masks", name), mask)
        frames.append(
            {
                "index": i,
                "noisy": f"noisy/{name}",
                "clean": f"clean/{name}",
                "mask": f"masks/{name}",
            }
        )

    save_poses(os.path.join(out_dir, "poses.csv"), trajectory)

    manifest = {
        "format": "sonarmap-corpus-v1",
        "frames": len(frames),
        "poses": "poses.csv",
        "sonar.r_min": config.r_min,
        "sonar.r_max": config.r_max,
        "sonar.theta_min": config.theta_min,
        "sonar.theta_max": config.theta_max,
        "sonar.phi_min": config.phi_min,
        "sonar.phi_max": config.phi_max,
        "sonar.n_bearing_bins": config.n_bearing_bins,
        "sonar.n_range_bins": config.n_range_bins,
        "sonar.n_elevation_samples": config.n_elevation_samples,
        "noise.sigma": params.sigma,
        "noise.sigma_floor": params.sigma_floor,
        "noise.seed": params.rng_seed,
        "frame_list": frames,
    }
    with open(os.path.join(out_dir, "manifest.txt"), "w", encoding="utf-8") as fh:
        for key, val in manifest.items():
            if key == "frame_list":
                continue
            fh.write(f"{key} = {val}\n")
        for f in frames:
            fh.write(f"frame {f['index']:04d} {f['noisy']} {f['clean']} {f['mask']}\n")
    return manifest


def load_manifest(corpus_dir) -> dict:
    """Parse a corpus manifest back into the dict produced by generate_corpus."""
    manifest: dict = {"frame_list": []}
    path = os.path.join(os.fspath(corpus_dir), "manifest.txt")
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("frame "):
                _, idx, noisy, clean, mask = line.split()
                manifest["frame_list"].append(
                    {"index": int(idx), "noisy": noisy, "clean": clean, "mask": mask}
                )
            else:
                key, val = (s.strip() for s in line.split("=", 1))
                manifest[key] = val
    for key in ("frames", "sonar.n_bearing_bins", "sonar.n_range_bins",
                "sonar.n_elevation_samples", "noise.seed"):
        if key in manifest:
            manifest[key] = int(manifest[key])
    for key in ("sonar.r_min", "sonar.r_max", "sonar.theta_min", "sonar.theta_max",
                "sonar.phi_min", "sonar.phi_max", "noise.sigma", "noise.sigma_floor"):
        if key in manifest:
            manifest[key] = float(manifest[key])
    return manifest


def manifest_config(manifest: dict) -> SonarConfig:
    """Rebuild the SonarConfig recorded in a corpus manifest."""
    return SonarConfig(
        r_min=manifest["sonar.r_min"],
        r_max=manifest["sonar.r_max"],
        theta_min=manifest["sonar.theta_min"],
        theta_max=manifest["sonar.theta_max"],
        phi_min=manifest["sonar.phi_min"],
        phi_max=manifest["sonar.phi_max"],
        n_bearing_bins=manifest["sonar.n_bearing_bins"],
        n_range_bins=manifest["sonar.n_range_bins"],
        n_elevation_samples=manifest["sonar.n_elevation_samples"],
    )


def load_corpus_frame(corpus_dir, frame: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Load one manifest frame's (noisy, clean, mask) images."""
    corpus_dir = os.fspath(corpus_dir)
    return (
        read_pgm(os.path.join(corpus_dir, frame["noisy"])),
        read_pgm(os.path.join(corpus_dir, frame["clean"])),
        read_pgm(os.path.join(corpus_dir, frame["mask"])),
    )
