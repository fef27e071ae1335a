"""3D log-odds occupancy grid built from range images and known poses.

Sign convention (deliberate, and opposite to much of the occupancy-grid
literature): positive log-odds means FREE, negative means OCCUPIED. Every
cell starts at 0 (unknown). A below-threshold pixel contributes
log_odds(p_free) > 0 to the voxels it traverses; the first at-or-above
threshold pixel on a ray contributes log_odds(p_occ) < 0 to its voxel and
terminates the ray, leaving the shadowed region behind it untouched.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, SonarConfig, spherical_to_cartesian_array, transform_to_world_array

LOG_ODDS_MIN = -10.0
LOG_ODDS_MAX = 10.0


def log_odds(p: float) -> float:
    """l = ln(p / (1-p)) for p in the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must be in (0, 1), got {p}")
    return math.log(p / (1.0 - p))


def inverse_log_odds(l: float) -> float:
    return 1.0 / (1.0 + math.exp(-l))


@dataclass(frozen=True)
class SensorModelParams:
    """Inverse sensor model: free iff pixel intensity z < threshold."""

    p_free: float = 0.55
    p_occ: float = 0.05
    threshold: int = 30
    max_integration_range: float | None = None  # None: integrate to r_max

    def __post_init__(self):
        if not 0.0 < self.p_free < 1.0 or not 0.0 < self.p_occ < 1.0:
            raise ValueError("p_free and p_occ must be in (0, 1)")
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be an 8-bit intensity")

    @property
    def l_free(self) -> float:
        return log_odds(self.p_free)

    @property
    def l_occ(self) -> float:
        return log_odds(self.p_occ)


def classify_pixel(z: int, params: SensorModelParams) -> bool:
    """True if the pixel is an occupied observation (z >= threshold)."""
    return z >= params.threshold


@dataclass
class OccupancyGrid:
    """Axis-aligned voxel grid of clamped log-odds values."""

    origin: tuple[float, float, float]
    resolution: float
    dims: tuple[int, int, int]
    l_min: float = LOG_ODDS_MIN
    l_max: float = LOG_ODDS_MAX
    cells: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        if min(self.dims) < 1:
            raise ValueError("grid dims must be >= 1")
        self.cells = np.zeros(self.dims, dtype=np.float64)

    def copy(self) -> "OccupancyGrid":
        dup = OccupancyGrid(self.origin, self.resolution, self.dims, self.l_min, self.l_max)
        dup.cells = self.cells.copy()
        return dup

    def world_to_voxel(self, point) -> tuple[int, int, int]:
        p = np.asarray(point, dtype=float)
        idx = np.floor((p - np.asarray(self.origin)) / self.resolution).astype(int)
        return tuple(int(v) for v in idx)

    def voxel_center(self, voxel) -> np.ndarray:
        return np.asarray(self.origin) + (np.asarray(voxel, dtype=float) + 0.5) * self.resolution

    def in_bounds(self, voxel) -> bool:
        return all(0 <= v < d for v, d in zip(voxel, self.dims))


def bresenham3d(start, end, dims=None) -> list[tuple[int, int, int]]:
    """Integer 3D Bresenham chain from start to end voxel, inclusive.

    The chain is 26-connected, has max(|dx|,|dy|,|dz|) + 1 voxels, and steps
    once along the dominant axis per voxel. When ``dims`` is given, both
    endpoints are bounds-checked.
    """
    x, y, z = (int(v) for v in start)
    x2, y2, z2 = (int(v) for v in end)
    if dims is not None:
        for v in (start, end):
            if not all(0 <= c < d for c, d in zip(v, dims)):
                raise IndexError(f"voxel {tuple(v)} outside grid dims {tuple(dims)}")

    dx, dy, dz = abs(x2 - x), abs(y2 - y), abs(z2 - z)
    sx = 1 if x2 > x else -1
    sy = 1 if y2 > y else -1
    sz = 1 if z2 > z else -1
    chain = [(x, y, z)]

    if dx >= dy and dx >= dz:
        e1, e2 = 2 * dy - dx, 2 * dz - dx
        for _ in range(dx):
            x += sx
            if e1 >= 0:
                y += sy
                e1 -= 2 * dx
            if e2 >= 0:
                z += sz
                e2 -= 2 * dx
            e1 += 2 * dy
            e2 += 2 * dz
            chain.append((x, y, z))
    elif dy >= dx and dy >= dz:
        e1, e2 = 2 * dx - dy, 2 * dz - dy
        for _ in range(dy):
            y += sy
            if e1 >= 0:
                x += sx
                e1 -= 2 * dy
            if e2 >= 0:
                z += sz
                e2 -= 2 * dy
            e1 += 2 * dx
            e2 += 2 * dz
            chain.append((x, y, z))
    else:
        e1, e2 = 2 * dy - dz, 2 * dx - dz
        for _ in range(dz):
            z += sz
            if e1 >= 0:
                y += sy
                e1 -= 2 * dz
            if e2 >= 0:
                x += sx
                e2 -= 2 * dz
            e1 += 2 * dy
            e2 += 2 * dx
            chain.append((x, y, z))
    return chain


def _ray_bin_points(config: SonarConfig) -> np.ndarray:
    """Sensor-frame bin-center points, shape (n_bearing, n_elev, n_range, 3)."""
    theta = config.bearing_bin_centers()
    phi = config.elevation_sample_centers()
    r = config.range_bin_centers()
    bearing = theta[:, None, None]
    elev = phi[None, :, None]
    rng = r[None, None, :]
    b, e, n = config.n_bearing_bins, config.n_elevation_samples, config.n_range_bins
    return spherical_to_cartesian_array(
        np.broadcast_to(bearing, (b, e, n)),
        np.broadcast_to(rng, (b, e, n)),
        np.broadcast_to(elev, (b, e, n)),
    )


def integrate_frame(
    grid: OccupancyGrid,
    img: np.ndarray,
    pose: Pose,
    config: SonarConfig,
    params: SensorModelParams = SensorModelParams(),
) -> dict:
    """Fuse one range image into the grid along its (bearing, elevation) rays.

    Each ray walks the range bins outward. Every below-threshold bin adds
    l_free to its voxel; the first at-or-above-threshold bin adds l_occ to
    its voxel and stops the ray (the shadow zone behind a return stays
    unknown). Consecutive bins that land in the same voxel update it once,
    and gaps between consecutive bin voxels are bridged with bresenham3d so
    chains stay connected at coarse range binning. Cells are clamped to
    [l_min, l_max] after the frame.

    Returns a stats dict; a pose outside the grid skips the frame
    (``skipped`` = 1) without touching any cell.
    """
    img = np.asarray(img)
    if img.shape != (config.n_range_bins, config.n_bearing_bins):
        raise ValueError(
            f"image shape {img.shape} does not match config "
            f"({config.n_range_bins}, {config.n_bearing_bins})"
        )
    if not grid.in_bounds(grid.world_to_voxel(pose.translation.as_array())):
        return {"skipped": 1, "free_updates": 0, "occupied_updates": 0}

    n_b, n_e, n_r = config.n_bearing_bins, config.n_elevation_samples, config.n_range_bins
    pts = transform_to_world_array(pose, _ray_bin_points(config))
    vox = np.floor((pts - np.asarray(grid.origin)) / grid.resolution).astype(np.int64)

    in_grid = np.all((vox >= 0) & (vox < np.asarray(grid.dims)), axis=-1)
    max_range = params.max_integration_range
    if max_range is not None:
        in_grid &= (config.range_bin_centers() <= max_range)[None, None, :]

    occupied = (img >= params.threshold).T  # (n_bearing, n_range)
    occupied = np.broadcast_to(occupied[:, None, :], (n_b, n_e, n_r))

    # Per ray: traverse bins until the first occupied bin (inclusive) or the
    # first bin that leaves the grid / exceeds max range (exclusive).
    blocked = occupied | ~in_grid
    any_block = blocked.any(axis=-1)
    first_block = np.where(any_block, np.argmax(blocked, axis=-1), n_r)
    bin_idx = np.arange(n_r)[None, None, :]
    active = bin_idx < first_block[..., None]  # free-traversal bins
    occ_update = (
        any_block
        & np.take_along_axis(occupied & in_grid, np.minimum(first_block, n_r - 1)[..., None], axis=-1)[..., 0]
    )

    # Deduplicate consecutive bins that share a voxel.
    same_as_prev = np.zeros((n_b, n_e, n_r), dtype=bool)
    same_as_prev[:, :, 1:] = np.all(vox[:, :, 1:] == vox[:, :, :-1], axis=-1)
    free_sel = active & ~same_as_prev

    flat = grid.cells.reshape(-1)
    nx, ny, nz = grid.dims
    lin = (vox[..., 0] * ny + vox[..., 1]) * nz + vox[..., 2]

    touched = []
    if free_sel.any():
        free_lin = lin[free_sel]
        np.add.at(flat, free_lin, params.l_free)
        touched.append(free_lin)

    occ_lin = np.empty(0, dtype=np.int64)
    if occ_update.any():
        occ_bin = first_block[occ_update]
        occ_vox_lin = lin[occ_update, occ_bin]
        # The occupied bin may share its voxel with the last free bin; the
        # occupied evidence still applies (the return is in that voxel).
        np.add.at(flat, occ_vox_lin, params.l_occ)
        occ_lin = occ_vox_lin
        touched.append(occ_vox_lin)

    # Bridge gaps where consecutive traversed voxels are not 26-adjacent
    # (only possible when range bins are coarser than the voxel size).
    gap_fills = 0
    cheb = np.max(np.abs(vox[:, :, 1:] - vox[:, :, :-1]), axis=-1)
    last_idx = np.where(occ_update, first_block, first_block - 1)
    gap_pairs = (cheb > 1) & (bin_idx[..., 1:] <= last_idx[..., None]) & active[:, :, :-1]
    if gap_pairs.any():
        for bi, ei, ri in zip(*np.nonzero(gap_pairs)):
            inner = bresenham3d(vox[bi, ei, ri], vox[bi, ei, ri + 1])[1:-1]
            for v in inner:
                flat[(v[0] * ny + v[1]) * nz + v[2]] += params.l_free
                gap_fills += 1
                touched.append(np.array([(v[0] * ny + v[1]) * nz + v[2]]))

    if touched:
        all_touched = np.concatenate(touched)
        flat[all_touched] = np.clip(flat[all_touched], grid.l_min, grid.l_max)

    return {
        "skipped": 0,
        "free_updates": int(free_sel.sum()) + gap_fills,
        "occupied_updates": int(occ_lin.size),
    }


def summarize(grid: OccupancyGrid) -> dict:
    """Cell accounting: free (l > 0), occupied (l < 0), unknown (l == 0)."""
    free = int((grid.cells > 0).sum())
    occ = int((grid.cells < 0).sum())
    total = int(grid.cells.size)
    return {
        "total_cells": total,
        "free_cells": free,
        "occupied_cells": occ,
        "unknown_cells": total - free - occ,
    }


def report_text(grid: OccupancyGrid) -> str:
    s = summarize(grid)
    return (
        f"total cells    {s['total_cells']}\n"
        f"free cells     {s['free_cells']}\n"
        f"occupied cells {s['occupied_cells']}\n"
        f"unknown cells  {s['unknown_cells']}\n"
    )


def export_map(grid: OccupancyGrid, path, fmt: str = "csv") -> None:
    """Write the grid to disk.

    ``csv``: metadata comments plus rows ``i,j,k,log_odds`` for nonzero
    cells. ``pointcloud``: two CSVs of world-frame cell centers,
    ``<path>_free.csv`` (l > 0) and ``<path>_occupied.csv`` (l < 0).
    """
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            ox, oy, oz = grid.origin
            nx, ny, nz = grid.dims
            fh.write(f"# origin {ox:.17g} {oy:.17g} {oz:.17g}\n")
            fh.write(f"# resolution {grid.resolution:.17g}\n")
            fh.write(f"# dims {nx} {ny} {nz}\n")
            fh.write("i,j,k,log_odds\n")
            for i, j, k in zip(*np.nonzero(grid.cells)):
                fh.write(f"{i},{j},{k},{grid.cells[i, j, k]:.17g}\n")
    elif fmt == "pointcloud":
        base = os.fspath(path)
        if base.endswith(".csv"):
            base = base[:-4]
        for suffix, sel in (("free", grid.cells > 0), ("occupied", grid.cells < 0)):
            with open(f"{base}_{suffix}.csv", "w", encoding="utf-8") as fh:
                fh.write("x,y,z,log_odds\n")
                for i, j, k in zip(*np.nonzero(sel)):
                    cx, cy, cz = grid.voxel_center((i, j, k))
                    fh.write(f"{cx:.9g},{cy:.9g},{cz:.9g},{grid.cells[i, j, k]:.17g}\n")
    else:
        raise ValueError(f"unknown map export format {fmt!r}")


def import_map(path) -> OccupancyGrid:
    """Rebuild a grid from a CSV written by :func:`export_map` (exact)."""
    origin = resolution = dims = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# origin"):
                origin = tuple(float(v) for v in line.split()[2:5])
            elif line.startswith("# resolution"):
                resolution = float(line.split()[2])
            elif line.startswith("# dims"):
                dims = tuple(int(v) for v in line.split()[2:5])
            elif not line or line.startswith("#") or line.startswith("i,j,k"):
                continue
            else:
                i, j, k, val = line.split(",")
                rows.append((int(i), int(j), int(k), float(val)))
    if origin is None or resolution is None or dims is None:
        raise ValueError(f"{path}: missing grid metadata header")
    grid = OccupancyGrid(origin, resolution, dims)
    for i, j, k, val in rows:
        grid.cells[i, j, k] = val
    return grid
