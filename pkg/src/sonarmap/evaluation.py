"""Metrics and experiment harness: PSNR, mapping FPR/FNR sweeps, runtimes."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import filters as flt
from .geometry import load_poses
from .occupancy import OccupancyGrid, SensorModelParams, integrate_frame
from .simulator import Scene, load_corpus_frame, load_manifest, manifest_config


@dataclass
class PsnrResult:
    filter_name: str
    per_frame: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        finite = [v for v in self.per_frame if math.isfinite(v)]
        if not finite:
            return math.inf if self.per_frame else math.nan
        return sum(finite) / len(finite)


@dataclass(frozen=True)
class OccupancyConfusion:
    """Mapping-sense confusion: FPR = truly-occupied cells the map calls
    free; FNR = truly-free cells the map calls occupied. Unknown (l == 0)
    cells never enter either rate."""

    false_positive_rate: float
    false_negative_rate: float
    threshold: int
    filter_name: str = ""
    occupied_cells_evaluated: int = 0
    free_cells_evaluated: int = 0


def psnr(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB: 10 log10(255^2 / MSE).

    Identical images return math.inf. Computed in floating point over every
    pixel, background included.
    """
    reference = np.asarray(reference)
    candidate = np.asarray(candidate)
    if reference.shape != candidate.shape:
        raise ValueError(f"shape mismatch {reference.shape} vs {candidate.shape}")
    diff = reference.astype(np.float64) - candidate.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def scene_occupancy(scene: Scene, grid: OccupancyGrid) -> np.ndarray:
    """Boolean truth grid: a cell is occupied iff its center is inside a box."""
    nx, ny, nz = grid.dims
    ox, oy, oz = grid.origin
    res = grid.resolution
    cx = ox + (np.arange(nx) + 0.5) * res
    cy = oy + (np.arange(ny) + 0.5) * res
    cz = oz + (np.arange(nz) + 0.5) * res
    occ = np.zeros(grid.dims, dtype=bool)
    for box in scene.boxes:
        lo, hi = box.min_corner, box.max_corner
        ix = (cx >= lo[0]) & (cx <= hi[0])
        iy = (cy >= lo[1]) & (cy <= hi[1])
        iz = (cz >= lo[2]) & (cz <= hi[2])
        occ |= ix[:, None, None] & iy[None, :, None] & iz[None, None, :]
    return occ


def occupancy_confusion(
    grid: OccupancyGrid,
    truth: Scene,
    threshold: int = 0,
    filter_name: str = "",
) -> OccupancyConfusion:
    """Score a map against the scene it observed.

    Only observed cells (l != 0) are evaluated, since everything else is
    unknown by construction. Rates with an empty denominator are NaN; a map
    with no observed cells at all raises.
    """
    observed = grid.cells != 0
    if not observed.any():
        raise ValueError("map has no observed cells; confusion rates undefined")
    truly_occ = scene_occupancy(truth, grid)
    occ_eval = observed & truly_occ
    free_eval = observed & ~truly_occ
    fpr = (
        float((grid.cells[occ_eval] > 0).sum() / occ_eval.sum())
        if occ_eval.any()
        else math.nan
    )
    fnr = (
        float((grid.cells[free_eval] < 0).sum() / free_eval.sum())
        if free_eval.any()
        else math.nan
    )
    return OccupancyConfusion(
        fpr, fnr, threshold, filter_name, int(occ_eval.sum()), int(free_eval.sum())
    )


def _filtered_frames(corpus_dir, filter_name: str, params: flt.FilterParams):
    """Yield (index, filtered image) over a corpus, ground-truth masks feeding
    the mask filter."""
    manifest = load_manifest(corpus_dir)
    for frame in manifest["frame_list"]:
        noisy, _, mask = load_corpus_frame(corpus_dir, frame)
        yield frame["index"], flt.apply_filter(filter_name, noisy, params, mask=mask)


def evaluate_psnr(
    corpus_dir,
    filter_names,
    params: flt.FilterParams = flt.FilterParams(),
) -> list[PsnrResult]:
    """Per-filter PSNR of filtered noisy frames against the clean renders."""
    manifest = load_manifest(corpus_dir)
    frames = manifest["frame_list"]
    cleans = [load_corpus_frame(corpus_dir, f)[1] for f in frames]
    results = []
    for name in filter_names:
        res = PsnrResult(name)
        for (_, filtered), clean in zip(_filtered_frames(corpus_dir, name, params), cleans):
            res.per_frame.append(psnr(clean, filtered))
        results.append(res)
    return results


def build_map(
    corpus_dir,
    images: list[np.ndarray],
    grid_template: OccupancyGrid,
    sensor_params: SensorModelParams,
) -> OccupancyGrid:
    """Integrate pre-filtered images (in manifest frame order) into a fresh
    copy of the grid template, pairing them with the corpus poses."""
    manifest = load_manifest(corpus_dir)
    config = manifest_config(manifest)
    poses = load_poses(os.path.join(os.fspath(corpus_dir), manifest["poses"]))
    if len(images) != len(poses):
        raise ValueError(f"{len(images)} images vs {len(poses)} poses")
    grid = grid_template.copy()
    for img, pose in zip(images, poses):
        integrate_frame(grid, img, pose, config, sensor_params)
    return grid


def threshold_sweep(
    corpus_dir,
    scene: Scene,
    filter_names,
    t_values,
    grid_template: OccupancyGrid,
    sensor_params: SensorModelParams = SensorModelParams(),
    filter_params: flt.FilterParams = flt.FilterParams(),
) -> list[OccupancyConfusion]:
    """FPR/FNR of each (filter, threshold) pair's map on one corpus.

    Frames are filtered once per filter and re-integrated per threshold. The
    sweep pipeline applies the filters as-is (no equalization stage), so the
    comparison across filters is uniform.
    """
    rows = []
    for name in filter_names:
        images = [img for _, img in _filtered_frames(corpus_dir, name, filter_params)]
        for t in t_values:
            sp = SensorModelParams(
                sensor_params.p_free,
                sensor_params.p_occ,
                int(t),
                sensor_params.max_integration_range,
            )
            grid = build_map(corpus_dir, images, grid_template, sp)
            rows.append(occupancy_confusion(grid, scene, int(t), name))
    return rows


def sweep_mean_rates(rows: list[OccupancyConfusion]) -> dict[tuple[str, int], tuple[float, float]]:
    """Average sweep rows from multiple scenes: (filter, t) -> (FPR, FNR).

    NaN entries (empty denominators) are ignored in the average.
    """
    acc: dict[tuple[str, int], list[list[float]]] = {}
    for row in rows:
        key = (row.filter_name, row.threshold)
        fpr_list, fnr_list = acc.setdefault(key, [[], []])
        if math.isfinite(row.false_positive_rate):
            fpr_list.append(row.false_positive_rate)
        if math.isfinite(row.false_negative_rate):
            fnr_list.append(row.false_negative_rate)
    return {
        key: (
            sum(f) / len(f) if f else math.nan,
            sum(n) / len(n) if n else math.nan,
        )
        for key, (f, n) in acc.items()
    }


def benchmark_runtime(
    corpus_dir,
    filter_names,
    params: flt.FilterParams = flt.FilterParams(),
    min_frames: int = 10,
) -> list[dict]:
    """Wall-clock seconds per frame for each filter, single-threaded.

    Requires at least ``min_frames`` frames for a stable mean. Timing covers
    the filter call only (images are preloaded).
    """
    manifest = load_manifest(corpus_dir)
    frames = manifest["frame_list"]
    if len(frames) < min_frames:
        raise ValueError(f"need >= {min_frames} frames, corpus has {len(frames)}")
    loaded = [load_corpus_frame(corpus_dir, f) for f in frames]
    rows = []
    for name in filter_names:
        times = []
        for noisy, _, mask in loaded:
            start = time.perf_counter()
            flt.apply_filter(name, noisy, params, mask=mask)
            times.append(time.perf_counter() - start)
        arr = np.array(times)
        rows.append(
            {
                "filter": name,
                "mean_s": float(arr.mean()),
                "std_s": float(arr.std()),
                "frames": len(times),
            }
        )
    return rows


def write_psnr_csv(path, results: list[PsnrResult]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("filter,frame,psnr_db\n")
        for res in results:
            for i, v in enumerate(res.per_frame):
                fh.write(f"{res.filter_name},{i},{'inf' if math.isinf(v) else f'{v:.6f}'}\n")
        for res in results:
            fh.write(f"{res.filter_name},mean,{res.mean:.6f}\n")


def write_sweep_csv(path, rows: list[OccupancyConfusion]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("filter,threshold,fpr,fnr,occupied_cells,free_cells\n")
        for r in rows:
            fh.write(
                f"{r.filter_name},{r.threshold},{r.false_positive_rate:.6f},"
                f"{r.false_negative_rate:.6f},{r.occupied_cells_evaluated},"
                f"{r.free_cells_evaluated}\n"
            )


def write_bench_csv(path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("filter,mean_s,std_s,frames\n")
        for r in rows:
            fh.write(f"{r['filter']},{r['mean_s']:.6f},{r['std_s']:.6f},{r['frames']}\n")


def plot_psnr(path, results: list[PsnrResult]) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for res in results:
        finite = [v if math.isfinite(v) else np.nan for v in res.per_frame]
        ax.plot(finite, label=res.filter_name)
    ax.set_xlabel("frame")
    ax.set_ylabel("PSNR (dB)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(path, rows: list[OccupancyConfusion]) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_filter: dict[str, list[OccupancyConfusion]] = {}
    for r in rows:
        by_filter.setdefault(r.filter_name, []).append(r)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for name, frows in by_filter.items():
        frows = sorted(frows, key=lambda r: r.threshold)
        ts = [r.threshold for r in frows]
        ax1.plot(ts, [r.false_positive_rate for r in frows], marker="o", label=name)
        ax2.plot(ts, [r.false_negative_rate for r in frows], marker="o", label=name)
    ax1.set_xlabel("threshold t")
    ax1.set_ylabel("FPR")
    ax2.set_xlabel("threshold t")
    ax2.set_ylabel("FNR")
    ax1.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
