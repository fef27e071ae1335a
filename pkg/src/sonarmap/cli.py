"""Command-line pipeline: simulate, addnoise, filter, map, eval, sweep, bench.

Exit codes are a stable contract: 0 success, 1 usage error, 2 data error,
3 I/O error. Every command is deterministic given config + seed (timing
columns excepted).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import evaluation, filters, occupancy, simulator
from .config import PipelineConfig, load_config
from .geometry import load_poses
from .pgm import read_pgm, write_pgm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _expand_filters(spec: str) -> list[str]:
    if spec == "all":
        return list(filters.FILTER_NAMES)
    names = [n.strip() for n in spec.split(",") if n.strip()]
    for n in names:
        if n not in filters.FILTER_NAMES:
            raise _UsageError(f"unknown filter {n!r}; choose from {filters.FILTER_NAMES}")
    return names


def _pgm_files(directory: str) -> list[str]:
    try:
        names = sorted(f for f in os.listdir(directory) if f.endswith(".pgm"))
    except OSError as exc:
        raise FileNotFoundError(f"cannot list {directory}: {exc}") from exc
    return names


def _load_pipeline(args) -> PipelineConfig:
    values = load_config(args.config) if args.config else None
    cfg = PipelineConfig(values)
    if args.seed is not None:
        cfg.values["seed"] = str(args.seed)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load_pipeline(args)
    if not os.path.exists(args.scene):
        raise FileNotFoundError(f"scene file not found: {args.scene}")
    if not os.path.exists(args.poses):
        raise FileNotFoundError(f"pose file not found: {args.poses}")
    scene = simulator.load_scene(args.scene)
    trajectory = load_poses(args.poses)
    out_dir = args.out_dir or cfg.path("corpus_dir") or "corpus"
    manifest = simulator.generate_corpus(
        scene, trajectory, cfg.sonar_config(), cfg.noise_params(), out_dir
    )
    print(f"wrote {manifest['frames']} frames to {out_dir}")
    return EXIT_OK


def cmd_addnoise(args) -> int:
    cfg = _load_pipeline(args)
    params = cfg.noise_params()
    out_dir = args.out_dir or "noisy"
    os.makedirs(out_dir, exist_ok=True)
    names = _pgm_files(args.input_dir)
    if not names:
        raise ValueError(f"no .pgm files in {args.input_dir}")
    for i, name in enumerate(names):
        img = read_pgm(os.path.join(args.input_dir, name))
        noisy = simulator.add_speckle(
            img, simulator.NoiseParams(params.sigma, params.rng_seed + i, params.sigma_floor)
        )
        write_pgm(os.path.join(out_dir, name), noisy)
    print(f"wrote {len(names)} noisy frames to {out_dir}")
    return EXIT_OK


def cmd_filter(args) -> int:
    cfg = _load_pipeline(args)
    params = cfg.filter_params()
    name = args.name
    if name == "mask" and not args.mask_dir:
        raise _UsageError("--mask-dir is required with --name mask")
    out_dir = args.out_dir or f"filtered_{name}"
    os.makedirs(out_dir, exist_ok=True)
    files = _pgm_files(args.input_dir)
    if not files:
        raise ValueError(f"no .pgm files in {args.input_dir}")

    written = skipped = 0
    for fname in files:
        img = read_pgm(os.path.join(args.input_dir, fname))
        if name == "mask":
            mask_path = os.path.join(args.mask_dir, fname)
            if not os.path.exists(mask_path):
                skipped += 1
                continue
            mask = read_pgm(mask_path)
            # Fig-6 order for the mask path: segment, unsharp, equalize.
            out = filters.mask_apply_filter(img, mask, params)
            out = filters.histogram_equalize(out)
        else:
            out = filters.apply_filter(name, img, params)
            if args.equalize:
                out = filters.histogram_equalize(out)
        write_pgm(os.path.join(out_dir, fname), out)
        written += 1

    if skipped:
        print(f"skipped {skipped} frames with no matching mask", file=sys.stderr)
    if written == 0:
        raise ValueError("no frames were filtered")
    print(f"wrote {written} filtered frames to {out_dir}")
    return EXIT_OK


def cmd_map(args) -> int:
    cfg = _load_pipeline(args)
    sonar = cfg.sonar_config()
    sensor = cfg.sensor_model_params()
    grid = cfg.grid_template()
    poses = load_poses(args.poses)
    files = _pgm_files(args.input_dir)
    if len(files) != len(poses):
        raise ValueError(f"{len(files)} frames but {len(poses)} poses; refusing to integrate")
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)

    skipped = 0
    for fname, pose in zip(files, poses):
        img = read_pgm(os.path.join(args.input_dir, fname))
        stats = occupancy.integrate_frame(grid, img, pose, sonar, sensor)
        skipped += stats["skipped"]
    if skipped:
        print(f"warning: {skipped} frames skipped (pose outside grid)", file=sys.stderr)
    if not files:
        print("warning: empty input; writing empty map", file=sys.stderr)

    map_path = os.path.join(out_dir, "map.csv")
    occupancy.export_map(grid, map_path)
    occupancy.export_map(grid, os.path.join(out_dir, "map_cloud.csv"), fmt="pointcloud")
    report = occupancy.report_text(grid)
    with open(os.path.join(out_dir, "map_report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    print(f"map written to {map_path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _load_pipeline(args)
    names = _expand_filters(args.filters)
    results = evaluation.evaluate_psnr(args.corpus, names, cfg.filter_params())
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "psnr.csv")
    evaluation.write_psnr_csv(csv_path, results)
    for res in results:
        print(f"{res.filter_name}: mean PSNR {res.mean:.2f} dB over {len(res.per_frame)} frames")
    if args.plot:
        evaluation.plot_psnr(os.path.join(out_dir, "psnr.png"), results)
    print(f"results written to {csv_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_pipeline(args)
    names = _expand_filters(args.filters)
    if not (0 <= args.t_min <= args.t_max <= 255) or args.t_step <= 0:
        raise _UsageError("invalid threshold range; need 0 <= t_min <= t_max <= 255, step > 0")
    t_values = list(range(args.t_min, args.t_max + 1, args.t_step))
    scene = simulator.load_scene(args.scene)
    rows = evaluation.threshold_sweep(
        args.corpus,
        scene,
        names,
        t_values,
        cfg.grid_template(),
        cfg.sensor_model_params(),
        cfg.filter_params(),
    )
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "sweep.csv")
    evaluation.write_sweep_csv(csv_path, rows)
    if args.plot:
        evaluation.plot_sweep(os.path.join(out_dir, "sweep.png"), rows)
    print(f"{len(rows)} sweep rows written to {csv_path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _load_pipeline(args)
    names = _expand_filters(args.filters)
    rows = evaluation.benchmark_runtime(args.corpus, names, cfg.filter_params())
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "bench.csv")
    evaluation.write_bench_csv(csv_path, rows)
    for r in rows:
        print(f"{r['filter']}: {r['mean_s'] * 1e3:.2f} ms/frame (std {r['std_s'] * 1e3:.2f})")
    print(f"results written to {csv_path}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="sonarmap", description=__doc__)
    parser.add_argument("--config", help="flat config file (section.key = value)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out-dir", help="output directory")
    parser.add_argument("--plot", action="store_true", help="also write chart images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a corpus from a scene and trajectory")
    p.add_argument("--scene", required=True)
    p.add_argument("--poses", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("addnoise", help="add speckle noise to clean PGM frames")
    p.add_argument("--input-dir", required=True)
    p.set_defaults(func=cmd_addnoise)

    p = sub.add_parser("filter", help="despeckle a directory of PGM frames")
    p.add_argument("--name", required=True, choices=filters.FILTER_NAMES)
    p.add_argument("--input-dir", required=True)
    p.add_argument("--mask-dir", help="mask frames (required for --name mask)")
    p.add_argument("--equalize", action="store_true",
                   help="apply histogram equalization after a classical filter")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("map", help="integrate filtered frames into an occupancy map")
    p.add_argument("--input-dir", required=True)
    p.add_argument("--poses", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("eval", help="PSNR of each filter against clean renders")
    p.add_argument("--corpus", required=True)
    p.add_argument("--filters", default="all")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="FPR/FNR threshold sweep over mapped corpora")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scene", required=True)
    p.add_argument("--filters", default="all")
    p.add_argument("--t-min", type=int, default=0)
    p.add_argument("--t-max", type=int, default=60)
    p.add_argument("--t-step", type=int, default=5)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="seconds-per-frame benchmark of the filters")
    p.add_argument("--corpus", required=True)
    p.add_argument("--filters", default="all")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FileNotFoundError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IndexError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
