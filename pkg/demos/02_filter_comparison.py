"""Compare the despeckle filters on one noisy frame.

Runs the four classical filters and the mask-apply filter (fed with the
simulator's ground-truth mask) on the same speckled frame and reports PSNR
against the clean render, echoing the per-scene comparison the evaluation
harness automates.
"""

import math
import os
import time

from sonarmap import (
    Box,
    CartesianPoint,
    FilterParams,
    NoiseParams,
    Pose,
    Scene,
    SonarConfig,
    add_speckle,
    psnr,
    render_range_image,
)
from sonarmap.filters import apply_filter

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

scene = Scene(
    boxes=[
        Box((2.0, -3.0, -1.0), (2.12, 3.0, 1.0), 1.0),
        Box((1.2, -0.8, -1.0), (1.35, -0.4, 1.0), 0.85),
    ]
)
config = SonarConfig(
    r_min=0.1, r_max=4.0,
    theta_min=-math.radians(28), theta_max=math.radians(28),
    phi_min=-math.radians(6), phi_max=math.radians(6),
    n_bearing_bins=96, n_range_bins=192, n_elevation_samples=5,
)
pose = Pose(0.0, CartesianPoint(0, 0, 0), (1, 0, 0, 0))
clean, mask = render_range_image(scene, pose, config)
noisy = add_speckle(clean, NoiseParams(0.35, rng_seed=3, sigma_floor=18.0))

params = FilterParams()
print(f"{'input':13s} PSNR {psnr(clean, noisy):6.2f} dB")

outputs = {}
for name in ("frost", "lee-enhanced", "anisodiff", "wavelet", "mask"):
    start = time.perf_counter()
    out = apply_filter(name, noisy, params, mask=mask)
    elapsed = time.perf_counter() - start
    outputs[name] = out
    print(f"{name:13s} PSNR {psnr(clean, out):6.2f} dB   ({elapsed * 1e3:6.1f} ms)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panels = [("clean", clean), ("noisy", noisy)] + list(outputs.items())
    fig, axes = plt.subplots(2, 4, figsize=(14, 7))
    for ax, (title, img) in zip(axes.ravel(), panels):
        ax.imshow(img, cmap="gray", origin="lower", aspect="auto")
        ax.set_title(title)
        ax.axis("off")
    axes.ravel()[-1].axis("off")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "02_filters.png"), dpi=120)
    print(f"wrote 02_filters.png to {out_dir}")
except ImportError:
    print("matplotlib not installed; skipped the figure")
