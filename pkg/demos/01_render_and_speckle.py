"""Render a sonar frame from a box scene, then speckle it.

Walks through the simulator basics: build a scene, pick a sensor pose and
frustum, render the noise-free range image plus its ground-truth mask, and
inject multiplicative speckle with a background clutter floor. Outputs land
in demos/output/.
"""

import math
import os

from sonarmap import (
    Box,
    CartesianPoint,
    NoiseParams,
    Pose,
    Scene,
    SonarConfig,
    add_speckle,
    render_range_image,
    write_pgm,
)

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

# A flat board 2 m ahead and a small box off to the side.
scene = Scene(
    boxes=[
        Box((2.0, -3.0, -1.0), (2.12, 3.0, 1.0), reflectivity=1.0),
        Box((1.2, -0.8, -1.0), (1.35, -0.4, 1.0), reflectivity=0.85),
    ]
)

# Frustum in the spirit of a small imaging sonar: 0.1-4 m, 56 deg horizontal
# field of view, 12 deg vertical aperture.
config = SonarConfig(
    r_min=0.1, r_max=4.0,
    theta_min=-math.radians(28), theta_max=math.radians(28),
    phi_min=-math.radians(6), phi_max=math.radians(6),
    n_bearing_bins=96, n_range_bins=192, n_elevation_samples=5,
)

pose = Pose(0.0, CartesianPoint(0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))
clean, mask = render_range_image(scene, pose, config)
print(f"rendered {clean.shape[1]}x{clean.shape[0]} range image, "
      f"{(clean > 0).sum()} return pixels")

# Multiplicative speckle; the sigma_floor term fills the zero background
# with |N(0, 18)| clutter so the image looks like a real noisy frame.
noisy = add_speckle(clean, NoiseParams(sigma=0.35, rng_seed=7, sigma_floor=18.0))

write_pgm(os.path.join(out_dir, "clean.pgm"), clean)
write_pgm(os.path.join(out_dir, "mask.pgm"), mask)
write_pgm(os.path.join(out_dir, "noisy.pgm"), noisy)
print(f"wrote clean.pgm, mask.pgm, noisy.pgm to {out_dir}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, (title, img) in zip(
        axes, [("clean render", clean), ("ground-truth mask", mask), ("speckled", noisy)]
    ):
        ax.imshow(img, cmap="gray", origin="lower", aspect="auto")
        ax.set_title(title)
        ax.set_xlabel("bearing bin")
        ax.set_ylabel("range bin")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "01_render.png"), dpi=120)
    print("wrote 01_render.png")
except ImportError:
    print("matplotlib not installed; skipped the figure")
