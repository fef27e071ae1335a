"""Threshold sweep: mapping FPR/FNR per filter across t = 0..60.

Generates a small noisy corpus on disk, then sweeps the inverse sensor
model's intensity threshold for a few filters and tabulates false
positive/negative rates against the known scene, the same experiment the
`sonarmap sweep` command runs.
"""

import math
import os
import tempfile

from sonarmap import (
    Box,
    CartesianPoint,
    FilterParams,
    NoiseParams,
    OccupancyGrid,
    Pose,
    Scene,
    SensorModelParams,
    SonarConfig,
    generate_corpus,
    threshold_sweep,
)
from sonarmap.evaluation import sweep_mean_rates, write_sweep_csv
from sonarmap.geometry import quaternion_from_yaw

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)

scene = Scene(boxes=[Box((2.0, -3.0, -1.0), (2.12, 3.0, 1.0), 1.0)])
config = SonarConfig(
    r_min=0.1, r_max=4.0,
    theta_min=-math.radians(28), theta_max=math.radians(28),
    phi_min=-math.radians(6), phi_max=math.radians(6),
    n_bearing_bins=64, n_range_bins=128, n_elevation_samples=5,
)
poses = [
    Pose(float(i), CartesianPoint(0.0, -0.4 + 0.1 * i, 0.0),
         quaternion_from_yaw(0.04 * math.sin(0.7 * i)))
    for i in range(9)
]

filters = ["wavelet", "anisodiff", "mask"]
t_values = list(range(0, 61, 10))
grid = OccupancyGrid(origin=(-0.4, -2.8, -1.0), resolution=0.1, dims=(46, 56, 20))

with tempfile.TemporaryDirectory() as tmp:
    generate_corpus(scene, poses, config, NoiseParams(0.35, 31, sigma_floor=18.0), tmp)
    rows = threshold_sweep(tmp, scene, filters, t_values, grid,
                           SensorModelParams(), FilterParams())

write_sweep_csv(os.path.join(out_dir, "04_sweep.csv"), rows)
mean = sweep_mean_rates(rows)
print(f"{'t':>3}  " + "  ".join(f"{n:>18s}" for n in filters))
for t in t_values:
    cells = []
    for n in filters:
        fpr, fnr = mean[(n, t)]
        cells.append(f"FPR {fpr:5.3f} FNR {fnr:5.3f}")
    print(f"{t:>3}  " + "  ".join(cells))
print(f"wrote 04_sweep.csv to {out_dir}")
