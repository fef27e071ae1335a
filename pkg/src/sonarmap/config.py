"""Flat plain-text pipeline configuration: ``section.key = value`` lines.

Angles live in degrees in config files and on the CLI; everything internal
is radians. Unknown keys are preserved through parse/serialize round trips.
"""

from __future__ import annotations

import math

from .filters import FilterParams
from .geometry import SonarConfig
from .occupancy import OccupancyGrid, SensorModelParams
from .simulator import NoiseParams

DEFAULTS = {
    "sonar.r_min": "0.1",
    "sonar.r_max": "5.0",
    "sonar.bearing_min_deg": "-30.0",
    "sonar.bearing_max_deg": "30.0",
    "sonar.elevation_min_deg": "-6.0",
    "sonar.elevation_max_deg": "6.0",
    "sonar.n_bearing_bins": "96",
    "sonar.n_range_bins": "256",
    "sonar.n_elevation_samples": "7",
    "noise.sigma": "0.35",
    "noise.sigma_floor": "0.0",
    "filter.window_radius": "3",
    "filter.frost_damping": "2.0",
    "filter.lee_k": "1.0",
    "filter.diffusion_iterations": "15",
    "filter.diffusion_kappa": "30.0",
    "filter.diffusion_lambda": "0.25",
    "filter.wavelet_levels": "3",
    "filter.unsharp_amount": "1.0",
    "filter.unsharp_radius": "1.5",
    "sensor_model.p_free": "0.55",
    "sensor_model.p_occ": "0.05",
    "sensor_model.threshold": "30",
    "grid.origin_x": "-1.0",
    "grid.origin_y": "-3.0",
    "grid.origin_z": "-1.0",
    "grid.resolution": "0.05",
    "grid.nx": "140",
    "grid.ny": "120",
    "grid.nz": "40",
    "seed": "0",
}


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        values[key] = val
    return values


def load_config(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def serialize_config(values: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in values.items())


def save_config(path, values: dict[str, str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_config(values))


class PipelineConfig:
    """Typed view over a flat config dict, with package defaults filled in."""

    def __init__(self, values: dict[str, str] | None = None):
        self.values = dict(DEFAULTS)
        if values:
            self.values.update(values)

    def _f(self, key: str) -> float:
        return float(self.values[key])

    def _i(self, key: str) -> int:
        return int(self.values[key])

    @property
    def seed(self) -> int:
        return self._i("seed")

    def sonar_config(self) -> SonarConfig:
        return SonarConfig(
            r_min=self._f("sonar.r_min"),
            r_max=self._f("sonar.r_max"),
            theta_min=math.radians(self._f("sonar.bearing_min_deg")),
            theta_max=math.radians(self._f("sonar.bearing_max_deg")),
            phi_min=math.radians(self._f("sonar.elevation_min_deg")),
            phi_max=math.radians(self._f("sonar.elevation_max_deg")),
            n_bearing_bins=self._i("sonar.n_bearing_bins"),
            n_range_bins=self._i("sonar.n_range_bins"),
            n_elevation_samples=self._i("sonar.n_elevation_samples"),
        )

    def noise_params(self, seed: int | None = None) -> NoiseParams:
        return NoiseParams(
            sigma=self._f("noise.sigma"),
            rng_seed=self.seed if seed is None else seed,
            sigma_floor=self._f("noise.sigma_floor"),
        )

    def filter_params(self) -> FilterParams:
        # lee_cu defaults to the configured speckle sigma; cmax to sqrt(3)*cu.
        cu = float(self.values.get("filter.lee_cu", self.values["noise.sigma"]))
        cmax = float(self.values.get("filter.lee_cmax", cu * math.sqrt(3.0)))
        return FilterParams(
            window_radius=self._i("filter.window_radius"),
            frost_damping=self._f("filter.frost_damping"),
            lee_cu=cu,
            lee_cmax=cmax,
            lee_k=self._f("filter.lee_k"),
            diffusion_iterations=self._i("filter.diffusion_iterations"),
            diffusion_kappa=self._f("filter.diffusion_kappa"),
            diffusion_lambda=self._f("filter.diffusion_lambda"),
            wavelet_levels=self._i("filter.wavelet_levels"),
            unsharp_amount=self._f("filter.unsharp_amount"),
            unsharp_radius=self._f("filter.unsharp_radius"),
        )

    def sensor_model_params(self) -> SensorModelParams:
        max_range = self.values.get("sensor_model.max_integration_range")
        return SensorModelParams(
            p_free=self._f("sensor_model.p_free"),
            p_occ=self._f("sensor_model.p_occ"),
            threshold=self._i("sensor_model.threshold"),
            max_integration_range=float(max_range) if max_range else None,
        )

    def grid_template(self) -> OccupancyGrid:
        return OccupancyGrid(
            origin=(self._f("grid.origin_x"), self._f("grid.origin_y"), self._f("grid.origin_z")),
            resolution=self._f("grid.resolution"),
            dims=(self._i("grid.nx"), self._i("grid.ny"), self._i("grid.nz")),
        )

    def path(self, key: str, default: str | None = None) -> str | None:
        return self.values.get(f"paths.{key}", default)
