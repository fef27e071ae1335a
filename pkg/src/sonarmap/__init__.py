"""sonarmap: imaging-sonar range-image simulation, despeckling, and
3D log-odds occupancy mapping with an evaluation harness."""

from .geometry import (
    CartesianPoint,
    Pose,
    SonarConfig,
    SphericalPoint,
    cartesian_to_spherical,
    load_poses,
    pixel_to_ray,
    save_poses,
    spherical_to_cartesian,
    transform_to_world,
)
from .simulator import (
    Box,
    NoiseParams,
    Scene,
    add_speckle,
    generate_corpus,
    load_scene,
    render_range_image,
    save_scene,
)
from .filters import (
    FILTER_NAMES,
    FilterParams,
    anisotropic_diffusion,
    enhanced_lee_filter,
    frost_filter,
    histogram_equalize,
    mask_apply_filter,
    wavelet_denoise,
)
from .occupancy import (
    OccupancyGrid,
    SensorModelParams,
    bresenham3d,
    classify_pixel,
    export_map,
    import_map,
    integrate_frame,
    log_odds,
)
from .evaluation import (
    OccupancyConfusion,
    PsnrResult,
    benchmark_runtime,
    evaluate_psnr,
    occupancy_confusion,
    psnr,
    threshold_sweep,
)
from .pgm import read_pgm, write_pgm

__version__ = "0.1.0"
