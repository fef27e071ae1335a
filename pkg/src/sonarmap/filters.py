"""Despeckle filter suite for 8-bit range images.

Five CLI-facing filters: ``frost``, ``lee-enhanced``, ``anisodiff``,
``wavelet``, and ``mask`` (binary-mask segmentation followed by unsharp
sharpening), plus histogram equalization as a separate contrast stage.

All filtering runs in float64 and quantizes to 8 bits only at the output.
Window and convolution boundaries use symmetric (reflective) extension so
frame edges do not acquire dark halos. Every filter is pure: identical input
and parameters give byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .simulator import validate_mask, validate_range_image

FILTER_NAMES = ("frost", "lee-enhanced", "anisodiff", "wavelet", "mask")


@dataclass(frozen=True)
class FilterParams:
    """Tuning knobs for the filter suite (literature defaults)."""

    window_radius: int = 3
    frost_damping: float = 2.0
    lee_cu: float = 0.25
    lee_cmax: float = 0.25 * math.sqrt(3.0)
    lee_k: float = 1.0
    diffusion_iterations: int = 15
    diffusion_kappa: float = 30.0
    diffusion_lambda: float = 0.25
    wavelet_levels: int = 3
    unsharp_amount: float = 1.0
    unsharp_radius: float = 1.5

    def __post_init__(self):
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")
        if not 0.0 < self.diffusion_lambda <= 0.25:
            raise ValueError("diffusion_lambda must be in (0, 0.25]")
        if self.wavelet_levels < 1:
            raise ValueError("wavelet_levels must be >= 1")
        if not self.lee_cu < self.lee_cmax:
            raise ValueError("require lee_cu < lee_cmax")


def _quantize(vals: np.ndarray) -> np.ndarray:
    return np.clip(np.round(vals), 0, 255).astype(np.uint8)


def _local_stats(img: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Window mean and std via shifted-view accumulation over a symmetric pad.

    Offsets accumulate in row-major order, which keeps the per-pixel
    arithmetic sequence identical to a scalar reference implementation.
    """
    h, w = img.shape
    padded = np.pad(img, radius, mode="symmetric")
    s1 = np.zeros_like(img)
    s2 = np.zeros_like(img)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            win = padded[dy : dy + h, dx : dx + w]
            s1 = s1 + win
            s2 = s2 + win * win
    n = float((2 * radius + 1) ** 2)
    mean = s1 / n
    var = np.maximum(s2 / n - mean * mean, 0.0)
    return mean, np.sqrt(var)


def frost_filter(img: np.ndarray, params: FilterParams = FilterParams()) -> np.ndarray:
    """Frost filter: exponentially damped adaptive kernel.

    Kernel weight exp(-damping * C^2 * d) with C the window coefficient of
    variation (std/mean) and d the Chebyshev distance to the window center.
    The kernel depends on the local statistics, so it is recomputed per pixel
    in the classical windowed fashion. Windows with zero mean pass the input
    pixel through.
    """
    img = validate_range_image(img)
    r = params.window_radius
    h, w = img.shape
    vals = img.astype(np.float64)
    padded = np.pad(vals, r, mode="symmetric")
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    dist = np.maximum(np.abs(yy), np.abs(xx)).astype(np.float64)
    n = float((2 * r + 1) ** 2)

    out = np.empty_like(vals)
    for i in range(h):
        for j in range(w):
            win = padded[i : i + 2 * r + 1, j : j + 2 * r + 1]
            s1 = win.sum()
            mean = s1 / n
            if mean == 0.0:
                out[i, j] = vals[i, j]
                continue
            var = (win * win).sum() / n - mean * mean
            ci2 = max(var, 0.0) / (mean * mean)
            weights = np.exp(-params.frost_damping * ci2 * dist)
            out[i, j] = (weights * win).sum() / weights.sum()
    return _quantize(out)


def enhanced_lee_filter(img: np.ndarray, params: FilterParams = FilterParams()) -> np.ndarray:
    """Enhanced Lee filter with two coefficient-of-variation thresholds.

    C <= cu: window mean (homogeneous). cu < C < cmax: mean + W*(center-mean)
    with W = exp(-k*(C-cu)/(cmax-C)). C >= cmax: center passthrough
    (point-target preservation).
    """
    img = validate_range_image(img)
    vals = img.astype(np.float64)
    mean, std = _local_stats(vals, params.window_radius)
    ci = np.where(mean > 0, std / np.where(mean > 0, mean, 1.0), 0.0)

    cu, cmax = params.lee_cu, params.lee_cmax
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        weight = np.exp(-params.lee_k * (ci - cu) / (cmax - ci))
    mid = mean + weight * (vals - mean)
    out = np.where(ci <= cu, mean, np.where(ci >= cmax, vals, mid))
    return _quantize(out)


def anisotropic_diffusion_float(
    vals: np.ndarray, iterations: int, kappa: float, lam: float
) -> np.ndarray:
    """Perona-Malik diffusion on a float image; returns float64.

    Four-neighbor update I += lam * sum g(dI) * dI with g(s) = exp(-(s/k)^2)
    and reflective boundaries (zero flux across the frame edge, so the image
    mean is preserved).
    """
    cur = vals.astype(np.float64, copy=True)
    for _ in range(iterations):
        d_n = np.vstack([cur[:1], cur[:-1]]) - cur
        d_s = np.vstack([cur[1:], cur[-1:]]) - cur
        d_w = np.hstack([cur[:, :1], cur[:, :-1]]) - cur
        d_e = np.hstack([cur[:, 1:], cur[:, -1:]]) - cur
        flux = (
            np.exp(-((d_n / kappa) ** 2)) * d_n
            + np.exp(-((d_s / kappa) ** 2)) * d_s
            + np.exp(-((d_w / kappa) ** 2)) * d_w
            + np.exp(-((d_e / kappa) ** 2)) * d_e
        )
        cur = cur + lam * flux
    return cur


def anisotropic_diffusion(img: np.ndarray, params: FilterParams = FilterParams()) -> np.ndarray:
    img = validate_range_image(img)
    out = anisotropic_diffusion_float(
        img.astype(np.float64),
        params.diffusion_iterations,
        params.diffusion_kappa,
        params.diffusion_lambda,
    )
    return _quantize(out)


# Daubechies-4 orthonormal scaling filter (8 taps, sum = sqrt(2)); the
# wavelet filter is its quadrature mirror g[m] = (-1)^m h[L-1-m].
DB4_LO = np.array(
    [
        0.23037781330885523,
        0.7148465705525415,
        0.6308807679295904,
        -0.02798376941698385,
        -0.18703481171888114,
        0.030841381835986965,
        0.032883011666982945,
        -0.010597401784997278,
    ]
)
DB4_HI = np.array([(-1.0) ** m * DB4_LO[len(DB4_LO) - 1 - m] for m in range(len(DB4_LO))])


def _dwt1d(a: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-level periodized DWT along ``axis`` (length must be even)."""
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    taps = len(DB4_LO)
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n
    windows = a[..., idx]
    lo = windows @ DB4_LO
    hi = windows @ DB4_HI
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _idwt1d(lo: np.ndarray, hi: np.ndarray, axis: int) -> np.ndarray:
    """Inverse of :func:`_dwt1d` (exact reconstruction)."""
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    n2 = lo.shape[-1]
    half = len(DB4_LO) // 2
    idx = (np.arange(n2)[:, None] - np.arange(half)[None, :]) % n2
    lo_w = lo[..., idx]
    hi_w = hi[..., idx]
    out = np.empty(lo.shape[:-1] + (2 * n2,), dtype=lo.dtype)
    out[..., 0::2] = lo_w @ DB4_LO[0::2] + hi_w @ DB4_HI[0::2]
    out[..., 1::2] = lo_w @ DB4_LO[1::2] + hi_w @ DB4_HI[1::2]
    return np.moveaxis(out, -1, axis)


def wavelet_decompose(vals: np.ndarray, levels: int):
    """Multi-level 2D DWT. Returns (approx, details) with details finest
    first as (LH, HL, HH, (pad_rows, pad_cols)) tuples.

    Odd band sides are padded by one edge sample before each level;
    decomposition stops early once a band side drops below the filter length.
    """
    cur = vals
    details = []
    for _ in range(levels):
        if min(cur.shape) < len(DB4_LO):
            break
        pad0 = cur.shape[0] % 2
        pad1 = cur.shape[1] % 2
        if pad0 or pad1:
            cur = np.pad(cur, ((0, pad0), (0, pad1)), mode="symmetric")
        lo0, hi0 = _dwt1d(cur, 0)
        ll, lh = _dwt1d(lo0, 1)
        hl, hh = _dwt1d(hi0, 1)
        details.append((lh, hl, hh, (pad0, pad1)))
        cur = ll
    return cur, details


def wavelet_reconstruct(approx: np.ndarray, details) -> np.ndarray:
    cur = approx
    for lh, hl, hh, (pad0, pad1) in reversed(details):
        lo0 = _idwt1d(cur, lh, 1)
        hi0 = _idwt1d(hl, hh, 1)
        cur = _idwt1d(lo0, hi0, 0)
        if pad0:
            cur = cur[:-1, :]
        if pad1:
            cur = cur[:, :-1]
    return cur


def visushrink_threshold(sigma_hat: float, n_pixels: int) -> float:
    """Universal threshold T = sigma_hat * sqrt(2 ln N)."""
    return sigma_hat * math.sqrt(2.0 * math.log(n_pixels))


def soft_threshold(coeffs: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - threshold, 0.0)


def wavelet_denoise(img: np.ndarray, params: FilterParams = FilterParams()) -> np.ndarray:
    """VisuShrink: DWT, soft-threshold all detail bands at the universal
    threshold, inverse DWT.

    The noise scale is estimated from the finest diagonal band as
    median(|HH1|) / 0.6745; the approximation band is left untouched.
    """
    img = validate_range_image(img)
    vals = img.astype(np.float64)
    approx, details = wavelet_decompose(vals, params.wavelet_levels)
    if not details:
        return img.copy()
    sigma_hat = float(np.median(np.abs(details[0][2]))) / 0.6745
    threshold = visushrink_threshold(sigma_hat, img.size)
    shrunk = [
        (soft_threshold(lh, threshold), soft_threshold(hl, threshold),
         soft_threshold(hh, threshold), pads)
        for lh, hl, hh, pads in details
    ]
    return _quantize(wavelet_reconstruct(approx, shrunk))


def unsharp(vals: np.ndarray, amount: float, radius: float) -> np.ndarray:
    """Unsharp mask on a float image: out = in + amount*(in - blur(in))."""
    if amount == 0.0:
        return vals
    blurred = gaussian_filter(vals, sigma=radius, mode="reflect")
    return vals + amount * (vals - blurred)


def mask_apply_filter(
    raw: np.ndarray, mask: np.ndarray, params: FilterParams = FilterParams()
) -> np.ndarray:
    """Segment the raw image with a binary keep mask, then unsharp-sharpen.

    Pixels where the mask is 0 become 0; pixels where it is 255 keep the raw
    value. The unsharp pass contrasts the kept returns against residual noise
    at the mask border; with unsharp_amount = 0 the segmentation is returned
    as-is (and the operation is idempotent).
    """
    raw = validate_range_image(raw)
    mask = validate_mask(mask)
    if mask.shape != raw.shape:
        raise ValueError(f"mask shape {mask.shape} != image shape {raw.shape}")
    segmented = np.where(mask == 255, raw, 0).astype(np.float64)
    return _quantize(unsharp(segmented, params.unsharp_amount, params.unsharp_radius))


def histogram_equalize(img: np.ndarray) -> np.ndarray:
    """Contrast stretch by CDF remapping over the 256 levels.

    Zero pixels are no-return background in a range image, so they are held
    at zero and excluded from the CDF; the remap spreads the occupied nonzero
    levels over the full range, which is what pushes regions of interest
    toward high intensity ahead of thresholding. Monotonic by construction.
    """
    img = validate_range_image(img)
    counts = np.bincount(img.ravel(), minlength=256)
    total_nz = int(counts[1:].sum())
    if total_nz == 0:
        return img.copy()
    cdf = np.cumsum(counts[1:]) / total_nz
    lut = np.zeros(256, dtype=np.uint8)
    lut[1:] = np.round(255.0 * cdf).astype(np.uint8)
    return lut[img]


def apply_filter(
    name: str,
    img: np.ndarray,
    params: FilterParams = FilterParams(),
    mask: np.ndarray | None = None,
) -> np.ndarray:
    """Dispatch one of the CLI-facing filter names."""
    if name == "frost":
        return frost_filter(img, params)
    if name == "lee-enhanced":
        return enhanced_lee_filter(img, params)
    if name == "anisodiff":
        return anisotropic_diffusion(img, params)
    if name == "wavelet":
        return wavelet_denoise(img, params)
    if name == "mask":
        if mask is None:
            raise ValueError("the mask filter requires a mask image")
        return mask_apply_filter(img, mask, params)
    raise ValueError(f"unknown filter {name!r}; expected one of {FILTER_NAMES}")
