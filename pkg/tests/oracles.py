"""Independent naive scalar reference implementations of the classical
filters, used to cross-check the production code. Everything here works on
Python floats with explicit loops; no numpy vector arithmetic.
"""

import math
import statistics

import numpy as np


def _reflect(i: int, n: int) -> int:
    """Symmetric (half-sample) boundary index, single reflection."""
    if i < 0:
        return -1 - i
    if i >= n:
        return 2 * n - 1 - i
    return i


def frost_oracle(img: np.ndarray, radius: int, damping: float) -> np.ndarray:
    pix = [[float(v) for v in row] for row in img]
    h, w = len(pix), len(pix[0])
    n = float((2 * radius + 1) ** 2)
    out = [[0.0] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            vals = []
            dists = []
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    vals.append(pix[_reflect(i + dy, h)][_reflect(j + dx, w)])
                    dists.append(float(max(abs(dy), abs(dx))))
            s1 = 0.0
            s2 = 0.0
            for v in vals:
                s1 += v
                s2 += v * v
            mean = s1 / n
            if mean == 0.0:
                out[i][j] = pix[i][j]
                continue
            var = s2 / n - mean * mean
            ci2 = max(var, 0.0) / (mean * mean)
            num = 0.0
            den = 0.0
            for v, d in zip(vals, dists):
                weight = math.exp(-damping * ci2 * d)
                num += weight * v
                den += weight
            out[i][j] = num / den
    return _quantize(out)


def enhanced_lee_oracle(
    img: np.ndarray, radius: int, cu: float, cmax: float, k: float
) -> np.ndarray:
    pix = [[float(v) for v in row] for row in img]
    h, w = len(pix), len(pix[0])
    n = float((2 * radius + 1) ** 2)
    out = [[0.0] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            s1 = 0.0
            s2 = 0.0
            # Offsets in the same row-major order as the production code so
            # the summation sequence (and hence rounding) is identical.
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    v = pix[_reflect(i + dy, h)][_reflect(j + dx, w)]
                    s1 = s1 + v
                    s2 = s2 + v * v
            mean = s1 / n
            var = max(s2 / n - mean * mean, 0.0)
            std = math.sqrt(var)
            ci = std / mean if mean > 0 else 0.0
            center = pix[i][j]
            if ci <= cu:
                out[i][j] = mean
            elif ci >= cmax:
                out[i][j] = center
            else:
                weight = math.exp(-k * (ci - cu) / (cmax - ci))
                out[i][j] = mean + weight * (center - mean)
    return _quantize(out)


def anisodiff_oracle(
    img: np.ndarray, iterations: int, kappa: float, lam: float
) -> np.ndarray:
    cur = [[float(v) for v in row] for row in img]
    h, w = len(cur), len(cur[0])
    for _ in range(iterations):
        nxt = [[0.0] * w for _ in range(h)]
        for i in range(h):
            for j in range(w):
                c = cur[i][j]
                d_n = cur[i - 1][j] - c if i > 0 else 0.0
                d_s = cur[i + 1][j] - c if i < h - 1 else 0.0
                d_w = cur[i][j - 1] - c if j > 0 else 0.0
                d_e = cur[i][j + 1] - c if j < w - 1 else 0.0
                flux = (
                    math.exp(-((d_n / kappa) ** 2)) * d_n
                    + math.exp(-((d_s / kappa) ** 2)) * d_s
                    + math.exp(-((d_w / kappa) ** 2)) * d_w
                    + math.exp(-((d_e / kappa) ** 2)) * d_e
                )
                nxt[i][j] = c + lam * flux
        cur = nxt
    return _quantize(cur)


# The same published Daubechies-4 taps as the production code; the transform
# below is an independent scalar re-implementation of the periodized scheme.
_H = [
    0.23037781330885523,
    0.7148465705525415,
    0.6308807679295904,
    -0.02798376941698385,
    -0.18703481171888114,
    0.030841381835986965,
    0.032883011666982945,
    -0.010597401784997278,
]
_G = [(-1.0) ** m * _H[len(_H) - 1 - m] for m in range(len(_H))]


def _dwt_rows(mat):
    """Transform each row; returns (lo, hi) halves."""
    taps = len(_H)
    lo_rows, hi_rows = [], []
    for row in mat:
        n = len(row)
        lo, hi = [], []
        for k in range(n // 2):
            a = 0.0
            d = 0.0
            for m in range(taps):
                v = row[(2 * k + m) % n]
                a += _H[m] * v
                d += _G[m] * v
            lo.append(a)
            hi.append(d)
        lo_rows.append(lo)
        hi_rows.append(hi)
    return lo_rows, hi_rows


def _idwt_rows(lo_rows, hi_rows):
    taps = len(_H)
    out_rows = []
    for lo, hi in zip(lo_rows, hi_rows):
        n2 = len(lo)
        out = [0.0] * (2 * n2)
        for p in range(n2):
            even = 0.0
            odd = 0.0
            for j in range(taps // 2):
                a = lo[(p - j) % n2]
                d = hi[(p - j) % n2]
                even += _H[2 * j] * a + _G[2 * j] * d
                odd += _H[2 * j + 1] * a + _G[2 * j + 1] * d
            out[2 * p] = even
            out[2 * p + 1] = odd
        out_rows.append(out)
    return out_rows


def _transpose(mat):
    return [list(col) for col in zip(*mat)]


def _pad_even(mat):
    """Pad odd dimensions by repeating the edge row/column."""
    pad0 = len(mat) % 2
    pad1 = len(mat[0]) % 2
    if pad1:
        mat = [row + [row[-1]] for row in mat]
    if pad0:
        mat = mat + [list(mat[-1])]
    return mat, pad0, pad1


def wavelet_visushrink_oracle(img: np.ndarray, levels: int) -> np.ndarray:
    cur = [[float(v) for v in row] for row in img]
    n_pixels = img.shape[0] * img.shape[1]
    stack = []
    for _ in range(levels):
        if min(len(cur), len(cur[0])) < len(_H):
            break
        cur, pad0, pad1 = _pad_even(cur)
        lo0, hi0 = _transpose(cur), None
        # axis 0 first: transform columns (rows of the transpose)
        lo_c, hi_c = _dwt_rows(_transpose(cur))
        lo0 = _transpose(lo_c)
        hi0 = _transpose(hi_c)
        ll, lh = _dwt_rows(lo0)
        hl, hh = _dwt_rows(hi0)
        stack.append((lh, hl, hh, pad0, pad1))
        cur = ll
    if not stack:
        return np.asarray(img).copy()

    hh1 = stack[0][2]
    abs_hh = sorted(abs(v) for row in hh1 for v in row)
    sigma = statistics.median(abs_hh) / 0.6745
    thr = sigma * math.sqrt(2.0 * math.log(n_pixels))

    def soft(mat):
        return [
            [math.copysign(max(abs(v) - thr, 0.0), v) if abs(v) > thr else 0.0 for v in row]
            for row in mat
        ]

    for lh, hl, hh, pad0, pad1 in reversed(stack):
        lo0 = _idwt_rows(cur, soft(lh))
        hi0 = _idwt_rows(soft(hl), soft(hh))
        merged_cols = _idwt_rows(_transpose(lo0), _transpose(hi0))
        cur = _transpose(merged_cols)
        if pad0:
            cur = cur[:-1]
        if pad1:
            cur = [row[:-1] for row in cur]
    return _quantize(cur)


def _quantize(rows) -> np.ndarray:
    out = np.array(rows, dtype=np.float64)
    return np.clip(np.round(out), 0, 255).astype(np.uint8)
