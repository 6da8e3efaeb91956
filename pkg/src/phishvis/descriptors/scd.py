"""Scalable color: 16x4x4 HSV histogram pushed through a Haar cascade."""

from __future__ import annotations

import numpy as np

from ..imaging import RasterImage

H_BINS, S_BINS, V_BINS = 16, 4, 4


def _sv_tables():
    cmax = np.arange(256)
    v = np.minimum(V_BINS * cmax // 255, V_BINS - 1)
    delta = np.arange(256)[:, None]
    s = np.where(cmax > 0, S_BINS * delta // np.maximum(cmax, 1), 0)
    return np.minimum(s, S_BINS - 1).astype(np.int32), v.astype(np.int32)


_S_TABLE, _V_TABLE = _sv_tables()  # _S_TABLE[delta, cmax], _V_TABLE[cmax]


def hsv_bins(rgb: np.ndarray) -> np.ndarray:
    """Quantized HSV bin ``h*16 + s*4 + v`` of each pixel in an ``(N, 3)`` uint8 array.

    Exact forms of ``floor(H / 22.5)``, ``floor(4 S)`` and ``floor(4 V)`` for
    hexcone HSV: the hue bin is ``floor(n / 3d)`` for a small integer ``n``,
    and a float quotient of small integers floors exactly.
    """
    r = rgb[:, 0].astype(np.int32)
    g = rgb[:, 1].astype(np.int32)
    b = rgb[:, 2].astype(np.int32)
    cmax = np.maximum(np.maximum(r, g), b)
    delta = cmax - np.minimum(np.minimum(r, g), b)
    d = np.maximum(delta, 1)

    # hue sextant h6 in [0, 6); bin = floor(h6 * 8 / 3)
    num = np.where(
        cmax == r,
        8 * (g - b),
        np.where(cmax == g, 16 * d + 8 * (b - r), 32 * d + 8 * (r - g)),
    )
    h = np.floor(num / (3.0 * d)).astype(np.int32) % H_BINS
    h[delta == 0] = 0
    return (h * S_BINS + _S_TABLE[delta, cmax]) * V_BINS + _V_TABLE[cmax]


def scd_histogram(img: RasterImage) -> np.ndarray:
    """Normalized 256-bin HSV histogram (16 hue x 4 saturation x 4 value)."""
    idx = hsv_bins(img.pixels.reshape(-1, 3))
    counts = np.bincount(idx, minlength=H_BINS * S_BINS * V_BINS)
    return counts / idx.size


def haar_forward(x) -> np.ndarray:
    """Unnormalized 1-D Haar cascade (pairwise sums recurse, differences kept).

    Output order is coarsest first: total sum, then the difference bands from
    the coarsest level down to the finest.
    """
    cur = np.asarray(x, dtype=np.float64)
    n = cur.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    bands = []
    while cur.size > 1:
        even, odd = cur[0::2], cur[1::2]
        bands.append(even - odd)
        cur = even + odd
    return np.concatenate([cur] + bands[::-1])


def haar_inverse(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.float64)
    cur = c[:1]
    pos = 1
    while pos < c.size:
        diff = c[pos : pos + cur.size]
        pos += cur.size
        out = np.empty(cur.size * 2)
        out[0::2] = (cur + diff) / 2.0
        out[1::2] = (cur - diff) / 2.0
        cur = out
    return cur


def scd(img: RasterImage) -> np.ndarray:
    return haar_forward(scd_histogram(img))
