"""Compact composite descriptors: CEDD, FCTH and their joint form JCD.

CEDD and FCTH scan the image as a fixed 40x40 grid of blocks (floor
boundaries, so block sizes may differ by one pixel). Each block is halved into
2x2 sub-blocks whose mean lumas drive the texture classification, while the
block's mean color is pushed through the 24-color fuzzy palette. The palette
weights are accumulated into every texture area the block activates and the
final histogram is normalized to unit sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..imaging import RasterImage, grid_edges, luma, rgb_to_hsv
from .fuzzy_color import fuzzy_palette, trapezoid_memberships
from .kinds import DescriptorKind, check_min_size

BLOCKS = 40
N_COLORS = 24

CEDD_AREAS = ("no-edge", "non-directional", "horizontal", "vertical", "diagonal-45", "diagonal-135")

# 2x2 edge filters over sub-block lumas ordered (top-left, top-right, bottom-left, bottom-right)
_R2 = np.sqrt(2.0)
EDGE_FILTERS = np.array([
    [2.0, -2.0, -2.0, 2.0],   # non-directional
    [1.0, 1.0, -1.0, -1.0],   # horizontal
    [1.0, -1.0, 1.0, -1.0],   # vertical
    [_R2, 0.0, 0.0, -_R2],    # 45 degrees
    [0.0, _R2, -_R2, 0.0],    # 135 degrees
])
EDGE_MIN_RESPONSE = 14.0
# per-filter activation thresholds on the max-normalized responses
EDGE_THRESHOLDS = np.array([0.68, 0.98, 0.98, 0.98, 0.98])

# FCTH: three Haar detail magnitudes (horizontal, vertical, diagonal), each
# split into low/high fuzzy sets; area index = 4*horizontal + 2*vertical + diagonal.
FCTH_AREAS = 8
HAAR_DETAIL_SETS = (
    np.array([[0, 0, 20, 90], [20, 90, 255, 255]], dtype=np.float64),
    np.array([[0, 0, 20, 90], [20, 90, 255, 255]], dtype=np.float64),
    np.array([[0, 0, 20, 80], [20, 80, 255, 255]], dtype=np.float64),
)

# Joint areas: (name, CEDD areas, FCTH areas). Each joint row is
# 0.5 * (sum of its CEDD rows) + 0.5 * (sum of its FCTH rows). Every parent
# area appears exactly once, so unit-sum parents give a unit-sum JCD.
JCD_AREAS = (
    ("no-edge", (0,), (0,)),
    ("non-directional", (1,), (7,)),
    ("horizontal", (2,), (4,)),
    ("vertical", (3,), (2,)),
    ("diagonal-45", (4,), (1, 5)),
    ("diagonal-135", (5,), (3,)),
    ("horizontal-vertical", (), (6,)),
)


@dataclass
class BlockStats:
    sub_luma: np.ndarray  # (BLOCKS*BLOCKS, 4) sub-block mean lumas, TL TR BL BR
    mean_rgb: np.ndarray  # (BLOCKS*BLOCKS, 3)


def _sub_edges(length: int) -> np.ndarray:
    edges = grid_edges(length, BLOCKS)
    mids = edges[:-1] + (edges[1:] - edges[:-1]) // 2
    out = np.empty(2 * BLOCKS + 1, dtype=np.int64)
    out[0:-1:2] = edges[:-1]
    out[1::2] = mids
    out[-1] = length
    return out


def block_stats(img: RasterImage) -> BlockStats:
    xs = _sub_edges(img.width)
    ys = _sub_edges(img.height)
    sums = np.add.reduceat(img.pixels, ys[:-1], axis=0, dtype=np.int64)
    sums = np.add.reduceat(sums, xs[:-1], axis=1, dtype=np.int64)
    area = np.outer(np.diff(ys), np.diff(xs)).astype(np.float64)

    sub_mean = sums / area[..., None]
    sub = luma(sub_mean).reshape(BLOCKS, 2, BLOCKS, 2).transpose(0, 2, 1, 3)
    sub_luma = sub.reshape(BLOCKS * BLOCKS, 4)

    block_sum = sums.reshape(BLOCKS, 2, BLOCKS, 2, 3).sum(axis=(1, 3))
    block_area = area.reshape(BLOCKS, 2, BLOCKS, 2).sum(axis=(1, 3))
    mean_rgb = (block_sum / block_area[..., None]).reshape(-1, 3)
    return BlockStats(sub_luma=sub_luma, mean_rgb=mean_rgb)


def _palette_weights(stats: BlockStats) -> np.ndarray:
    return fuzzy_palette(rgb_to_hsv(stats.mean_rgb))


def cedd_texture(sub_luma: np.ndarray) -> np.ndarray:
    """Binary activation of the six CEDD texture areas per block, shape (N, 6)."""
    resp = np.abs(sub_luma @ EDGE_FILTERS.T)
    peak = resp.max(axis=1)
    flat = peak < EDGE_MIN_RESPONSE
    norm = resp / np.where(flat, 1.0, peak)[:, None]
    act = np.zeros((sub_luma.shape[0], len(CEDD_AREAS)))
    act[:, 1:] = (norm > EDGE_THRESHOLDS) & ~flat[:, None]
    act[flat, 0] = 1.0
    return act


def haar_details(sub_luma: np.ndarray) -> np.ndarray:
    """|horizontal|, |vertical|, |diagonal| one-level Haar details per block."""
    tl, tr, bl, br = sub_luma.T
    horiz = (tl + tr - bl - br) / 2.0
    vert = (tl - tr + bl - br) / 2.0
    diag = (tl - tr - bl + br) / 2.0
    return np.abs(np.stack([horiz, vert, diag], axis=1))


def fcth_texture(sub_luma: np.ndarray) -> np.ndarray:
    """Fuzzy weights of the eight FCTH texture areas per block, shape (N, 8)."""
    details = haar_details(sub_luma)
    mh, mv, md = (
        trapezoid_memberships(details[:, i], HAAR_DETAIL_SETS[i]) for i in range(3)
    )
    out = np.empty((sub_luma.shape[0], FCTH_AREAS))
    for area in range(FCTH_AREAS):
        h, v, d = (area >> 2) & 1, (area >> 1) & 1, area & 1
        out[:, area] = np.minimum(np.minimum(mh[:, h], mv[:, v]), md[:, d])
    return out


def _accumulate(texture: np.ndarray, colors: np.ndarray) -> np.ndarray:
    hist = (texture.T @ colors).ravel()
    total = hist.sum()
    return hist / total if total > 0 else hist


def cedd(img: RasterImage) -> np.ndarray:
    check_min_size(DescriptorKind.CEDD, img.width, img.height)
    stats = block_stats(img)
    return _accumulate(cedd_texture(stats.sub_luma), _palette_weights(stats))


def fcth(img: RasterImage) -> np.ndarray:
    check_min_size(DescriptorKind.FCTH, img.width, img.height)
    stats = block_stats(img)
    return _accumulate(fcth_texture(stats.sub_luma), _palette_weights(stats))


def cedd_fcth(img: RasterImage) -> tuple[np.ndarray, np.ndarray]:
    """Both descriptors from a single block scan."""
    check_min_size(DescriptorKind.CEDD, img.width, img.height)
    stats = block_stats(img)
    colors = _palette_weights(stats)
    return (
        _accumulate(cedd_texture(stats.sub_luma), colors),
        _accumulate(fcth_texture(stats.sub_luma), colors),
    )


def jcd(cedd_vec, fcth_vec) -> np.ndarray:
    c = np.asarray(cedd_vec, dtype=np.float64)
    f = np.asarray(fcth_vec, dtype=np.float64)
    if c.shape != (len(CEDD_AREAS) * N_COLORS,) or f.shape != (FCTH_AREAS * N_COLORS,):
        raise ValueError(
            f"JCD expects CEDD(144) and FCTH(192) vectors, got {c.shape} and {f.shape}"
        )
    c = c.reshape(len(CEDD_AREAS), N_COLORS)
    f = f.reshape(FCTH_AREAS, N_COLORS)
    out = np.zeros((len(JCD_AREAS), N_COLORS))
    for row, (_, from_cedd, from_fcth) in enumerate(JCD_AREAS):
        for a in from_cedd:
            out[row] += 0.5 * c[a]
        for a in from_fcth:
            out[row] += 0.5 * f[a]
    return out.ravel()
