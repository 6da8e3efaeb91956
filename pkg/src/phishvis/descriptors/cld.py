"""Color layout: 8x8 grid of mean colors, DCT per YCbCr channel, zigzag prefix."""

from __future__ import annotations

import numpy as np

from ..imaging import RasterImage, grid_edges, rgb_to_ycbcr
from .kinds import DescriptorKind, check_min_size

GRID = 8
N_Y, N_CB, N_CR = 6, 3, 3


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * x + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    return m


def _zigzag(n: int) -> list[tuple[int, int]]:
    # (row, col) = (vertical freq, horizontal freq), JPEG ordering
    order = []
    for s in range(2 * n - 1):
        diag = [(i, s - i) for i in range(n) if 0 <= s - i < n]
        order.extend(diag if s % 2 else diag[::-1])
    return order


DCT8 = _dct_matrix(GRID)
ZIGZAG = _zigzag(GRID)


def dct2(block: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II of a square block.

    The transform runs on ``block - block[0, 0]`` and the DC term is added back
    analytically, so constant blocks yield AC coefficients that are exactly 0.
    """
    n = block.shape[0]
    ref = block[0, 0]
    m = DCT8 if n == GRID else _dct_matrix(n)
    coeffs = m @ (block - ref) @ m.T
    coeffs[0, 0] += n * ref
    return coeffs


def cell_means(img: RasterImage, grid: int = GRID) -> np.ndarray:
    """Channel-wise mean color of each cell of a ``grid x grid`` partition."""
    xs = grid_edges(img.width, grid)
    ys = grid_edges(img.height, grid)
    sums = np.add.reduceat(img.pixels, ys[:-1], axis=0, dtype=np.int64)
    sums = np.add.reduceat(sums, xs[:-1], axis=1, dtype=np.int64)
    area = np.outer(np.diff(ys), np.diff(xs)).astype(np.float64)
    return sums / area[..., None]


def cld(img: RasterImage) -> np.ndarray:
    check_min_size(DescriptorKind.CLD, img.width, img.height)
    ycc = rgb_to_ycbcr(cell_means(img))
    out = []
    for channel, keep in enumerate((N_Y, N_CB, N_CR)):
        coeffs = dct2(ycc[..., channel])
        out.extend(coeffs[r, c] for r, c in ZIGZAG[:keep])
    return np.array(out, dtype=np.float64)
