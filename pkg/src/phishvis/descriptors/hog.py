"""Histogram of oriented gradients, used as the layout baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..imaging import RasterImage, to_grayscale
from .kinds import DescriptorError

EPS = 1e-12


@dataclass(frozen=True)
class HogParams:
    block: int = 80
    stride: int = 40
    cell: int = 20
    bins: int = 9

    def __post_init__(self):
        if min(self.block, self.stride, self.cell) < 1:
            raise ValueError(f"HOG sizes must be positive: {self}")
        if self.block % self.cell:
            raise ValueError(f"block {self.block} is not a multiple of cell {self.cell}")
        if self.stride > self.block:
            raise ValueError(f"stride {self.stride} exceeds block {self.block}")
        if self.bins < 2:
            raise ValueError("need at least 2 orientation bins")

    @property
    def cells_per_side(self) -> int:
        return self.block // self.cell

    def token(self) -> str:
        return f"{self.block}-{self.stride}-{self.cell}-{self.bins}"

    @classmethod
    def parse(cls, token: str) -> "HogParams":
        """Parse ``block-stride-cell[-bins]``, e.g. ``80-40-20`` or ``80-40-20-9``."""
        parts = token.strip().split("-")
        if len(parts) not in (3, 4) or not all(p.isdigit() for p in parts):
            raise ValueError(f"bad HOG parameter token {token!r}; expected block-stride-cell[-bins]")
        return cls(*(int(p) for p in parts))


def block_grid(length: int, p: HogParams) -> int:
    return (length - p.block) // p.stride + 1


def hog_dim(p: HogParams, width: int, height: int) -> int:
    if width < p.block or height < p.block:
        raise DescriptorError(f"{width}x{height} image is smaller than one {p.block}px HOG block")
    return block_grid(width, p) * block_grid(height, p) * p.cells_per_side**2 * p.bins


def gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered [-1, 0, 1] differences with replicated borders."""
    g = np.pad(gray.astype(np.float64), 1, mode="edge")
    gx = g[1:-1, 2:] - g[1:-1, :-2]
    gy = g[2:, 1:-1] - g[:-2, 1:-1]
    return gx, gy


def orientation_votes(gx: np.ndarray, gy: np.ndarray, bins: int) -> np.ndarray:
    """Magnitude-weighted unsigned-orientation votes, shape ``(bins, H, W)``.

    Each pixel splits its vote linearly between the two nearest bin centers,
    wrapping around at 180 degrees.
    """
    mag = np.hypot(gx, gy)
    ang = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    ang[ang >= 180.0] = 0.0
    pos = ang * (bins / 180.0) - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    lo = lo.astype(np.intp) % bins
    hi = (lo + 1) % bins
    votes = np.zeros((bins,) + mag.shape)
    for b in range(bins):
        votes[b] += np.where(lo == b, mag * (1.0 - frac), 0.0)
        votes[b] += np.where(hi == b, mag * frac, 0.0)
    return votes


def hog(img: RasterImage, p: HogParams = HogParams()) -> np.ndarray:
    h, w = img.height, img.width
    hog_dim(p, w, h)  # size check
    gx, gy = gradients(to_grayscale(img))
    votes = orientation_votes(gx, gy, p.bins)

    integral = np.zeros((p.bins, h + 1, w + 1))
    integral[:, 1:, 1:] = votes.cumsum(axis=1).cumsum(axis=2)

    nbx, nby = block_grid(w, p), block_grid(h, p)
    k = p.cells_per_side
    offs = np.arange(k) * p.cell
    # cell top-left corners, indexed (block_y, block_x, cell_y, cell_x)
    y0 = (np.arange(nby) * p.stride)[:, None, None, None] + offs[None, None, :, None]
    x0 = (np.arange(nbx) * p.stride)[None, :, None, None] + offs[None, None, None, :]
    y0, x0 = np.broadcast_arrays(y0, x0)
    y1, x1 = y0 + p.cell, x0 + p.cell

    cells = (
        integral[:, y1, x1] - integral[:, y0, x1] - integral[:, y1, x0] + integral[:, y0, x0]
    )  # (bins, nby, nbx, k, k)
    blocks = np.moveaxis(cells, 0, -1).reshape(nby * nbx, k * k * p.bins)
    norms = np.sqrt((blocks**2).sum(axis=1) + EPS**2)
    return (blocks / norms[:, None]).ravel()
