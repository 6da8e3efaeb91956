"""Holistic and multi-level patch pyramid feature extraction.

A pyramid level of order ``n`` cuts the screenshot into an ``n x n`` grid and
computes the base descriptor on every cell. Levels are visited in ascending
order, cells row-major, and the per-cell vectors are concatenated as they
are: there is no codebook, pooling or quantization step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descriptors import DescriptorError, DescriptorKind, MIN_SIZE, descriptor_dim, extract
from .imaging import RasterImage, Region, crop, grid_edges

MAX_LEVEL = 4


@dataclass(frozen=True)
class PyramidConfig:
    levels: tuple[int, ...] = (1,)

    def __post_init__(self):
        levels = tuple(int(n) for n in self.levels)
        if not levels:
            raise ValueError("pyramid needs at least one level")
        if any(n < 1 or n > MAX_LEVEL for n in levels):
            raise ValueError(f"grid orders must lie in 1..{MAX_LEVEL}, got {levels}")
        if any(a >= b for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly ascending, got {levels}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def parse(cls, token: str) -> "PyramidConfig":
        """Parse patch-count notation such as ``"1+4+9"`` or ``"16"``."""
        levels = []
        for part in token.strip().split("+"):
            if not part.strip().isdigit():
                raise ValueError(f"bad pyramid token {token!r}")
            count = int(part)
            n = int(round(count**0.5))
            if n * n != count:
                raise ValueError(f"{count} is not a square patch count in {token!r}")
            levels.append(n)
        return cls(tuple(levels))

    @property
    def n_patches(self) -> int:
        return sum(n * n for n in self.levels)

    def __str__(self):
        return "+".join(str(n * n) for n in self.levels)


HOLISTIC = PyramidConfig((1,))


def grid_cells(w: int, h: int, n: int) -> list[Region]:
    """Row-major ``n x n`` partition with boundaries at ``floor(i * size / n)``."""
    if n < 1:
        raise ValueError(f"grid order must be positive, got {n}")
    if w < n or h < n:
        raise ValueError(f"cannot split a {w}x{h} image into a {n}x{n} grid")
    xs = grid_edges(w, n)
    ys = grid_edges(h, n)
    return [
        Region(int(xs[i]), int(ys[j]), int(xs[i + 1] - xs[i]), int(ys[j + 1] - ys[j]))
        for j in range(n)
        for i in range(n)
    ]


def pyramid_dim(kind, cfg: PyramidConfig) -> int:
    return descriptor_dim(kind) * cfg.n_patches


def check_pyramid_size(kind, cfg: PyramidConfig, width: int, height: int) -> None:
    """Raise if any cell of any level is below the descriptor's minimum size."""
    kind = DescriptorKind(kind)
    need = MIN_SIZE[kind]
    for n in cfg.levels:
        if width < n or height < n:
            raise DescriptorError(f"level {n}x{n}: {width}x{height} image cannot be split")
        for idx, cell in enumerate(grid_cells(width, height, n)):
            if cell.w < need or cell.h < need:
                raise DescriptorError(
                    f"level {n}x{n}, cell {idx}: {cell.w}x{cell.h} patch is below the "
                    f"{need}x{need} minimum for {kind.value}"
                )


def pyramid_extract(img: RasterImage, kind, cfg: PyramidConfig = HOLISTIC) -> np.ndarray:
    kind = DescriptorKind(kind)
    check_pyramid_size(kind, cfg, img.width, img.height)
    parts = []
    for n in cfg.levels:
        for cell in grid_cells(img.width, img.height, n):
            patch = img if n == 1 else crop(img, cell)
            parts.append(extract(patch, kind))
    return np.concatenate(parts)
