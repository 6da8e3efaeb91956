"""Compact color/texture descriptors and the HOG baseline."""

from __future__ import annotations

import numpy as np

from ..imaging import RasterImage
from .cld import cld
from .composite import cedd, cedd_fcth, fcth, jcd
from .hog import HogParams, hog, hog_dim
from .kinds import (
    COMPACT_KINDS,
    MIN_SIZE,
    DescriptorError,
    DescriptorKind,
    check_min_size,
    descriptor_dim,
)
from .scd import scd

__all__ = [
    "COMPACT_KINDS",
    "MIN_SIZE",
    "DescriptorError",
    "DescriptorKind",
    "HogParams",
    "cedd",
    "check_min_size",
    "cld",
    "descriptor_dim",
    "extract",
    "fcth",
    "hog",
    "hog_dim",
    "jcd",
    "scd",
]


def _jcd_of(img: RasterImage) -> np.ndarray:
    return jcd(*cedd_fcth(img))


_EXTRACTORS = {
    DescriptorKind.SCD: scd,
    DescriptorKind.CLD: cld,
    DescriptorKind.CEDD: cedd,
    DescriptorKind.FCTH: fcth,
    DescriptorKind.JCD: _jcd_of,
}


def extract(img: RasterImage, kind) -> np.ndarray:
    """Holistic descriptor of ``img`` for one of the compact kinds."""
    kind = DescriptorKind(kind)
    if kind is DescriptorKind.HOG:
        raise ValueError("HOG needs explicit HogParams; call hog() instead")
    return _EXTRACTORS[kind](img)
