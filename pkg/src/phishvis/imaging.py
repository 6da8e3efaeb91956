"""Screenshot decoding, color-space conversion, resizing and cropping.

Images are held as ``RasterImage`` objects wrapping a read-only ``(H, W, 3)``
uint8 array. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

SUPPORTED_FORMATS = ("PNG", "JPEG")

# Full-range BT.601, scaled by 1e6 so gray inputs cancel exactly in the chroma rows.
_YCBCR_MATRIX = np.array(
    [
        [299_000, 587_000, 114_000],
        [-168_736, -331_264, 500_000],
        [500_000, -418_688, -81_312],
    ],
    dtype=np.float64,
)
_YCBCR_OFFSET = np.array([0.0, 128.0, 128.0])


class DecodeError(ValueError):
    """Raised when an image stream cannot be decoded."""


class RegionError(ValueError):
    """Raised for crop regions that are empty or fall outside the image."""


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB pixel grid, row-major, immutable."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image must be at least 1x1, got {px.shape[1]}x{px.shape[0]}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("channel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        else:
            px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"RasterImage(width={self.width}, height={self.height})"

    @classmethod
    def solid(cls, width: int, height: int, rgb) -> "RasterImage":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[...] = np.asarray(rgb, dtype=np.uint8)
        return cls(px)


@dataclass(frozen=True)
class Region:
    """Axis-aligned pixel rectangle: top-left ``(x0, y0)``, extent ``(w, h)``."""

    x0: int
    y0: int
    w: int
    h: int

    def fits(self, width: int, height: int) -> bool:
        return (
            self.w >= 1
            and self.h >= 1
            and self.x0 >= 0
            and self.y0 >= 0
            and self.x0 + self.w <= width
            and self.y0 + self.h <= height
        )


def decode_image(data: bytes) -> RasterImage:
    """Decode a PNG or JPEG byte stream into an RGB raster.

    Transparent pixels are composited over white, the background browsers
    render pages against.
    """
    try:
        with Image.open(io.BytesIO(data)) as im:
            fmt = im.format
            if fmt not in SUPPORTED_FORMATS:
                raise DecodeError(f"unsupported image format {fmt!r}; expected PNG or JPEG")
            im.load()
            rgb = _to_rgb(im)
    except DecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError, EOFError) as exc:
        raise DecodeError(f"cannot decode image ({len(data)} bytes): {exc}") from exc
    if rgb.shape[0] == 0 or rgb.shape[1] == 0:
        raise DecodeError("image has a zero dimension")
    return RasterImage(rgb)


def _to_rgb(im: Image.Image) -> np.ndarray:
    has_alpha = im.mode in ("RGBA", "LA", "PA") or (
        im.mode == "P" and "transparency" in im.info
    )
    if not has_alpha:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)
    rgba = np.asarray(im.convert("RGBA"), dtype=np.float64)
    alpha = rgba[..., 3:4] / 255.0
    out = rgba[..., :3] * alpha + 255.0 * (1.0 - alpha)
    return round_half_up(out)


def load_image(path) -> RasterImage:
    """Read and decode an image file."""
    try:
        return decode_image(Path(path).read_bytes())
    except DecodeError as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def encode_png(img: RasterImage) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img.pixels), "RGB").save(buf, format="PNG")
    return buf.getvalue()


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Round to the nearest integer, ties upward, and clamp into uint8."""
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Hexcone RGB->HSV on an ``(..., 3)`` array of 0-255 values (floats allowed).

    Returns H in degrees ``[0, 360)`` and S, V in ``[0, 1]``. Achromatic
    pixels get H = 0.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = np.max(rgb, axis=-1)
    cmin = np.min(rgb, axis=-1)
    delta = cmax - cmin

    v = cmax / 255.0
    s = np.divide(delta, cmax, out=np.zeros_like(cmax), where=cmax > 0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.zeros_like(cmax)
    is_r = (cmax == r) & (delta > 0)
    is_g = (cmax == g) & (delta > 0) & ~is_r
    is_b = (delta > 0) & ~is_r & ~is_g
    h = np.where(is_r, 60.0 * np.mod((g - b) / safe, 6.0), h)
    h = np.where(is_g, 60.0 * ((b - r) / safe + 2.0), h)
    h = np.where(is_b, 60.0 * ((r - g) / safe + 4.0), h)
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, s, v], axis=-1)


def rgb_to_ycbcr(rgb: np.ndarray) -> np.ndarray:
    """Full-range BT.601 conversion of an ``(..., 3)`` array, clamped to [0, 255]."""
    rgb = np.asarray(rgb, dtype=np.float64)
    out = rgb @ _YCBCR_MATRIX.T / 1e6 + _YCBCR_OFFSET
    return np.clip(out, 0.0, 255.0)


def to_hsv(img: RasterImage) -> np.ndarray:
    return rgb_to_hsv(img.pixels)


def to_ycbcr(img: RasterImage) -> np.ndarray:
    return rgb_to_ycbcr(img.pixels)


def luma(rgb: np.ndarray) -> np.ndarray:
    """Unrounded BT.601 luma of an ``(..., 3)`` array."""
    rgb = np.asarray(rgb, dtype=np.float64)
    return (299_000 * rgb[..., 0] + 587_000 * rgb[..., 1] + 114_000 * rgb[..., 2]) / 1e6


def to_grayscale(img: RasterImage) -> np.ndarray:
    """Per-pixel luma rounded half-up, as an ``(H, W)`` uint8 array."""
    return round_half_up(luma(img.pixels))


def resize(img: RasterImage, w: int, h: int) -> RasterImage:
    """Bilinear resize sampling at half-pixel centers (edges clamped)."""
    if w < 1 or h < 1:
        raise ValueError(f"target size must be positive, got {w}x{h}")
    if (w, h) == (img.width, img.height):
        return img
    src = img.pixels.astype(np.float64)
    x0, x1, fx = _sample_positions(img.width, w)
    y0, y1, fy = _sample_positions(img.height, h)

    top = src[y0][:, x0] * (1 - fx)[None, :, None] + src[y0][:, x1] * fx[None, :, None]
    bot = src[y1][:, x0] * (1 - fx)[None, :, None] + src[y1][:, x1] * fx[None, :, None]
    out = top * (1 - fy)[:, None, None] + bot * fy[:, None, None]
    return RasterImage(round_half_up(out))


def _sample_positions(n_src: int, n_dst: int):
    pos = (np.arange(n_dst) + 0.5) * (n_src / n_dst) - 0.5
    pos = np.clip(pos, 0.0, n_src - 1)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, n_src - 1)
    return lo, hi, pos - lo


def crop(img: RasterImage, r: Region) -> RasterImage:
    if not r.fits(img.width, img.height):
        raise RegionError(f"region {r} does not fit in a {img.width}x{img.height} image")
    return RasterImage(img.pixels[r.y0 : r.y0 + r.h, r.x0 : r.x0 + r.w])


def grid_edges(length: int, n: int) -> np.ndarray:
    """Boundaries ``floor(i * length / n)`` for ``i = 0..n``."""
    return (np.arange(n + 1, dtype=np.int64) * length) // n
