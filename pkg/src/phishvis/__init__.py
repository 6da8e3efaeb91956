"""Brand classification of phishing-page screenshots from compact visual descriptors."""

from .descriptors import DescriptorKind, descriptor_dim, extract
from .imaging import RasterImage, decode_image, load_image
from .pyramid import PyramidConfig, pyramid_dim, pyramid_extract

__version__ = "0.1.0"

__all__ = [
    "DescriptorKind",
    "PyramidConfig",
    "RasterImage",
    "decode_image",
    "descriptor_dim",
    "extract",
    "load_image",
    "pyramid_dim",
    "pyramid_extract",
]
