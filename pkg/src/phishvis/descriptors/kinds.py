from __future__ import annotations

import enum


class DescriptorError(ValueError):
    """Raised when an image (or patch) is too small for a descriptor."""


class DescriptorKind(str, enum.Enum):
    SCD = "SCD"
    CLD = "CLD"
    CEDD = "CEDD"
    FCTH = "FCTH"
    JCD = "JCD"
    HOG = "HOG"

    @classmethod
    def parse(cls, token: str) -> "DescriptorKind":
        try:
            return cls(token.strip().upper())
        except ValueError:
            names = ", ".join(k.value.lower() for k in cls)
            raise ValueError(f"unknown descriptor {token!r} (choose from {names})") from None

    def __str__(self):
        return self.value


COMPACT_KINDS = (
    DescriptorKind.SCD,
    DescriptorKind.CLD,
    DescriptorKind.CEDD,
    DescriptorKind.FCTH,
    DescriptorKind.JCD,
)

_BASE_DIMS = {
    DescriptorKind.SCD: 256,
    DescriptorKind.CLD: 12,
    DescriptorKind.CEDD: 144,
    DescriptorKind.FCTH: 192,
    DescriptorKind.JCD: 168,
}

# smallest (width, height) each descriptor accepts
MIN_SIZE = {
    DescriptorKind.SCD: 1,
    DescriptorKind.CLD: 8,
    DescriptorKind.CEDD: 80,
    DescriptorKind.FCTH: 80,
    DescriptorKind.JCD: 80,
}


def descriptor_dim(kind) -> int:
    """Fixed holistic dimension of a compact descriptor."""
    kind = DescriptorKind(kind)
    if kind is DescriptorKind.HOG:
        raise ValueError("HOG dimension depends on HogParams; use hog_dim()")
    return _BASE_DIMS[kind]


def check_min_size(kind: DescriptorKind, width: int, height: int) -> None:
    need = MIN_SIZE[kind]
    if width < need or height < need:
        raise DescriptorError(
            f"{kind.value} needs at least {need}x{need} pixels, got {width}x{height}"
        )
