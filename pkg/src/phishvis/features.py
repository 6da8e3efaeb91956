"""Feature specifications and corpus-wide extraction."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, FeatureTable
from .descriptors import DescriptorError, DescriptorKind, HogParams, hog, hog_dim
from .imaging import DecodeError, RasterImage, load_image, resize
from .pyramid import HOLISTIC, PyramidConfig, check_pyramid_size, pyramid_dim, pyramid_extract

log = logging.getLogger(__name__)

HOG_RESIZE = (640, 480)


@dataclass(frozen=True)
class FeatureSpec:
    """What to extract: a compact descriptor over a pyramid, or HOG on a resized page."""

    kind: DescriptorKind
    pyramid: PyramidConfig = HOLISTIC
    hog: HogParams | None = None
    resize: tuple[int, int] = HOG_RESIZE

    def __post_init__(self):
        object.__setattr__(self, "kind", DescriptorKind(self.kind))
        if self.kind is DescriptorKind.HOG and self.hog is None:
            object.__setattr__(self, "hog", HogParams())

    @property
    def token(self) -> str:
        if self.kind is DescriptorKind.HOG:
            return f"{self.hog.token()}@{self.resize[0]}x{self.resize[1]}"
        return str(self.pyramid)

    @property
    def dim(self) -> int:
        if self.kind is DescriptorKind.HOG:
            return hog_dim(self.hog, *self.resize)
        return pyramid_dim(self.kind, self.pyramid)

    @classmethod
    def from_token(cls, kind, token: str) -> "FeatureSpec":
        """Inverse of ``token``, as stored in cache headers and model files."""
        kind = DescriptorKind(kind)
        if kind is DescriptorKind.HOG:
            params, _, size = token.partition("@")
            w, _, h = size.partition("x")
            return cls(kind, hog=HogParams.parse(params), resize=(int(w), int(h)))
        return cls(kind, pyramid=PyramidConfig.parse(token))

    def check_size(self, img: RasterImage) -> None:
        if self.kind is not DescriptorKind.HOG:
            check_pyramid_size(self.kind, self.pyramid, img.width, img.height)

    def extract(self, img: RasterImage) -> np.ndarray:
        if self.kind is DescriptorKind.HOG:
            return hog(resize(img, *self.resize), self.hog)
        return pyramid_extract(img, self.kind, self.pyramid)


def _extract_path(args):
    spec, path = args
    try:
        return spec.extract(load_image(path)), None
    except (DecodeError, DescriptorError, OSError) as exc:
        return None, str(exc)


def extract_corpus(corpus: Corpus, spec: FeatureSpec, workers: int | None = None):
    """Extract ``spec`` for every sample; returns ``(table, skipped)``.

    ``skipped`` lists ``(path, reason)`` for images that failed to decode or
    are too small for the requested configuration. Rows keep corpus order
    whatever the completion order of the workers.
    """
    workers = workers or os.cpu_count() or 1
    jobs = [(spec, s.path) for s in corpus.samples]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_path, jobs, chunksize=8))
    else:
        results = [_extract_path(j) for j in jobs]

    rows, labels, paths, skipped = [], [], [], []
    for sample, (vec, err) in zip(corpus.samples, results):
        if err is not None:
            log.info("skipping %s: %s", sample.path, err)
            skipped.append((sample.path, err))
            continue
        rows.append(vec)
        labels.append(sample.label)
        paths.append(sample.path)
    X = np.vstack(rows) if rows else np.zeros((0, spec.dim))
    return FeatureTable(spec.kind, spec.token, X, labels, paths), skipped
