"""Labeled screenshot corpora, stratified folds and the text feature cache.

Dataset layout is ``<root>/<class>/<image>.{png,jpg,jpeg}``; directory names
are the ground-truth labels (lower-cased).

Feature cache layout::

    #phish-iris-features v1 kind=SCD config=1+4 dim=1280
    label,path,v0,v1,...,v1279

Values are written in fixed point with 7 decimals (trailing zeros dropped),
so a round trip is exact to within 5e-8 per value.
"""

from __future__ import annotations

import csv
import logging
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .descriptors import DescriptorKind
from .errors import CorpusError, FormatError, SchemaError

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
CACHE_MAGIC = "#phish-iris-features"
CACHE_VERSION = 1
_HEADER_RE = re.compile(
    r"^#phish-iris-features v(?P<version>\d+) kind=(?P<kind>\S+) "
    r"config=(?P<config>\S+) dim=(?P<dim>\d+)$"
)

PHISH_IRIS_CLASSES = (
    "adobe", "alibaba", "amazon", "apple", "boa", "chase", "dhl", "dropbox",
    "facebook", "linkedin", "microsoft", "other", "paypal", "wellsfargo", "yahoo",
)


@dataclass(frozen=True)
class SampleRecord:
    path: str
    label: str
    split: str = "train"


@dataclass
class Corpus:
    samples: list[SampleRecord]
    classes: list[str]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.samples]

    @property
    def paths(self) -> list[str]:
        return [s.path for s in self.samples]


@dataclass(frozen=True)
class ClassDistribution:
    counts: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _check_image(path: Path) -> str | None:
    """Return a reason string if ``path`` is not a readable PNG/JPEG."""
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "JPEG"):
                return f"unsupported format {im.format}"
            im.verify()
    except Exception as exc:  # PIL raises a grab-bag of exception types
        return f"{type(exc).__name__}: {exc}"
    return None


def scan_corpus(root, split: str = "train") -> Corpus:
    """Index every image under ``root``'s class sub-directories.

    Files that are not decodable PNG/JPEG images land in ``Corpus.skipped``
    with a reason instead of aborting the scan.
    """
    root = Path(root)
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} does not exist or is not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    if not class_dirs:
        raise CorpusError(f"corpus root {root} contains no class directories")

    samples, skipped = [], []
    for class_dir in class_dirs:
        label = class_dir.name.lower()
        for path in sorted(p for p in class_dir.iterdir() if p.is_file()):
            if path.name.startswith("."):
                continue
            if path.suffix.lower() not in IMAGE_SUFFIXES:
                reason = f"unsupported extension {path.suffix!r}"
            else:
                reason = _check_image(path)
            if reason:
                log.info("skipping %s: %s", path, reason)
                skipped.append((str(path), reason))
            else:
                samples.append(SampleRecord(str(path), label, split))
    samples.sort(key=lambda s: s.path)
    classes = sorted({s.label for s in samples})
    return Corpus(samples, classes, skipped)


def class_distribution(c: Corpus) -> ClassDistribution:
    counts = {label: 0 for label in c.classes}
    for s in c.samples:
        counts[s.label] += 1
    return ClassDistribution(counts)


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> np.ndarray:
    """Assign each sample a fold id in ``0..k-1``, stratified by label.

    Each class's members are shuffled with a generator seeded by ``seed`` and
    dealt round-robin; dealing continues where the previous class stopped so
    that the folds also stay balanced overall.
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    labels = list(labels)
    if not labels:
        raise ValueError("cannot fold an empty corpus")
    rng = np.random.default_rng(seed)
    folds = np.empty(len(labels), dtype=np.int64)
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    smallest = min(len(v) for v in by_class.values())
    if smallest < k:
        warnings.warn(
            f"smallest class has {smallest} samples, fewer than {k} folds; "
            "some folds will miss that class",
            stacklevel=2,
        )
    start = 0
    for label in sorted(by_class):
        members = np.asarray(by_class[label])[rng.permutation(len(by_class[label]))]
        folds[members] = (start + np.arange(members.size)) % k
        start = (start + members.size) % k
    return folds


@dataclass
class FeatureTable:
    """Feature matrix ``X`` (rows x dim) with per-row labels and source paths."""

    kind: DescriptorKind
    config: str
    X: np.ndarray
    labels: list[str]
    paths: list[str]

    def __post_init__(self):
        self.kind = DescriptorKind(self.kind)
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise SchemaError(f"feature matrix must be 2-D, got shape {self.X.shape}")
        if not (len(self.labels) == len(self.paths) == self.X.shape[0]):
            raise SchemaError("labels, paths and feature rows differ in length")
        self.labels = list(self.labels)
        self.paths = list(self.paths)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def classes(self) -> list[str]:
        return sorted(set(self.labels))

    def __len__(self):
        return self.X.shape[0]

    def subset(self, rows) -> "FeatureTable":
        rows = np.asarray(rows, dtype=np.intp)
        return FeatureTable(
            self.kind,
            self.config,
            self.X[rows],
            [self.labels[i] for i in rows],
            [self.paths[i] for i in rows],
        )

    def same_schema(self, other: "FeatureTable") -> bool:
        return (self.kind, self.config, self.dim) == (other.kind, other.config, other.dim)


def format_value(v: float) -> str:
    s = f"{v:.7f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def write_feature_cache(t: FeatureTable, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"{CACHE_MAGIC} v{CACHE_VERSION} kind={t.kind.value} config={t.config} dim={t.dim}\n")
        writer = csv.writer(fh, lineterminator="\n")
        for label, src, row in zip(t.labels, t.paths, t.X):
            writer.writerow([label, src, *map(format_value, row.tolist())])


def read_feature_cache(path) -> FeatureTable:
    path = Path(path)
    text = path.read_text()
    if not text:
        raise FormatError(f"{path}: empty feature cache")
    if not text.endswith("\n"):
        raise FormatError(f"{path}: file is truncated (no final newline)")
    header, _, body = text.partition("\n")
    m = _HEADER_RE.match(header)
    if not m:
        raise FormatError(f"{path}: bad header line {header[:80]!r}")
    if int(m["version"]) != CACHE_VERSION:
        raise FormatError(f"{path}: unsupported cache version v{m['version']}")
    try:
        kind = DescriptorKind(m["kind"])
    except ValueError:
        raise FormatError(f"{path}: unknown descriptor kind {m['kind']!r}") from None
    dim = int(m["dim"])

    labels, paths, rows = [], [], []
    for lineno, rec in enumerate(csv.reader(body.splitlines()), start=2):
        if len(rec) - 2 != dim:
            raise SchemaError(
                f"{path}:{lineno}: header says dim={dim} but row has {max(len(rec) - 2, 0)} values"
            )
        try:
            rows.append([float(v) for v in rec[2:]])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        labels.append(rec[0])
        paths.append(rec[1])
    X = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return FeatureTable(kind, m["config"], X, labels, paths)


def feature_cache_roundtrip(t: FeatureTable, path) -> FeatureTable:
    write_feature_cache(t, path)
    return read_feature_cache(path)
