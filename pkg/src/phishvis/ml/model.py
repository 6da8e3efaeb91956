"""Trained model container and its binary file format.

File layout (all integers little-endian)::

    8 bytes   magic  b"PHVMODEL"
    uint32    format version
    uint64    header length N
    N bytes   UTF-8 JSON header (sorted keys): family, schema, classes,
              params and an array table of (name, dtype, shape, offset, nbytes)
    ...       raw array bytes, concatenated in array-table order

Serialization is deterministic: the same model always produces the same bytes.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError, SchemaError
from .forest import forest_scores, unpack_trees
from .svm import svm_scores

MAGIC = b"PHVMODEL"
FORMAT_VERSION = 1
FAMILIES = ("random_forest", "svm_rbf")


@dataclass
class TrainedModel:
    family: str
    kind: str
    config: str
    dim: int
    classes: list[str]
    params: dict
    arrays: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if not self.classes:
            raise ValueError("model needs at least one class")
        self._trees = None

    def scores(self, X) -> np.ndarray:
        """Per-class scores for each row of ``X``; each row sums to 1."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.dim:
            raise SchemaError(f"model expects {self.dim}-d vectors, got {X.shape[1]}")
        k = len(self.classes)
        if self.family == "random_forest":
            if self._trees is None:
                self._trees = unpack_trees(self.arrays)
            return forest_scores(self._trees, X, k)
        return svm_scores(self.arrays, X, k)

    def predict_indices(self, X) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1)

    def predict_labels(self, X) -> list[str]:
        return [self.classes[i] for i in self.predict_indices(X)]

    def predict(self, v) -> tuple[str, dict[str, float]]:
        """Label and per-class scores for a single feature vector."""
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1:
            raise SchemaError(f"expected one vector, got shape {v.shape}")
        s = self.scores(v[None, :])[0]
        return self.classes[int(np.argmax(s))], dict(zip(self.classes, s.tolist()))

    # serialization

    def to_bytes(self) -> bytes:
        table, blobs, offset = [], [], 0
        for name in sorted(self.arrays):
            arr = np.ascontiguousarray(self.arrays[name])
            arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
            raw = arr.tobytes()
            table.append(
                {"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape),
                 "offset": offset, "nbytes": len(raw)}
            )
            blobs.append(raw)
            offset += len(raw)
        header = {
            "family": self.family,
            "schema": {"kind": self.kind, "config": self.config, "dim": self.dim},
            "classes": list(self.classes),
            "params": self.params,
            "arrays": table,
        }
        hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        return MAGIC + struct.pack("<IQ", FORMAT_VERSION, len(hbytes)) + hbytes + b"".join(blobs)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TrainedModel":
        if len(data) < len(MAGIC) + 12 or not data.startswith(MAGIC):
            raise FormatError("not a model file (bad magic)")
        version, hlen = struct.unpack_from("<IQ", data, len(MAGIC))
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported model format version {version}")
        start = len(MAGIC) + 12
        try:
            header = json.loads(data[start : start + hlen])
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"corrupt model header: {exc}") from None
        body = memoryview(data)[start + hlen :]
        arrays = {}
        for entry in header["arrays"]:
            a, n = entry["offset"], entry["nbytes"]
            if a + n > len(body):
                raise FormatError(f"model file truncated inside array {entry['name']!r}")
            arr = np.frombuffer(body[a : a + n], dtype=np.dtype(entry["dtype"]))
            arrays[entry["name"]] = arr.reshape(entry["shape"]).copy()
        schema = header["schema"]
        return cls(
            header["family"], schema["kind"], schema["config"], int(schema["dim"]),
            header["classes"], header["params"], arrays,
        )

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "TrainedModel":
        return cls.from_bytes(Path(path).read_bytes())


def model_roundtrip(m: TrainedModel, path) -> TrainedModel:
    m.save(path)
    return TrainedModel.load(path)
