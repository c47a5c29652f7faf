"""Model files.

Two encodings of the same content:

* JSON (default): a versioned object whose ``rho`` field is a row-major
  nested list of ``[re, im]`` pairs.  Python's float repr round-trips
  exactly, so nothing is lost.
* binary: ``b"QMC1"``, a little-endian uint64 header length, the UTF-8 JSON
  header (everything except ``rho``), then ``rho`` as interleaved
  little-endian float64 ``re, im`` values.
"""
from __future__ import annotations

import json
import struct

import numpy as np

from .encoders import EncoderSpec, FeatureMap, FeatureScaler, RffProjection
from .errors import SchemaError
from .states import BipartiteShape
from .training import TrainedModel

FORMAT_VERSION = 1
MAGIC = b"QMC1"


def model_header(model: TrainedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "mode": model.mode,
        "encoder": model.spec.to_dict(),
        "scaler": model.scaler.to_dict() if model.scaler is not None else None,
        "rff": model.proj.to_dict() if model.proj is not None else None,
        "labels": list(model.labels),
        "shape": [model.shape.dim_x, model.shape.dim_y],
        "n_train": model.n_train,
    }


def model_to_dict(model: TrainedModel) -> dict:
    d = model_header(model)
    d["rho"] = np.stack([model.rho.real, model.rho.imag], axis=-1).tolist()
    return d


def model_from_dict(d: dict, rho: np.ndarray | None = None) -> TrainedModel:
    try:
        version = d["format_version"]
        if version != FORMAT_VERSION:
            raise SchemaError(f"unsupported model format_version {version}")
        spec = EncoderSpec(**d["encoder"])
        scaler = FeatureScaler.from_dict(d["scaler"]) if d.get("scaler") else None
        proj = RffProjection.from_dict(d["rff"]) if d.get("rff") else None
        shape = BipartiteShape(*d["shape"])
        if rho is None:
            pairs = np.asarray(d["rho"], dtype=float)
            rho = pairs[..., 0] + 1j * pairs[..., 1]
        labels = tuple(str(label) for label in d["labels"])
        model = TrainedModel(rho, shape, FeatureMap(spec, scaler, proj), labels, d["mode"], int(d["n_train"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed model file: {exc}") from None
    if rho.shape != (shape.dim, shape.dim) or spec.dim != shape.dim_x or len(labels) != shape.dim_y:
        raise SchemaError("model dimensions are inconsistent")
    return model


def save_model(model: TrainedModel, path, binary: bool = False) -> None:
    if binary:
        header = json.dumps(model_header(model)).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<Q", len(header)))
            fh.write(header)
            fh.write(np.ascontiguousarray(model.rho, dtype="<c16").tobytes())
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(model_to_dict(model), fh)


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
        if head == MAGIC:
            (length,) = struct.unpack("<Q", fh.read(8))
            header = json.loads(fh.read(length).decode("utf-8"))
            dim = header["shape"][0] * header["shape"][1]
            raw = fh.read()
            if len(raw) != dim * dim * 16:
                raise SchemaError(f"binary model payload has {len(raw)} bytes, expected {dim * dim * 16}")
            rho = np.frombuffer(raw, dtype="<c16").reshape(dim, dim).astype(complex)
            return model_from_dict(header, rho)
        fh.seek(0)
        try:
            d = json.loads(fh.read().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: not a model file ({exc})") from None
    return model_from_dict(d)
