"""Model checkpoint file: one JSON header line + raw parameter blob.

The blob is the concatenation of every parameter array as little-endian
float64 in the documented layout order (see PARAM_LAYOUT), so a round
trip is bit-exact.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError
from ..ioutil import atomic_write_bytes
from .network import KanConfig, ModelSpec, PARAM_LAYOUT, param_shapes

__all__ = ["load_checkpoint", "save_checkpoint"]

FORMAT_NAME = "eegkan-checkpoint"
FORMAT_VERSION = 1


def _spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "kind": spec.kind,
        "input_dim": spec.input_dim,
        "hidden_nodes": spec.hidden_nodes,
        "output_dim": spec.output_dim,
        "dropout_rate": spec.dropout_rate,
        "kan": {
            "grid_size": spec.kan.grid_size,
            "spline_degree": spec.kan.spline_degree,
            "grid_range": list(spec.kan.grid_range),
        },
    }


def _spec_from_dict(d: dict) -> ModelSpec:
    kan = d.get("kan", {})
    return ModelSpec(
        kind=d["kind"],
        input_dim=d["input_dim"],
        hidden_nodes=d["hidden_nodes"],
        output_dim=d["output_dim"],
        dropout_rate=d["dropout_rate"],
        kan=KanConfig(
            grid_size=kan["grid_size"],
            spline_degree=kan["spline_degree"],
            grid_range=tuple(kan["grid_range"]),
        ),
    )


def save_checkpoint(path, spec: ModelSpec, params: dict, seed: int, epoch: int) -> None:
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": _spec_to_dict(spec),
        "seed": seed,
        "epoch": epoch,
        "layout": list(PARAM_LAYOUT[spec.kind]),
    }
    blob = b"".join(
        np.ascontiguousarray(params[key], dtype="<f8").tobytes()
        for key in PARAM_LAYOUT[spec.kind]
    )
    payload = json.dumps(header, sort_keys=True).encode("utf-8") + b"\n" + blob
    atomic_write_bytes(path, payload)


def load_checkpoint(path) -> tuple[ModelSpec, dict, int, int]:
    """Returns (spec, params, seed, epoch); raises ParseError on mismatch."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: invalid checkpoint header: {exc}") from exc
    if header.get("format") != FORMAT_NAME:
        raise ParseError(f"{path}: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported checkpoint version {header.get('version')}")
    try:
        spec = _spec_from_dict(header["spec"])
        seed = int(header["seed"])
        epoch = int(header["epoch"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed checkpoint header: {exc}") from exc

    shapes = param_shapes(spec)
    expected = sum(int(np.prod(s)) for s in shapes.values()) * 8
    if len(blob) != expected:
        raise ParseError(
            f"{path}: parameter blob is {len(blob)} bytes, expected {expected}"
        )
    params = {}
    offset = 0
    for key in PARAM_LAYOUT[spec.kind]:
        shape = shapes[key]
        count = int(np.prod(shape))
        params[key] = (
            np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            .reshape(shape)
            .copy()
        )
        offset += count * 8
    return spec, params, seed, epoch
