"""Self-describing checkpoint files.

Layout: the magic bytes, a 4-byte little-endian header length, a UTF-8 JSON
header (config, vocabulary, seed, step, parameter names and shapes) and
then every parameter as raw little-endian float64 in header order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import ConfigurationError, ParseError
from .model import EncoderConfig, SecModel
from .vocab import Vocabulary

MAGIC = b"SECTAGCK"
FORMAT_VERSION = 1


def save_checkpoint(path: Union[str, Path], model: SecModel, step: int = 0, extra: Optional[dict] = None) -> None:
    params = list(model.named_parameters())
    header = {
        "format_version": FORMAT_VERSION,
        "config": model.config.to_dict(),
        "seed": model.config.seed,
        "step": step,
        "vocab": {"words": model.vocab.words, "buckets": model.vocab.buckets, "sha256": model.vocab.digest()},
        "parameters": [[name, list(p.shape)] for name, p in params],
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, p in params:
            fh.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())


def read_header(path: Union[str, Path]) -> tuple[dict, int]:
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) != MAGIC:
            raise ParseError(f"{path}: not a sectag checkpoint")
        (size,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(size).decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported checkpoint version {header.get('format_version')}")
    return header, len(MAGIC) + 4 + size


def load_checkpoint(path: Union[str, Path], expect: Optional[EncoderConfig] = None) -> tuple[SecModel, dict]:
    """Rebuild the model stored at ``path``.

    If ``expect`` is given, a checkpoint whose config differs is rejected.
    """
    header, offset = read_header(path)
    config = EncoderConfig(**header["config"])
    if expect is not None and expect != config:
        raise ConfigurationError(f"checkpoint config {config} does not match expected {expect}")
    vocab = Vocabulary(header["vocab"]["words"], header["vocab"]["buckets"])
    if vocab.digest() != header["vocab"]["sha256"]:
        raise ConfigurationError("checkpoint vocabulary hash mismatch")
    model = SecModel(config, vocab)
    payload = Path(path).read_bytes()[offset:]
    names = dict(model.named_parameters())
    state, pos = {}, 0
    for name, shape in header["parameters"]:
        if name not in names:
            raise ConfigurationError(f"checkpoint parameter {name} unknown to this model")
        count = int(np.prod(shape))
        chunk = payload[pos : pos + 8 * count]
        if len(chunk) != 8 * count:
            raise ParseError(f"{path}: truncated payload at {name}")
        state[name] = np.frombuffer(chunk, dtype="<f8").reshape(shape).astype(np.float64)
        pos += 8 * count
    if pos != len(payload) or set(state) != set(names):
        raise ParseError(f"{path}: payload does not match the parameter list")
    model.load_state(state)
    return model, header
