"""Portable single-file container for one dataset example.

Layout (all integers little-endian)::

    b"QDS1"                      magic
    u16                          format version
    u32                          metadata length in bytes
    UTF-8 JSON metadata          includes "arrays": [{name, dtype, shape}, ...]
    array payloads               in metadata order, row-major; f8 reals,
                                 c16 complex as interleaved (re, im) f8 pairs
    u64                          FNV-1a 64 of every preceding byte
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numba
import numpy as np

MAGIC = b"QDS1"
VERSION = 1
_HEAD = struct.Struct("<4sHI")
_TAIL = struct.Struct("<Q")
DTYPES = {"f8": np.dtype("<f8"), "c16": np.dtype("<c16")}

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class ContainerError(ValueError):
    pass


class BadMagic(ContainerError):
    pass


class VersionMismatch(ContainerError):
    pass


class Truncated(ContainerError):
    pass


class ChecksumMismatch(ContainerError):
    pass


class ShapeMismatch(ContainerError):
    pass


@numba.njit(cache=True)
def _fnv1a(data):
    h = numba.uint64(FNV_OFFSET)
    prime = numba.uint64(FNV_PRIME)
    for byte in data:
        h = (h ^ numba.uint64(byte)) * prime
    return h


def fnv1a64(data: bytes) -> int:
    return int(_fnv1a(np.frombuffer(data, dtype=np.uint8)))


def _dtype_code(a: np.ndarray) -> str:
    if np.iscomplexobj(a):
        return "c16"
    if np.issubdtype(a.dtype, np.number) or a.dtype == bool:
        return "f8"
    raise ContainerError(f"cannot store arrays of dtype {a.dtype}")


def encode(metadata: dict, arrays: dict[str, np.ndarray]) -> bytes:
    """Serialise metadata plus named arrays; ``metadata["arrays"]`` is (re)written here."""
    meta = dict(metadata)
    payload = []
    table = []
    for name, a in arrays.items():
        code = _dtype_code(np.asarray(a))
        a = np.ascontiguousarray(a, dtype=DTYPES[code])
        table.append({"name": name, "dtype": code, "shape": list(a.shape)})
        payload.append(a.tobytes())
    meta["arrays"] = table
    blob = json.dumps(meta, separators=(",", ":"), allow_nan=False).encode("utf-8")
    body = _HEAD.pack(MAGIC, VERSION, len(blob)) + blob + b"".join(payload)
    return body + _TAIL.pack(fnv1a64(body))


def decode(data: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    if len(data) < _HEAD.size + _TAIL.size:
        raise Truncated(f"file is {len(data)} bytes, shorter than the fixed header and trailer")
    magic, version, mlen = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise VersionMismatch(f"format version {version}, this reader handles {VERSION}")
    body, (stored,) = data[:-_TAIL.size], _TAIL.unpack_from(data, len(data) - _TAIL.size)
    start = _HEAD.size + mlen
    if start > len(body):
        raise Truncated(f"metadata length {mlen} runs past the end of the file")
    actual = fnv1a64(body)
    if actual != stored:
        raise ChecksumMismatch(f"checksum {actual:016x} does not match stored {stored:016x}")
    try:
        meta = json.loads(body[_HEAD.size:start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"unreadable metadata: {exc}") from None
    arrays = {}
    off = start
    for entry in meta.get("arrays", []):
        dt = DTYPES.get(entry["dtype"])
        if dt is None:
            raise ContainerError(f"unknown dtype {entry['dtype']!r} for {entry['name']}")
        shape = tuple(entry["shape"])
        nbytes = int(np.prod(shape, dtype=np.int64)) * dt.itemsize
        if off + nbytes > len(body):
            raise Truncated(f"array {entry['name']} runs past the end of the payload")
        arrays[entry["name"]] = np.frombuffer(body, dtype=dt, count=nbytes // dt.itemsize,
                                              offset=off).reshape(shape)
        off += nbytes
    if off != len(body):
        raise ShapeMismatch(f"{len(body) - off} payload bytes not accounted for by the array table")
    _check_declared_shapes(meta, arrays)
    return meta, arrays


def _check_declared_shapes(meta: dict, arrays: dict[str, np.ndarray]) -> None:
    declared = meta.get("shapes", {})
    for name, shape in declared.items():
        if name in arrays and list(arrays[name].shape) != list(shape):
            raise ShapeMismatch(f"{name} has shape {arrays[name].shape}, metadata declares {shape}")


def write_example(path, metadata: dict, arrays: dict[str, np.ndarray]) -> int:
    """Write one example file; returns its checksum."""
    data = encode(metadata, arrays)
    Path(path).write_bytes(data)
    return _TAIL.unpack_from(data, len(data) - _TAIL.size)[0]


def read_example(path) -> tuple[dict, dict[str, np.ndarray]]:
    return decode(Path(path).read_bytes())


def stored_checksum(path) -> int:
    data = Path(path).read_bytes()
    return _TAIL.unpack_from(data, len(data) - _TAIL.size)[0]
