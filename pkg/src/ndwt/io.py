"""File formats: CSV vectors/matrices, PGM images, and the binary
``NDWTW1`` (matrix cache) and ``NDWTC1`` (coefficients) containers.

Binary layout (all little-endian)::

    NDWTW1: magic[6] | u16 len | filter name | u64 m | u32 p | i64 shift
            | u64 count | count x f64 (row-major W)
    NDWTC1: magic[6] | u8 ndim | u64 m | u64 n | u32 p1 | u32 p2 | i64 shift
            | u16 len | row filter | u16 len | column filter
            | u64 count | count x f64 (row-major coefficients)

A 1-D container has ``ndim = 1``, ``n = 1``, ``p2 = 0`` and an empty
column filter name.
"""
from __future__ import annotations

import json
import struct
import warnings
from pathlib import Path

import numpy as np

from .errors import DataError
from .matrix import NDWTMatrix
from .transforms import CoefficientGrid2D, CoefficientStack1D

MATRIX_MAGIC = b"NDWTW1"
COEFF_MAGIC = b"NDWTC1"


def read_csv(path) -> np.ndarray:
    """Numeric CSV as a 2-D float array (``,`` separated, ``.`` decimals)."""
    try:
        with warnings.catch_warnings():
            # an empty file is reported below as a DataError
            warnings.simplefilter("ignore", UserWarning)
            arr = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (ValueError, OSError) as exc:
        raise DataError(f"cannot parse {path} as numeric CSV: {exc}") from None
    if arr.size == 0:
        raise DataError(f"{path} holds no values")
    return arr


def read_vector(path) -> np.ndarray:
    arr = read_array(path)
    if min(arr.shape) != 1:
        raise DataError(f"{path} holds a {arr.shape[0]}x{arr.shape[1]} matrix, expected a vector")
    return arr.ravel()


def read_array(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    return read_csv(path)


def write_csv(path, arr) -> None:
    # %.17g round-trips every double exactly
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")


def _pgm_tokens(data: bytes):
    pos, tokens = 0, []
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos + 1


def read_pgm(path) -> np.ndarray:
    """Plain (P2) or raw (P5) PGM, 8- or 16-bit, as a float array."""
    data = Path(path).read_bytes()
    tokens, offset = _pgm_tokens(data)
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise DataError(f"bad PGM header in {path}") from None
    if magic == b"P2":
        vals = data[offset:].split()
        if len(vals) < width * height:
            raise DataError(f"{path}: expected {width * height} samples, found {len(vals)}")
        return np.array([int(v) for v in vals[: width * height]], dtype=float).reshape(height, width)
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = width * height * dtype.itemsize
        raw = data[offset:offset + need]
        if len(raw) < need:
            raise DataError(f"{path}: truncated PGM raster")
        return np.frombuffer(raw, dtype=dtype).astype(float).reshape(height, width)
    raise DataError(f"{path}: unsupported PGM magic {magic!r}")


class _Reader:
    def __init__(self, data: bytes, path):
        self.data, self.pos, self.path = data, 0, path

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise DataError(f"{self.path}: truncated container header")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out if len(out) > 1 else out[0]

    def name(self) -> str:
        length = self.take("<H")
        if self.pos + length > len(self.data):
            raise DataError(f"{self.path}: truncated container header")
        raw = self.data[self.pos:self.pos + length]
        self.pos += length
        return raw.decode("utf-8")

    def floats(self, count: int) -> np.ndarray:
        need = 8 * count
        if len(self.data) - self.pos != need:
            raise DataError(
                f"{self.path}: expected {count} float64 values, found "
                f"{(len(self.data) - self.pos) / 8:g}"
            )
        return np.frombuffer(self.data, dtype="<f8", count=count, offset=self.pos).copy()


def _name(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def save_matrix(path, W: NDWTMatrix) -> None:
    header = MATRIX_MAGIC + _name(W.filter) + struct.pack("<QIqQ", W.m, W.p, W.shift, W.W.size)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(W.W, dtype="<f8").tobytes())


def load_matrix(path) -> NDWTMatrix:
    r = _Reader(Path(path).read_bytes(), path)
    if r.take("<6s") != MATRIX_MAGIC:
        raise DataError(f"{path}: not an NDWTW1 matrix file")
    name = r.name()
    m, p, shift, count = r.take("<QIqQ")
    if count != (p + 1) * m * m:
        raise DataError(f"{path}: element count {count} inconsistent with m={m}, p={p}")
    W = r.floats(count).reshape((p + 1) * m, m)
    W.flags.writeable = False
    return NDWTMatrix(W, m, p, name, shift)


def save_coefficients(path, coeffs) -> None:
    if isinstance(coeffs, CoefficientStack1D):
        head = struct.pack("<BQQIIq", 1, coeffs.m, 1, coeffs.p, 0, coeffs.shift)
        names = _name(coeffs.filter) + _name("")
        data = coeffs.data
    elif isinstance(coeffs, CoefficientGrid2D):
        head = struct.pack("<BQQIIq", 2, coeffs.m, coeffs.n, coeffs.p1, coeffs.p2, coeffs.shift)
        names = _name(coeffs.filter_rows) + _name(coeffs.filter_cols)
        data = coeffs.B
    else:
        raise TypeError(f"cannot store {type(coeffs).__name__}")
    with open(path, "wb") as fh:
        fh.write(COEFF_MAGIC + head + names + struct.pack("<Q", data.size))
        fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


def load_coefficients(path):
    r = _Reader(Path(path).read_bytes(), path)
    if r.take("<6s") != COEFF_MAGIC:
        raise DataError(f"{path}: not an NDWTC1 coefficient file")
    ndim, m, n, p1, p2, shift = r.take("<BQQIIq")
    f1, f2 = r.name(), r.name()
    count = r.take("<Q")
    if ndim == 1:
        if count != (p1 + 1) * m:
            raise DataError(f"{path}: element count {count} inconsistent with header")
        return CoefficientStack1D(r.floats(count), m, p1, f1, shift)
    if ndim == 2:
        if count != (p1 + 1) * m * (p2 + 1) * n:
            raise DataError(f"{path}: element count {count} inconsistent with header")
        B = r.floats(count).reshape((p1 + 1) * m, (p2 + 1) * n)
        return CoefficientGrid2D(B, m, n, p1, p2, f1, f2, shift)
    raise DataError(f"{path}: unsupported dimensionality {ndim}")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".blocks.json")


def block_metadata(coeffs) -> dict:
    if isinstance(coeffs, CoefficientStack1D):
        return {
            "ndim": 1, "m": coeffs.m, "p": coeffs.p, "filter": coeffs.filter, "shift": coeffs.shift,
            "blocks": [{"kind": b.kind, "depth": b.depth, "start": b.start, "stop": b.stop}
                       for b in coeffs.blocks],
        }
    return {
        "ndim": 2, "m": coeffs.m, "n": coeffs.n, "p1": coeffs.p1, "p2": coeffs.p2,
        "filter_rows": coeffs.filter_rows, "filter_cols": coeffs.filter_cols, "shift": coeffs.shift,
        "blocks": [{"tag": b.tag, "depth_rows": b.depth_rows, "depth_cols": b.depth_cols,
                    "rows": [b.rows.start, b.rows.stop], "cols": [b.cols.start, b.cols.stop]}
                   for b in coeffs.blocks()],
    }


def export_coefficients_csv(path, coeffs) -> Path:
    """Write values to ``path`` and the block map to ``<stem>.blocks.json``."""
    data = coeffs.data if isinstance(coeffs, CoefficientStack1D) else coeffs.B
    write_csv(path, data)
    side = sidecar_path(path)
    side.write_text(json.dumps(block_metadata(coeffs), indent=1))
    return side


def import_coefficients_csv(path):
    side = sidecar_path(path)
    if not side.exists():
        raise DataError(f"missing block-map sidecar {side}")
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{side}: {exc}") from None
    arr = read_csv(path)
    if meta.get("ndim") == 1:
        return CoefficientStack1D(arr.ravel(), meta["m"], meta["p"], meta["filter"], meta["shift"])
    return CoefficientGrid2D(arr, meta["m"], meta["n"], meta["p1"], meta["p2"],
                             meta["filter_rows"], meta["filter_cols"], meta["shift"])


def read_coefficients(path):
    """NDWTC1 container, or CSV with its block-map sidecar."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(6)
    if head == COEFF_MAGIC:
        return load_coefficients(path)
    if path.suffix.lower() == ".csv":
        return import_coefficients_csv(path)
    raise DataError(f"{path}: neither an NDWTC1 container nor a CSV with sidecar")
