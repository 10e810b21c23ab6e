"""
Fields on a grid: row-major flattening and PGM/CSV file I/O.

Indices are 1-based in this module's public functions, matching the linear
Hamiltonian index k = (i-1)*n_cols + j; the vertical neighbours of k are k +/- n_cols.
"""
import os
import logging
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from .constants import CSV_FLOAT_FORMAT, PGM_MAXVAL, FieldFormat
from .models import Field, GridIndexMap

logger = logging.getLogger(__name__)


class FieldParseError(ValueError):
    """Malformed PGM/CSV input. line is 1-based, offset is the byte offset."""

    def __init__(self, message: str, path: str, line: Optional[int] = None, offset: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{path}: {message}{suffix}")
        self.path = path
        self.line = line
        self.offset = offset


# ============================================================================
# INDEX MAP
# ============================================================================

def flatten(index_map: GridIndexMap, i: int, j: int) -> int:
    """(row i, column j) -> linear index k, all 1-based."""
    if not (1 <= i <= index_map.n_rows) or not (1 <= j <= index_map.n_cols):
        raise IndexError(
            f"Grid index ({i}, {j}) out of range for {index_map.n_rows}x{index_map.n_cols}"
        )
    return (i - 1) * index_map.n_cols + j


def unflatten(index_map: GridIndexMap, k: int) -> Tuple[int, int]:
    """Linear index k -> (row i, column j), all 1-based."""
    if not (1 <= k <= index_map.size):
        raise IndexError(f"Linear index {k} out of range 1..{index_map.size}")
    i, j0 = divmod(k - 1, index_map.n_cols)
    return i + 1, j0 + 1


# ============================================================================
# PGM
# ============================================================================

def _pgm_tokens(data: bytes, count: int, start: int, path: str) -> Tuple[List[Tuple[bytes, int]], int]:
    """
    Read `count` whitespace-separated header tokens, skipping '#' comments.
    Returns the (token, offset) list and the offset right after the last token.
    """
    tokens = []
    pos = start
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise FieldParseError("unexpected end of header", path, _line_of(data, pos), pos)
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        begin = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((data[begin:pos], begin))
    return tokens, pos


def _line_of(data: bytes, offset: int) -> int:
    return data.count(b"\n", 0, offset) + 1


def _header_int(token: Tuple[bytes, int], name: str, data: bytes, path: str) -> int:
    text, offset = token
    try:
        value = int(text)
    except ValueError:
        raise FieldParseError(f"invalid {name} {text!r}", path, _line_of(data, offset), offset) from None
    if value < 1:
        raise FieldParseError(f"{name} must be positive, got {value}", path, _line_of(data, offset), offset)
    return value


def read_pgm(path: str) -> Field:
    with open(path, "rb") as fh:
        data = fh.read()

    if data[:2] not in (b"P2", b"P5"):
        raise FieldParseError("unknown format (expected P2 or P5 magic)", path, 1, 0)
    magic = data[:2]
    (w_tok, h_tok, m_tok), pos = _pgm_tokens(data, 3, 2, path)
    width = _header_int(w_tok, "width", data, path)
    height = _header_int(h_tok, "height", data, path)
    maxval = _header_int(m_tok, "maxval", data, path)
    if maxval > 65535:
        raise FieldParseError(f"maxval {maxval} exceeds 65535", path, _line_of(data, m_tok[1]), m_tok[1])

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        needed = count * dtype.itemsize
        raster = data[pos:pos + needed]
        if len(raster) < needed:
            raise FieldParseError(
                f"raster truncated: expected {needed} bytes, found {len(raster)}",
                path, _line_of(data, pos), pos,
            )
        values = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    else:
        tokens, _ = _pgm_tokens(data, count, pos, path)
        values = np.empty(count, dtype=np.float64)
        for idx, (text, offset) in enumerate(tokens):
            try:
                values[idx] = int(text)
            except ValueError:
                raise FieldParseError(f"invalid pixel {text!r}", path, _line_of(data, offset), offset) from None

    if values.size and values.max() > maxval:
        raise FieldParseError(f"pixel value above maxval {maxval}", path)
    logger.debug(f"Read {magic.decode()} {width}x{height} (maxval {maxval}) from {path}")
    return Field("image_2d", width, height, values)


def write_pgm(f: Field, path: str, ascii: bool = False) -> None:
    """Write an 8-bit PGM; values are clamped to [0, 255] then rounded."""
    pixels = np.rint(np.clip(f.values, 0.0, PGM_MAXVAL)).astype(np.uint8)
    with open(path, "wb") as fh:
        if ascii:
            fh.write(f"P2\n{f.width} {f.height}\n{PGM_MAXVAL}\n".encode("ascii"))
            for row in pixels.reshape(f.height, f.width):
                fh.write((" ".join(str(int(p)) for p in row) + "\n").encode("ascii"))
        else:
            fh.write(f"P5\n{f.width} {f.height}\n{PGM_MAXVAL}\n".encode("ascii"))
            fh.write(pixels.tobytes())


# ============================================================================
# CSV
# ============================================================================

def read_csv_field(path: str) -> Field:
    try:
        df = pd.read_csv(path, header=None, skip_blank_lines=True, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise FieldParseError("empty file", path, 1) from None
    except pd.errors.ParserError as e:
        raise FieldParseError(f"non-rectangular CSV: {e}", path) from None

    missing = df.isna().any(axis=1).to_numpy()
    if missing.any():
        line = int(np.argmax(missing)) + 1
        raise FieldParseError("non-rectangular CSV (short row or empty cell)", path, line)
    try:
        arr = df.to_numpy(dtype=np.float64)
    except (TypeError, ValueError):
        bad = [c for c in df.columns if df[c].dtype == object]
        column = df[bad[0]]
        line = int(pd.to_numeric(column, errors="coerce").isna().to_numpy().argmax()) + 1
        raise FieldParseError("non-numeric value", path, line) from None

    if arr.shape[1] == 1:
        return Field.from_array(arr[:, 0])
    return Field.from_array(arr)


def write_csv_field(f: Field, path: str) -> None:
    arr = f.to_array()
    frame = pd.DataFrame(arr.reshape(-1, 1) if f.kind == "signal_1d" else arr)
    frame.to_csv(path, header=False, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


# ============================================================================
# PUBLIC I/O
# ============================================================================

def infer_format(path: str) -> FieldFormat:
    ext = os.path.splitext(path)[1].lower()
    if ext in (".pgm", ".pnm"):
        return "pgm"
    if ext in (".csv", ".txt"):
        return "csv"
    raise ValueError(f"Cannot infer field format from extension '{ext}' (use .pgm or .csv)")


def load_field(path: str, format: Optional[FieldFormat] = None) -> Field:
    fmt = format or infer_format(path)
    if fmt == "pgm":
        return read_pgm(path)
    if fmt == "csv":
        return read_csv_field(path)
    raise ValueError(f"Unsupported field format: {fmt}")


def save_field(f: Field, path: str, format: Optional[FieldFormat] = None, ascii: bool = False) -> None:
    fmt = format or infer_format(path)
    if fmt == "pgm":
        write_pgm(f, path, ascii=ascii)
    elif fmt == "csv":
        write_csv_field(f, path)
    else:
        raise ValueError(f"Unsupported field format: {fmt}")
    logger.debug(f"Saved {f.kind} {f.shape} to {path}")
