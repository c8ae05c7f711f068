"""File formats: skew matrices as whitespace/CSV text, grid fields as a
small binary container, and deterministic CSV/JSON emission.

GridField container, byte exact:

    bytes 0..7   magic b"THETAGF1"
    bytes 8..11  uint32 little-endian  n   (dimension)
    bytes 12..15 uint32 little-endian  N   (points per axis)
    bytes 16..23 float64 little-endian L   (half-width)
    rest         N^n complex values as interleaved float64 little-endian
                 (re, im), row-major (C) order over the index grid
"""

import json
import struct

import numpy as np

from .skewform import SkewMatrix
from .twistcal import GridField, GridGeometry

MAGIC = b"THETAGF1"
FLOAT_FMT = "%.16e"  # 17 significant digits, '.' decimal, scientific


class FormatError(ValueError):
    pass


def load_matrix(path) -> SkewMatrix:
    """Read a real square matrix from whitespace- or comma-separated text."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise FormatError(f"{path}: bad matrix row {line!r}") from exc
    if not rows:
        raise FormatError(f"{path}: no matrix rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() != len(rows):
        raise FormatError(f"{path}: rows do not form a square matrix")
    return SkewMatrix.from_array(np.array(rows))


def save_field(path, f: GridField):
    geom = f.geom
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", geom.n, geom.N))
        fh.write(struct.pack("<d", geom.L))
        inter = np.empty(2 * geom.size)
        flat = f.values.ravel(order="C")
        inter[0::2] = flat.real
        inter[1::2] = flat.imag
        fh.write(inter.astype("<f8").tobytes())


def load_field(path) -> GridField:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        n, N = struct.unpack("<II", fh.read(8))
        (L,) = struct.unpack("<d", fh.read(8))
        geom = GridGeometry(n=n, N=N, L=L)
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.size != 2 * geom.size:
        raise FormatError(
            f"{path}: expected {2 * geom.size} payload floats, got {raw.size}"
        )
    vals = raw[0::2] + 1j * raw[1::2]
    return GridField(geom, vals.reshape((N,) * n))


def fmt(x) -> str:
    return FLOAT_FMT % float(x)


def write_csv(path, header, rows, version: str, seed=None):
    """RFC-4180-style CSV with a comment line carrying version and seed;
    identical inputs give byte-identical files."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        seed_part = "" if seed is None else f" seed={seed}"
        fh.write(f"# thetalab {version}{seed_part}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            parts = []
            for v in row:
                if isinstance(v, (bool, np.bool_)):
                    parts.append(str(bool(v)))
                elif isinstance(v, (int, np.integer)):
                    parts.append(str(int(v)))
                elif isinstance(v, (float, np.floating)):
                    parts.append(fmt(v))
                else:
                    parts.append(str(v))
            fh.write(",".join(parts) + "\n")


def json_dump(obj) -> str:
    return json.dumps(_roundtrip(obj), sort_keys=True, indent=2) + "\n"


def _roundtrip(obj):
    if isinstance(obj, dict):
        return {str(k): _roundtrip(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_roundtrip(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(fmt(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_roundtrip(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": float(fmt(obj.real)), "im": float(fmt(obj.imag))}
    return obj
