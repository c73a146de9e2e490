"""Image files: 16-bit binary PGM for counts, headered float32 raster for intensities.

The float format is one ASCII header line followed by raw row-major data::

    VSTF32 <width> <height> <little|big>\\n
"""

import sys

import numpy as np

from ..core import DomainError

__all__ = ["write_pgm", "read_pgm", "write_counts", "write_float_image", "read_float_image", "read_image", "write_image"]

FLOAT_MAGIC = b"VSTF32"


def write_pgm(path, counts):
    """Write integer counts in ``[0, 65535]`` as a binary (P5) 16-bit PGM."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 2:
        raise DomainError("PGM images must be 2-D")
    if np.any(counts < 0) or np.any(counts > 65535) or np.any(counts != np.round(counts)):
        raise DomainError("PGM counts must be integers in [0, 65535]")
    h, w = counts.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(counts.astype(">u2").tobytes())


def write_counts(stem, counts):
    """Write counts to ``stem.pgm``, or to ``stem.f32`` when they exceed 16 bits.

    Returns the path written.
    """
    if np.max(counts) <= 65535:
        path = f"{stem}.pgm"
        write_pgm(path, counts)
    else:
        path = f"{stem}.f32"
        write_float_image(path, counts)
    return path


def _pgm_tokens(data, count):
    """First ``count`` header tokens of a PGM and the offset just past them."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos + 1


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _pgm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise DomainError(f"{path}: only binary P5 PGM is supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    arr = np.frombuffer(data, dtype=dtype, count=w * h, offset=offset)
    return arr.reshape(h, w).astype(np.float64)


def write_float_image(path, x):
    x = np.asarray(x, dtype=np.float64)
    h, w = x.shape
    order = "little" if sys.byteorder == "little" else "big"
    with open(path, "wb") as fh:
        fh.write(FLOAT_MAGIC + f" {w} {h} {order}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(x, dtype="=f4").tobytes())


def read_float_image(path):
    with open(path, "rb") as fh:
        header = fh.readline().split()
        if not header or header[0] != FLOAT_MAGIC or len(header) != 4:
            raise DomainError(f"{path}: not a {FLOAT_MAGIC.decode()} file")
        w, h = int(header[1]), int(header[2])
        dtype = np.dtype("<f4" if header[3] == b"little" else ">f4")
        arr = np.frombuffer(fh.read(), dtype=dtype, count=w * h)
    return arr.reshape(h, w).astype(np.float64)


def read_image(path):
    """Read either format, dispatching on the magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(6)
    if magic == FLOAT_MAGIC:
        return read_float_image(path)
    if magic[:2] == b"P5":
        return read_pgm(path)
    raise DomainError(f"{path}: unrecognised image format")


def write_image(path, x):
    """PGM for ``.pgm`` paths, float raster otherwise."""
    if str(path).endswith(".pgm"):
        write_pgm(path, x)
    else:
        write_float_image(path, x)
