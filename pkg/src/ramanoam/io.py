"""Artifact formats: 16-bit PGM images and raw complex fields, written atomically."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from ramanoam.fields import ComplexField2D, Grid2D


def atomic_write(path, data: bytes | str):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def pgm_bytes(intensity) -> bytes:
    """Binary P5 image, 16-bit big-endian, linear in intensity over its maximum."""
    img = np.asarray(intensity, float)
    top = img.max()
    scaled = np.zeros_like(img) if top <= 0 else np.clip(img / top, 0.0, 1.0)
    pix = np.rint(scaled * 65535).astype(">u2")
    ny, nx = img.shape
    return f"P5\n{nx} {ny}\n65535\n".encode("ascii") + pix.tobytes()


def write_pgm(path, intensity):
    return atomic_write(path, pgm_bytes(intensity))


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    pos += 1  # single whitespace after maxval
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM")
    nx, ny, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(data, dtype=dtype, count=nx * ny, offset=pos).reshape(ny, nx)


def field_bytes(field: ComplexField2D) -> bytes:
    """Text header ``nx ny dx_mm dy_mm wavelength_nm`` then little-endian float64 (re, im) pairs."""
    g = field.grid
    header = f"{g.nx} {g.ny} {g.dx!r} {g.dy!r} {field.wavelength * 1e6!r}\n"
    return header.encode("ascii") + field.values.astype("<c16").tobytes()


def write_field(path, field: ComplexField2D):
    return atomic_write(path, field_bytes(field))


def read_field(path) -> ComplexField2D:
    data = Path(path).read_bytes()
    nl = data.index(b"\n")
    nx, ny, dx, dy, wl_nm = data[:nl].decode("ascii").split()
    nx, ny = int(nx), int(ny)
    values = np.frombuffer(data, dtype="<c16", count=nx * ny, offset=nl + 1).reshape(ny, nx)
    return ComplexField2D(Grid2D(nx, ny, float(dx), float(dy)), values.astype(np.complex128),
                          float(wl_nm) * 1e-6)
