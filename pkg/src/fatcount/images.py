"""Coronal-plane image containers and PFM/PGM codecs.

FloatImage is a 2D float64 numpy array of shape (height, width); row index
r corresponds to the z voxel index of the source volume (r = 0 is the
image bottom).  BinaryImage is the bool analogue.  Neither may hold
NaN/Inf.

PFM (grayscale): ``Pf\\n``, ``width height\\n``, ``-1.0\\n`` (negative
scale = little-endian), then width*height float32, bottom row first —
i.e. array row 0 is written first.  PGM: binary ``P5`` with maxval 255
and a 0/255 payload; PGM rasters run top-to-bottom, so rows are written
in reverse to keep the displayed orientation consistent with PFM.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import FormatError, ParameterError, ShapeError, SizeMismatchError

PFM_MAGIC = b"Pf\n"
PGM_MAGIC = b"P5\n"


def require_image(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate a FloatImage: 2D, finite, float64."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2 or min(a.shape) < 1:
        raise ShapeError(f"{name} must be 2D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ParameterError(f"{name} holds NaN/Inf")
    return a


def require_binary(img: np.ndarray, name: str = "mask image") -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or min(a.shape) < 1:
        raise ShapeError(f"{name} must be 2D, got shape {a.shape}")
    return a.astype(bool)


def _read_line(f, path: str) -> bytes:
    line = f.readline(256)
    if not line.endswith(b"\n"):
        raise FormatError(f"{path}: unterminated header line")
    return line[:-1]


def save_pfm(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a grayscale little-endian PFM; values are stored as float32."""
    a = require_image(img)
    h, w = a.shape
    with open(path, "wb") as f:
        f.write(PFM_MAGIC)
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(a.astype("<f4").tobytes())


def load_pfm(path: str | os.PathLike) -> np.ndarray:
    path = os.fspath(path)
    with open(path, "rb") as f:
        magic = f.read(3)
        if magic != PFM_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {PFM_MAGIC!r}")
        dims = _read_line(f, path).split(b" ")
        if len(dims) != 2:
            raise FormatError(f"{path}: dimensions line must hold 2 fields")
        try:
            w, h = int(dims[0]), int(dims[1])
        except ValueError:
            raise FormatError(f"{path}: unparsable dimensions") from None
        if w < 1 or h < 1:
            raise FormatError(f"{path}: dims must be >= 1")
        try:
            scale = float(_read_line(f, path))
        except ValueError:
            raise FormatError(f"{path}: unparsable scale line") from None
        if scale >= 0:
            raise FormatError(f"{path}: big-endian PFM not supported")
        expected = w * h * 4
        payload = f.read(expected + 1)
    if len(payload) != expected:
        raise SizeMismatchError(f"{path}: payload holds {len(payload)} bytes, expected {expected}")
    a = np.frombuffer(payload, dtype="<f4").reshape(h, w).astype(np.float64)
    if not np.isfinite(a).all():
        raise FormatError(f"{path}: non-finite pixel values")
    return a


def save_pgm(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a binary mask as an 8-bit PGM with values 0/255."""
    a = require_binary(img)
    h, w = a.shape
    payload = np.where(a[::-1], np.uint8(255), np.uint8(0))
    with open(path, "wb") as f:
        f.write(PGM_MAGIC)
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"255\n")
        f.write(payload.tobytes())


def load_pgm(path: str | os.PathLike) -> np.ndarray:
    path = os.fspath(path)
    with open(path, "rb") as f:
        magic = f.read(3)
        if magic != PGM_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {PGM_MAGIC!r}")
        dims = _read_line(f, path).split(b" ")
        if len(dims) != 2:
            raise FormatError(f"{path}: dimensions line must hold 2 fields")
        try:
            w, h = int(dims[0]), int(dims[1])
        except ValueError:
            raise FormatError(f"{path}: unparsable dimensions") from None
        if w < 1 or h < 1:
            raise FormatError(f"{path}: dims must be >= 1")
        maxval = _read_line(f, path)
        if maxval != b"255":
            raise FormatError(f"{path}: maxval must be 255, got {maxval!r}")
        expected = w * h
        payload = f.read(expected + 1)
    if len(payload) != expected:
        raise SizeMismatchError(f"{path}: payload holds {len(payload)} bytes, expected {expected}")
    a = np.frombuffer(payload, dtype=np.uint8).reshape(h, w)
    if not np.isin(a, (0, 255)).all():
        raise FormatError(f"{path}: payload must be 0/255")
    return (a[::-1] == 255).copy()
