"""CT volume data model, CTV1/CTM1 file I/O, and HU-window fat extraction.

Conventions
-----------
Axes: x = left-right, y = anterior-posterior (AP), z = cranio-caudal.
Arrays are stored as shape (nz, ny, nx) in C order, so x is the
fastest-varying index, matching the on-disk layout.

CTV1 volume file:
    ``CTV1\\n``
    ``nx ny nz sx sy sz\\n``   (three decimal ints, three decimal floats)
    nx*ny*nz little-endian int16 voxels, x fastest, then y, then z.

CTM1 mask file: identical layout with magic ``CTM1`` and a uint8 payload
of 0/1 per voxel.  Both loads are lossless: load(save(v)) == v bitwise.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, HuRangeError, ParameterError, ShapeError, SizeMismatchError

HU_MIN = -4096
HU_MAX = 4095

CTV_MAGIC = b"CTV1\n"
CTM_MAGIC = b"CTM1\n"


@dataclass(frozen=True)
class HuRange:
    """Inclusive HU window [lo, hi]."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ParameterError(f"HU window lo={self.lo} exceeds hi={self.hi}")


#: Default window for pericardial fat voxels.
FAT_WINDOW = HuRange(-190, -30)


@dataclass(eq=False)
class CtVolume:
    """Immutable 3D grid of signed HU values plus per-axis spacing (mm)."""

    voxels: np.ndarray  # (nz, ny, nx) int16
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        v = np.ascontiguousarray(self.voxels)
        if v.ndim != 3 or min(v.shape) < 1:
            raise ShapeError(f"volume must be 3D with all dims >= 1, got shape {v.shape}")
        if not np.issubdtype(v.dtype, np.integer):
            raise ParameterError("voxels must be integers (HU)")
        if int(v.min()) < HU_MIN or int(v.max()) > HU_MAX:
            raise HuRangeError("voxel values outside [-4096, 4095]")
        v = v.astype(np.int16)
        if any(s <= 0 for s in self.spacing):
            raise ParameterError("spacing must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "voxels", v)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def nx(self) -> int:
        return self.voxels.shape[2]

    @property
    def ny(self) -> int:
        return self.voxels.shape[1]

    @property
    def nz(self) -> int:
        return self.voxels.shape[0]

@dataclass(eq=False)
class MaskVolume:
    """Boolean voxel grid with the same layout as CtVolume.

    Used both for the pericardial region of interest and for extracted
    fat masks.
    """

    bits: np.ndarray  # (nz, ny, nx) bool
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        b = np.ascontiguousarray(self.bits)
        if b.ndim != 3 or min(b.shape) < 1:
            raise ShapeError(f"mask must be 3D with all dims >= 1, got shape {b.shape}")
        if b.dtype != np.bool_:
            if b.size and not np.isin(b, (0, 1)).all():
                raise FormatError("mask payload must be 0/1")
            b = b.astype(bool)
        b.flags.writeable = False
        object.__setattr__(self, "bits", b)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def nx(self) -> int:
        return self.bits.shape[2]

    @property
    def ny(self) -> int:
        return self.bits.shape[1]

    @property
    def nz(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def full(cls, like: "CtVolume") -> "MaskVolume":
        return cls(np.ones(like.voxels.shape, dtype=bool), like.spacing)

    @classmethod
    def empty(cls, like: "CtVolume") -> "MaskVolume":
        return cls(np.zeros(like.voxels.shape, dtype=bool), like.spacing)


def _read_header(f, magic: bytes, path: str) -> tuple[int, int, int, float, float, float]:
    got = f.read(len(magic))
    if got != magic:
        raise FormatError(f"{path}: bad magic {got!r}, expected {magic!r}")
    line = f.readline(256)
    if not line.endswith(b"\n"):
        raise FormatError(f"{path}: unterminated header line")
    tokens = line[:-1].decode("ascii", errors="replace").split(" ")
    if len(tokens) != 6:
        raise FormatError(f"{path}: header must hold 6 fields, got {len(tokens)}")
    try:
        nx, ny, nz = (int(t) for t in tokens[:3])
        sx, sy, sz = (float(t) for t in tokens[3:])
    except ValueError as e:
        raise FormatError(f"{path}: unparsable header: {e}") from None
    if min(nx, ny, nz) < 1:
        raise FormatError(f"{path}: dims must be >= 1, got {nx}x{ny}x{nz}")
    if min(sx, sy, sz) <= 0:
        raise FormatError(f"{path}: spacing must be positive")
    return nx, ny, nz, sx, sy, sz


def _header_bytes(magic: bytes, shape_xyz: tuple[int, int, int], spacing) -> bytes:
    nx, ny, nz = shape_xyz
    sx, sy, sz = (repr(float(s)) for s in spacing)
    return magic + f"{nx} {ny} {nz} {sx} {sy} {sz}\n".encode("ascii")


def load_ctv(path: str | os.PathLike) -> CtVolume:
    """Read a CTV1 volume file."""
    path = os.fspath(path)
    with open(path, "rb") as f:
        nx, ny, nz, sx, sy, sz = _read_header(f, CTV_MAGIC, path)
        expected = nx * ny * nz * 2
        payload = f.read(expected + 1)
    if len(payload) != expected:
        raise SizeMismatchError(
            f"{path}: payload holds {min(len(payload), expected + 1)} bytes, expected {expected}"
        )
    voxels = np.frombuffer(payload, dtype="<i2").reshape(nz, ny, nx)
    if int(voxels.min()) < HU_MIN or int(voxels.max()) > HU_MAX:
        raise HuRangeError(f"{path}: voxel outside [{HU_MIN}, {HU_MAX}] HU")
    return CtVolume(voxels.astype(np.int16), (sx, sy, sz))


def save_ctv(vol: CtVolume, path: str | os.PathLike) -> None:
    """Write a CTV1 volume file; load_ctv(save_ctv(v)) reproduces v exactly."""
    with open(path, "wb") as f:
        f.write(_header_bytes(CTV_MAGIC, (vol.nx, vol.ny, vol.nz), vol.spacing))
        f.write(vol.voxels.astype("<i2").tobytes())


def load_mask(path: str | os.PathLike) -> MaskVolume:
    """Read a CTM1 mask file (ROI or fat mask)."""
    path = os.fspath(path)
    with open(path, "rb") as f:
        nx, ny, nz, sx, sy, sz = _read_header(f, CTM_MAGIC, path)
        expected = nx * ny * nz
        payload = f.read(expected + 1)
    if len(payload) != expected:
        raise SizeMismatchError(
            f"{path}: payload holds {min(len(payload), expected + 1)} bytes, expected {expected}"
        )
    bits = np.frombuffer(payload, dtype=np.uint8).reshape(nz, ny, nx)
    if bits.max(initial=0) > 1:
        raise FormatError(f"{path}: mask payload must be 0/1")
    return MaskVolume(bits.astype(bool), (sx, sy, sz))


def save_mask(mask: MaskVolume, path: str | os.PathLike) -> None:
    with open(path, "wb") as f:
        f.write(_header_bytes(CTM_MAGIC, (mask.nx, mask.ny, mask.nz), mask.spacing))
        f.write(mask.bits.astype(np.uint8).tobytes())


def extract_fat_mask(vol: CtVolume, roi: MaskVolume, window: HuRange = FAT_WINDOW) -> MaskVolume:
    """Voxels inside the ROI whose HU lies in the (inclusive) window."""
    if vol.voxels.shape != roi.bits.shape:
        raise ShapeError(
            f"ROI dims {roi.bits.shape} do not match volume dims {vol.voxels.shape}"
        )
    v = vol.voxels
    bits = roi.bits & (v >= window.lo) & (v <= window.hi)
    return MaskVolume(bits, vol.spacing)
