"""Procedural chest phantoms with exactly known pericardial fat content.

Each phantom is a thorax ellipsoid (soft tissue) containing two lungs, a
spine rod, and a heart ellipsoid wrapped in a fat shell.  The shell is
rasterized on voxel centers and painted last, and noise never touches
the pericardial region, so the per-column fat depth table recorded in
the PhantomSpec matches the extracted fat mask exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError
from .images import save_pfm
from .projection import pseudo_cxr
from .volume import HU_MAX, HU_MIN, FAT_WINDOW, CtVolume, MaskVolume, save_ctv, save_mask

Range = tuple[float, float]


@dataclass(frozen=True)
class PhantomParams:
    """Grid, tissue HU values, and jitter ranges for the generator.

    Semi-axis and offset ranges are fractions of the grid dimension on
    the matching axis; thickness and margin are in voxels.
    """

    nx: int = 64
    ny: int = 64
    nz: int = 64
    spacing: tuple[float, float, float] = (4.0, 4.0, 4.0)

    lung_hu: int = -850
    soft_hu: int = 40
    fat_hu: int = -100
    spine_hu: int = 700
    background_hu: int = -2048
    noise_sd: float = 10.0

    thorax_semi_x: Range = (0.38, 0.44)
    thorax_semi_y: Range = (0.30, 0.36)
    thorax_semi_z: Range = (0.40, 0.47)
    lung_semi_x: Range = (0.11, 0.14)
    lung_semi_y: Range = (0.18, 0.24)
    lung_semi_z: Range = (0.28, 0.34)
    lung_offset_x: Range = (0.19, 0.23)
    heart_semi_x: Range = (0.12, 0.16)
    heart_semi_y: Range = (0.12, 0.16)
    heart_semi_z: Range = (0.15, 0.19)
    heart_offset_x: Range = (0.00, 0.05)
    heart_offset_y: Range = (-0.10, -0.03)
    heart_offset_z: Range = (-0.06, 0.02)
    spine_radius: Range = (0.05, 0.07)
    spine_offset_y: Range = (0.24, 0.29)
    fat_thickness: Range = (1.2, 2.6)
    roi_margin: float = 2.0

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 8:
            raise ParameterError("phantom grid must be at least 8 voxels per axis")
        if not (FAT_WINDOW.lo <= self.fat_hu <= FAT_WINDOW.hi):
            raise ParameterError(f"fat shell HU {self.fat_hu} outside the fat window")
        if self.background_hu >= -1000:
            raise ParameterError("background HU must be below -1000")
        for hu in (self.lung_hu, self.soft_hu, self.fat_hu, self.spine_hu, self.background_hu):
            if not (HU_MIN <= hu <= HU_MAX):
                raise ParameterError(f"tissue HU {hu} outside the signed 12-bit envelope")
        if self.noise_sd < 0:
            raise ParameterError("noise SD must be >= 0")
        if self.roi_margin < 1.0:
            raise ParameterError("ROI margin must be >= 1 voxel")


@dataclass(eq=False)
class PhantomSpec:
    """Realized geometry plus the analytic per-column fat depth table."""

    seed: int
    geometry: dict[str, float]
    fat_table: np.ndarray  # (nz, nx) float64, entries in [0, ny]


def _draw(rng: np.random.Generator, r: Range) -> float:
    return float(rng.uniform(r[0], r[1]))


def _ellipsoid(dims_zyx, center_xyz, semi_xyz) -> np.ndarray:
    nz, ny, nx = dims_zyx
    cx, cy, cz = center_xyz
    ax, ay, az = semi_xyz
    z, y, x = np.ogrid[0:nz, 0:ny, 0:nx]
    return ((x - cx) / ax) ** 2 + ((y - cy) / ay) ** 2 + ((z - cz) / az) ** 2 <= 1.0


def _cylinder_z(dims_zyx, center_xy, radius) -> np.ndarray:
    nz, ny, nx = dims_zyx
    cx, cy = center_xy
    y, x = np.ogrid[0:ny, 0:nx]
    disk = (x - cx) ** 2 + (y - cy) ** 2 <= radius**2
    return np.broadcast_to(disk, dims_zyx).copy()


def generate_phantom(
    seed: int, params: PhantomParams = PhantomParams()
) -> tuple[CtVolume, MaskVolume, PhantomSpec]:
    """Deterministically build one phantom volume and its pericardial ROI."""
    rng = np.random.default_rng(seed)
    nx, ny, nz = params.nx, params.ny, params.nz
    dims = (nz, ny, nx)
    cx0, cy0, cz0 = (nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0

    thorax_semi = (
        _draw(rng, params.thorax_semi_x) * nx,
        _draw(rng, params.thorax_semi_y) * ny,
        _draw(rng, params.thorax_semi_z) * nz,
    )
    lung_semi = (
        _draw(rng, params.lung_semi_x) * nx,
        _draw(rng, params.lung_semi_y) * ny,
        _draw(rng, params.lung_semi_z) * nz,
    )
    lung_dx = _draw(rng, params.lung_offset_x) * nx
    spine_r = _draw(rng, params.spine_radius) * nx
    spine_dy = _draw(rng, params.spine_offset_y) * ny
    heart_semi = (
        _draw(rng, params.heart_semi_x) * nx,
        _draw(rng, params.heart_semi_y) * ny,
        _draw(rng, params.heart_semi_z) * nz,
    )
    heart_center = (
        cx0 + _draw(rng, params.heart_offset_x) * nx,
        cy0 + _draw(rng, params.heart_offset_y) * ny,
        cz0 + _draw(rng, params.heart_offset_z) * nz,
    )
    thickness = _draw(rng, params.fat_thickness)

    outer_semi = tuple(s + thickness for s in heart_semi)
    roi_semi = tuple(s + params.roi_margin for s in outer_semi)

    # Fit checks: thorax and the ROI ellipsoid must stay inside the grid.
    for center, semi, what in (
        ((cx0, cy0, cz0), thorax_semi, "thorax"),
        (heart_center, roi_semi, "pericardial region"),
    ):
        for c, s, n in zip(center, semi, (nx, ny, nz)):
            if c - s < 0.5 or c + s > n - 1.5:
                raise ParameterError(f"{what} does not fit the {n}-voxel grid")

    vol = np.full(dims, params.background_hu, dtype=np.int16)
    thorax = _ellipsoid(dims, (cx0, cy0, cz0), thorax_semi)
    vol[thorax] = params.soft_hu
    for sign in (-1.0, 1.0):
        lung = _ellipsoid(dims, (cx0 + sign * lung_dx, cy0, cz0), lung_semi)
        vol[lung & thorax] = params.lung_hu
    spine = _cylinder_z(dims, (cx0, cy0 + spine_dy), spine_r)
    vol[spine & thorax] = params.spine_hu
    outer = _ellipsoid(dims, heart_center, outer_semi)
    inner = _ellipsoid(dims, heart_center, heart_semi)
    vol[outer] = params.fat_hu
    vol[inner] = params.soft_hu

    shell = outer & ~inner
    roi = _ellipsoid(dims, heart_center, roi_semi)

    if params.noise_sd > 0:
        noise = rng.normal(0.0, params.noise_sd, size=dims)
        noisy = vol.astype(np.float64) + noise * ~roi
        vol = np.rint(np.clip(noisy, HU_MIN, HU_MAX)).astype(np.int16)

    geometry = {
        "thorax_semi_x": thorax_semi[0],
        "thorax_semi_y": thorax_semi[1],
        "thorax_semi_z": thorax_semi[2],
        "lung_semi_x": lung_semi[0],
        "lung_semi_y": lung_semi[1],
        "lung_semi_z": lung_semi[2],
        "lung_offset_x": lung_dx,
        "spine_radius": spine_r,
        "spine_offset_y": spine_dy,
        "heart_center_x": heart_center[0],
        "heart_center_y": heart_center[1],
        "heart_center_z": heart_center[2],
        "heart_semi_x": heart_semi[0],
        "heart_semi_y": heart_semi[1],
        "heart_semi_z": heart_semi[2],
        "fat_thickness": thickness,
        "roi_margin": params.roi_margin,
    }
    fat_table = shell.sum(axis=1, dtype=np.int64).astype(np.float64)
    spec = PhantomSpec(seed=seed, geometry=geometry, fat_table=fat_table)
    return CtVolume(vol, params.spacing), MaskVolume(roi, params.spacing), spec


@dataclass
class CaseRecord:
    case_id: str
    volume: str
    roi: str
    cxr: str | None
    paired: bool


@dataclass
class CorpusManifest:
    root: str
    cases: list[CaseRecord]
    seed: int | None = None

    def path(self, name: str) -> str:
        return os.path.join(self.root, name)

    @property
    def paired_ids(self) -> list[str]:
        return [c.case_id for c in self.cases if c.paired]

    @property
    def unpaired_ids(self) -> list[str]:
        return [c.case_id for c in self.cases if not c.paired]

    def case(self, case_id: str) -> CaseRecord:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise DataError(f"case {case_id!r} not in manifest")


MANIFEST_NAME = "manifest.json"


def generate_corpus(
    n_total: int,
    n_paired: int,
    seed: int,
    params: PhantomParams,
    out_dir: str | os.PathLike,
    mu_air: float = 0.0,
    mu_water: float = 0.02,
) -> CorpusManifest:
    """Write n_total phantom cases (the first n_paired get pseudo radiographs)."""
    if n_total < 0 or n_paired < 0 or n_paired > n_total:
        raise ParameterError(f"need 0 <= n_paired <= n_total, got {n_paired} > {n_total}")
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    cases: list[CaseRecord] = []
    for i in range(n_total):
        case_seed = int(rng.integers(0, 2**62))
        vol, roi, _ = generate_phantom(case_seed, params)
        case_id = f"case_{i:04d}"
        vol_name = f"{case_id}.ctv"
        roi_name = f"{case_id}.ctm"
        save_ctv(vol, os.path.join(out_dir, vol_name))
        save_mask(roi, os.path.join(out_dir, roi_name))
        cxr_name = None
        if i < n_paired:
            cxr_name = f"{case_id}_cxr.pfm"
            save_pfm(pseudo_cxr(vol, mu_air, mu_water), os.path.join(out_dir, cxr_name))
        cases.append(CaseRecord(case_id, vol_name, roi_name, cxr_name, i < n_paired))
    manifest = CorpusManifest(root=out_dir, cases=cases, seed=seed)
    save_manifest(manifest)
    return manifest


def save_manifest(manifest: CorpusManifest) -> str:
    records = [
        {
            "case_id": c.case_id,
            "volume": c.volume,
            "roi": c.roi,
            "cxr": c.cxr,
            "paired": c.paired,
        }
        for c in manifest.cases
    ]
    path = manifest.path(MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records, f, indent=2)
        f.write("\n")
    return path


def load_manifest(path: str | os.PathLike) -> CorpusManifest:
    """Read a manifest file, checking id uniqueness and file existence."""
    path = os.fspath(path)
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(path):
        raise DataError(f"manifest not found: {path}")
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    if not isinstance(records, list):
        raise DataError(f"{path}: manifest must be a JSON array")
    root = os.path.dirname(path)
    cases = [
        CaseRecord(r["case_id"], r["volume"], r["roi"], r.get("cxr"), bool(r["paired"]))
        for r in records
    ]
    ids = [c.case_id for c in cases]
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate case ids")
    for c in cases:
        for name in (c.volume, c.roi, c.cxr):
            if name is not None and not os.path.isfile(os.path.join(root, name)):
                raise DataError(f"{path}: missing file {name} for {c.case_id}")
    return CorpusManifest(root=root, cases=cases)
