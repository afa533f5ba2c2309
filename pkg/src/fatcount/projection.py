"""Deterministic coronal-plane projections of CT volumes.

All projections integrate along the anterior-posterior (y) axis and
return images indexed [z, x].  The weighted ray sum (CWRS) and the fat
count image operate in voxel units; only the Beer-Lambert pseudo
radiograph uses physical spacing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .volume import CtVolume, MaskVolume

#: Attenuation slope per y voxel index in the weighted ray sum.
DEFAULT_ALPHA = 0.0018
#: Voxels strictly below this HU value contribute nothing to the ray sum.
DEFAULT_EXCLUDE_BELOW = -1000.0


@dataclass(frozen=True)
class ProjectionParams:
    """Weighted-ray-sum parameters.

    ``n`` is the denominator (voxel count along y); leave it None to take
    the volume's own ny.  The attenuation weight 1 - alpha*y must stay
    non-negative at the last voxel.
    """

    alpha: float = DEFAULT_ALPHA
    exclude_below: float = DEFAULT_EXCLUDE_BELOW
    n: int | None = None

    def resolve_n(self, vol: CtVolume) -> int:
        if self.n is None:
            return vol.ny
        if self.n != vol.ny:
            raise ParameterError(f"params declare N={self.n} but volume has ny={vol.ny}")
        return self.n

    def validate_for(self, n: int) -> None:
        if 1.0 - self.alpha * n < 0.0:
            raise ParameterError(
                f"attenuation 1 - alpha*N is negative at the last voxel (alpha={self.alpha}, N={n})"
            )


def cwrs(vol: CtVolume, params: ProjectionParams = ProjectionParams()) -> np.ndarray:
    """Attenuation-weighted ray sum along y.

    I[z, x] = sum_{y=1..N} HU[z, y-1, x] * (1 - alpha*y) / N, where voxels
    strictly below ``exclude_below`` contribute nothing and N stays fixed.
    """
    n = params.resolve_n(vol)
    params.validate_for(n)
    v = vol.voxels.astype(np.float64)
    included = v >= params.exclude_below
    weights = 1.0 - params.alpha * np.arange(1, n + 1, dtype=np.float64)
    terms = v * included * weights[None, :, None]
    return terms.sum(axis=1) / n


def pfci_gt(fat: MaskVolume) -> np.ndarray:
    """Fat count image: per-pixel count of fat voxels along y."""
    return fat.bits.sum(axis=1, dtype=np.int64).astype(np.float64)


def roi_coronal_projection(roi: MaskVolume) -> np.ndarray:
    """Binary coronal silhouette: true where any voxel along y is set."""
    return roi.bits.any(axis=1)


def pseudo_cxr(vol: CtVolume, mu_air: float = 0.0, mu_water: float = 0.02) -> np.ndarray:
    """Beer-Lambert transmission image used as a radiograph surrogate.

    mu(h) = max(0, mu_air + (mu_water - mu_air) * (h + 1000) / 1000), in
    1/mm with h in HU; pixel = exp(-sum_y mu * spacing_y).  Values lie in
    (0, 1].
    """
    if not (0.0 <= mu_air < mu_water):
        raise ParameterError(
            f"need 0 <= mu_air < mu_water, got mu_air={mu_air}, mu_water={mu_water}"
        )
    h = vol.voxels.astype(np.float64)
    mu = np.maximum(0.0, mu_air + (mu_water - mu_air) * (h + 1000.0) / 1000.0)
    optical_depth = mu.sum(axis=1) * vol.spacing[1]
    return np.exp(-optical_depth)
