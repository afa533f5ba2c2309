"""Image normalization, SSIM/MSE/MAE, and mean +/- SD aggregation.

SSIM here is computed from whole-image statistics (population variance,
divisor M*N) by default; a mean-pooled sliding-window variant is
available behind ``ssim_windowed`` for comparison but is not used by the
evaluation pipeline.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError, ShapeError
from .images import require_image

METRIC_NAMES = ("ssim", "mse", "mae")


@dataclass(frozen=True)
class SsimParams:
    """Stabilizer constants c1 = (k1*L)^2, c2 = (k2*L)^2."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise ParameterError("k1, k2, and dynamic range must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass
class MetricsRecord:
    case_id: str
    model: str
    ssim: float
    mse: float
    mae: float


@dataclass
class SummaryRow:
    model: str
    metric: str
    mean: float
    sd: float


@dataclass
class MetricsReport:
    records: list[MetricsRecord]
    summary: list[SummaryRow] = field(default_factory=list)

    def summary_for(self, model: str, metric: str) -> SummaryRow:
        for row in self.summary:
            if row.model == model and row.metric == metric:
                return row
        raise KeyError((model, metric))


def normalize01(img: np.ndarray, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Affine map of pixel values onto [0, 1].

    By default the image's own min/max are used; pass lo/hi to normalize
    against a shared range instead.  A constant image maps to all zeros.
    """
    a = require_image(img)
    lo = float(a.min()) if lo is None else float(lo)
    hi = float(a.max()) if hi is None else float(hi)
    if hi <= lo:
        return np.zeros_like(a)
    return (a - lo) / (hi - lo)


def _check_pair(gt: np.ndarray, pred: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = require_image(gt, "gt")
    b = require_image(pred, "pred")
    if a.shape != b.shape:
        raise ShapeError(f"image dims differ: {a.shape} vs {b.shape}")
    return a, b


def mae(gt: np.ndarray, pred: np.ndarray) -> float:
    a, b = _check_pair(gt, pred)
    return float(np.abs(a - b).mean())


def mse(gt: np.ndarray, pred: np.ndarray) -> float:
    a, b = _check_pair(gt, pred)
    return float(((a - b) ** 2).mean())


def ssim_global(a: np.ndarray, b: np.ndarray, params: SsimParams = SsimParams()) -> float:
    """Single SSIM value over whole-image mean/variance/covariance."""
    x, y = _check_pair(a, b)
    ux = x.mean()
    uy = y.mean()
    vx = (x * x).mean() - ux * ux
    vy = (y * y).mean() - uy * uy
    cov = (x * y).mean() - ux * uy
    c1, c2 = params.c1, params.c2
    return float(
        ((2.0 * ux * uy + c1) * (2.0 * cov + c2))
        / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
    )


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


def ssim_windowed(
    a: np.ndarray,
    b: np.ndarray,
    params: SsimParams = SsimParams(),
    window: int = 11,
    sigma: float = 1.5,
) -> float:
    """Mean-pooled SSIM over Gaussian-weighted sliding windows."""
    x, y = _check_pair(a, b)
    if min(x.shape) < window:
        raise ParameterError(f"image smaller than the {window}x{window} window")
    k = _gaussian_kernel(window, sigma)
    from numpy.lib.stride_tricks import sliding_window_view

    wx = sliding_window_view(x, (window, window))
    wy = sliding_window_view(y, (window, window))
    ux = np.tensordot(wx, k, axes=([2, 3], [0, 1]))
    uy = np.tensordot(wy, k, axes=([2, 3], [0, 1]))
    uxx = np.tensordot(wx * wx, k, axes=([2, 3], [0, 1]))
    uyy = np.tensordot(wy * wy, k, axes=([2, 3], [0, 1]))
    uxy = np.tensordot(wx * wy, k, axes=([2, 3], [0, 1]))
    vx = uxx - ux * ux
    vy = uyy - uy * uy
    cov = uxy - ux * uy
    c1, c2 = params.c1, params.c2
    ssim_map = ((2 * ux * uy + c1) * (2 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
    return float(ssim_map.mean())


def aggregate(records: list[MetricsRecord]) -> MetricsReport:
    """Per-model mean and sample SD (n-1 divisor) for each metric."""
    if not records:
        raise DataError("no metric records to aggregate")
    models = sorted({r.model for r in records})
    summary: list[SummaryRow] = []
    for model in models:
        rows = [r for r in records if r.model == model]
        if len(rows) < 2:
            raise DataError(f"model {model!r} has {len(rows)} record(s); need >= 2 for SD")
        for metric in METRIC_NAMES:
            vals = np.array([getattr(r, metric) for r in rows], dtype=np.float64)
            summary.append(
                SummaryRow(model, metric, float(vals.mean()), float(vals.std(ddof=1)))
            )
    return MetricsReport(records=list(records), summary=summary)


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def write_per_case_csv(records: list[MetricsRecord], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case_id", "model", "ssim", "mse", "mae"])
        for r in records:
            w.writerow([r.case_id, r.model, _fmt(r.ssim), _fmt(r.mse), _fmt(r.mae)])


def write_summary_csv(report: MetricsReport, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["model", "metric", "mean", "sd"])
        for row in report.summary:
            w.writerow([row.model, row.metric, _fmt(row.mean), _fmt(row.sd)])
