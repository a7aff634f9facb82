"""Agreement measures between citation metrics and peer review.

Two perspectives on the same submissions are supported: the size-independent
view compares proportions (PP(top 10%) against PP(4*)) and the size-dependent
view compares totals (P(top 10%) against P(4*)).  Predictions use the
zero-intercept equivalence line ``y_hat = b * x`` where ``b`` is the ratio of
the UoA-wide 4* total to the UoA-wide top-10% total, i.e. how many 4* outputs
one top-10% output is worth.  Agreement is summarised by the Pearson
correlation, the median absolute difference (MAD) and the median absolute
percentage difference (MAPD); MAPD is invariant under per-item positive
scaling, so it is identical for both perspectives whenever the matched and
submitted counts coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .domain import UoaDataset, derive, filter_evaluable
from .errors import ComputationError


class Perspective(str, Enum):
    SIZE_INDEPENDENT = "size_independent"
    SIZE_DEPENDENT = "size_dependent"


@dataclass(frozen=True)
class PairedSeries:
    """Parallel metric (x) and peer-review (y) values with item labels."""

    x: np.ndarray
    y: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if x.size == 0:
            raise ValueError("series must not be empty")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("series contain non-finite values")
        if self.labels and len(self.labels) != x.size:
            raise ValueError("labels length does not match series length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return int(self.x.size)


@dataclass(frozen=True)
class AgreementReport:
    """Agreement between metric and peer review for one UoA and perspective."""

    perspective: Perspective
    b: float
    pearson_r: float
    mad: float
    mapd: float
    n_points: int
    excluded: int


def median(values) -> float:
    """Sample median; the mean of the two central order statistics when even."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("median of empty sequence")
    return float(np.median(arr))


def quantile(values, q: float) -> float:
    """Empirical quantile, linearly interpolated at position (n-1)*q."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("quantile of empty sequence")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return float(np.quantile(arr, q))


def mad(y_hat, y) -> float:
    """Median absolute difference between predictions and observations."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape:
        raise ValueError(f"length mismatch: {y_hat.shape} vs {y.shape}")
    if y.size == 0:
        raise ValueError("mad of empty sequence")
    return float(np.median(np.abs(y_hat - y)))


def mapd(y_hat, y) -> float:
    """Median absolute percentage difference, |y_hat - y| / y per item.

    Items with ``y_hat == y == 0`` contribute 0; a zero observation with a
    nonzero prediction has no defined relative difference and raises.
    """
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y_hat.shape != y.shape:
        raise ValueError(f"length mismatch: {y_hat.shape} vs {y.shape}")
    if y.size == 0:
        raise ValueError("mapd of empty sequence")
    if np.any(y < 0):
        raise ValueError("observations must be nonnegative")
    zero = y == 0.0
    if np.any(zero & (y_hat != 0.0)):
        raise ComputationError(
            "undefined relative difference: observed value 0 with nonzero prediction"
        )
    ratios = np.zeros_like(y)
    np.divide(np.abs(y_hat - y), y, out=ratios, where=~zero)
    return float(np.median(ratios))


def pearson_r(x, y) -> float:
    """Product-moment correlation; raises on degenerate series."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("length mismatch")
    if x.size < 2:
        raise ComputationError("degenerate series: need at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise ComputationError("degenerate series: zero variance")
    r = float(np.dot(dx, dy)) / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def estimate_b(dataset: UoaDataset) -> float:
    """Equivalence slope: total 4* outputs per total top-10% output.

    Computed over evaluable records; the same slope serves both perspectives
    because the per-record size factor cancels.
    """
    evaluable, _ = filter_evaluable(dataset)
    total_4star = sum(r.pp_4star * r.n_outputs for r in evaluable.records)
    total_top10 = sum(r.n_top10 for r in evaluable.records)
    if total_top10 == 0:
        raise ComputationError(
            f"no top-10% publications in UoA {dataset.uoa_id} ({dataset.uoa_name})"
        )
    return total_4star / total_top10


def predict(x, b: float) -> np.ndarray:
    """Metric-implied peer-review values on the zero-intercept line b*x."""
    if b <= 0:
        raise ValueError(f"slope b must be positive, got {b}")
    return b * np.asarray(x, dtype=float)


def paired_series(dataset: UoaDataset, perspective: Perspective) -> PairedSeries:
    """Metric/peer-review series for the evaluable records of one UoA."""
    evaluable, _ = filter_evaluable(dataset)
    derived = [derive(r) for r in evaluable.records]
    labels = tuple(
        f"{r.institution}/{r.submission_label}" if r.submission_label else r.institution
        for r in evaluable.records
    )
    if perspective is Perspective.SIZE_INDEPENDENT:
        x = np.array([d.pp_top10 for d in derived], dtype=float)
        y = np.array([r.pp_4star for r in evaluable.records], dtype=float)
    else:
        x = np.array([d.p_top10 for d in derived], dtype=float)
        y = np.array([d.p_4star for d in derived], dtype=float)
    return PairedSeries(x=x, y=y, labels=labels)


def uoa_coverage(dataset: UoaDataset) -> float:
    """Fraction of all submitted outputs matched in the citation database."""
    total_outputs = sum(r.n_outputs for r in dataset.records)
    if total_outputs == 0:
        return 0.0
    return sum(r.n_matched for r in dataset.records) / total_outputs


def agreement_report(dataset: UoaDataset, perspective: Perspective) -> AgreementReport:
    """Full agreement report for one UoA under one perspective."""
    evaluable, excluded = filter_evaluable(dataset)
    if len(evaluable.records) < 2:
        raise ComputationError(
            f"UoA {dataset.uoa_id}: need at least 2 evaluable records, "
            f"got {len(evaluable.records)}"
        )
    series = paired_series(dataset, perspective)
    b = estimate_b(dataset)
    if b <= 0:
        raise ComputationError(
            f"UoA {dataset.uoa_id}: no 4* outputs, equivalence slope undefined"
        )
    y_hat = predict(series.x, b)
    return AgreementReport(
        perspective=perspective,
        b=b,
        pearson_r=pearson_r(series.x, series.y),
        mad=mad(y_hat, series.y),
        mapd=mapd(y_hat, series.y),
        n_points=len(series),
        excluded=excluded,
    )
