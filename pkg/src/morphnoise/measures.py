"""
Noise measures on difference images.

``measure_m`` weights the histogram of a difference image by intensity
and sums it, which is the same number as the image volume. The relative
measure ``measure_mstar`` scores one filter output against the noisy
input while using the disagreement between two candidate filters as a
weight, over a family of openings r = 0..r_max:

    A_r(k) = k * H_r(k) of |noisy - candidate|
    B_r(k) = k * H_r(k) of |candidate - other|

Two aggregations are available. ``elementwise_volume`` multiplies the
weighted diagrams cell by cell and sums every cell; ``per_r_scalar_product``
multiplies the per-r totals (sum_k A_r(k)) * (sum_k B_r(k)) and sums over r.
The two generally give different numbers; the first is the default.

Totals are exact Python ints, so nothing overflows for any image size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from morphnoise.diagrams import DEFAULT_R_MAX, si_diagram
from morphnoise.image import abs_diff, as_image, histogram

__all__ = [
    "AGGREGATIONS",
    "MeasureReport",
    "measure_m",
    "measure_m_family",
    "measure_mstar",
    "measure_report",
    "mstar_from_weighted",
    "weighted_diagram",
]

AGGREGATIONS = ("elementwise_volume", "per_r_scalar_product")

_K = np.arange(256, dtype=np.int64)


@dataclass(frozen=True)
class MeasureReport:
    m_scalar: int
    m_per_r: tuple[int, ...]
    mstar: int
    aggregation: str


def measure_m(diff) -> int:
    """Intensity-weighted histogram sum of a difference image."""
    return int((_K * histogram(diff)).sum())


def weighted_diagram(diff, r_max: int = DEFAULT_R_MAX, shape: str = "square") -> np.ndarray:
    """``k * H_r(k)`` for openings r = 0..r_max, shape (r_max + 1, 256)."""
    return si_diagram(diff, r_max, shape, cumulative=False).weighted()


def measure_m_family(diff, r_max: int = DEFAULT_R_MAX, shape: str = "square") -> list[int]:
    """``measure_m`` of ``diff`` opened at each size r = 0..r_max."""
    return [int(v) for v in weighted_diagram(diff, r_max, shape).sum(axis=1)]


def mstar_from_weighted(a: np.ndarray, b: np.ndarray, aggregation: str = "elementwise_volume") -> int:
    """Combine two weighted diagrams into M*; see the module docstring."""
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {aggregation!r}; expected one of {AGGREGATIONS}")
    if a.shape != b.shape:
        raise ValueError(f"weighted diagrams differ in shape: {a.shape} vs {b.shape}")
    rows_a, rows_b = a.tolist(), b.tolist()
    if aggregation == "elementwise_volume":
        return sum(x * y for ra, rb in zip(rows_a, rows_b) for x, y in zip(ra, rb))
    return sum(sum(ra) * sum(rb) for ra, rb in zip(rows_a, rows_b))


def measure_mstar(
    n,
    ft_out,
    other_out,
    r_max: int = DEFAULT_R_MAX,
    shape: str = "square",
    aggregation: str = "elementwise_volume",
) -> int:
    """Relative noise measure of ``ft_out`` given the noisy input ``n``
    and the competing filter output ``other_out``. Lower is better."""
    n, ft_out, other_out = as_image(n), as_image(ft_out), as_image(other_out)
    if not n.shape == ft_out.shape == other_out.shape:
        raise ValueError(f"dimension mismatch: {n.shape}, {ft_out.shape}, {other_out.shape}")
    a = weighted_diagram(abs_diff(n, ft_out), r_max, shape)
    b = weighted_diagram(abs_diff(ft_out, other_out), r_max, shape)
    return mstar_from_weighted(a, b, aggregation)


def measure_report(
    n,
    ft_out,
    other_out,
    r_max: int = DEFAULT_R_MAX,
    shape: str = "square",
    aggregation: str = "elementwise_volume",
) -> MeasureReport:
    a = weighted_diagram(abs_diff(n, ft_out), r_max, shape)
    b = weighted_diagram(abs_diff(ft_out, other_out), r_max, shape)
    per_r = tuple(int(v) for v in a.sum(axis=1))
    return MeasureReport(per_r[0], per_r, mstar_from_weighted(a, b, aggregation), aggregation)
