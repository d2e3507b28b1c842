"""
Granulometries and Size/Intensity (SI) diagrams.

An SI diagram stacks the grey-level histogram of an image opened (or
closed) with structuring elements of size r = 0..r_max. Row ``r`` of
``cells`` holds the histogram at size r; the cumulative variant holds
its running sum over intensities instead. Rendered diagrams put r on the
horizontal axis and intensity k on the vertical axis, origin top-left.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from morphnoise.image import as_image, histogram
from morphnoise.morphology import StructuringElement, close, open

__all__ = [
    "DEFAULT_R_MAX",
    "SIDiagram",
    "closing_sequence",
    "export_csv",
    "load_csv",
    "opening_sequence",
    "render_si",
    "si_diagram",
]

DEFAULT_R_MAX = 15


@dataclass(frozen=True, eq=False)
class SIDiagram:
    """(r_max + 1) x 256 matrix of per-size histogram counts."""

    cells: np.ndarray
    cumulative: bool
    source_pixel_count: int
    family: str = "open"

    @property
    def r_max(self) -> int:
        return self.cells.shape[0] - 1

    def __eq__(self, other):
        if not isinstance(other, SIDiagram):
            return NotImplemented
        return (
            self.cumulative == other.cumulative
            and self.source_pixel_count == other.source_pixel_count
            and self.family == other.family
            and np.array_equal(self.cells, other.cells)
        )

    def non_cumulative(self) -> "SIDiagram":
        if not self.cumulative:
            return self
        cells = np.diff(self.cells, axis=1, prepend=0)
        return SIDiagram(cells, False, self.source_pixel_count, self.family)

    def weighted(self) -> np.ndarray:
        """Per-size histograms multiplied by intensity: ``k * H_r(k)``."""
        return self.non_cumulative().cells * np.arange(256, dtype=np.int64)


def opening_sequence(img, r_max: int = DEFAULT_R_MAX, shape: str = "square") -> list[np.ndarray]:
    """``[open(img, SE(shape, r)) for r in 0..r_max]``; element 0 is ``img``."""
    img = as_image(img)
    return [open(img, StructuringElement(shape, r)) for r in range(r_max + 1)]


def closing_sequence(img, r_max: int = DEFAULT_R_MAX, shape: str = "square") -> list[np.ndarray]:
    img = as_image(img)
    return [close(img, StructuringElement(shape, r)) for r in range(r_max + 1)]


def si_diagram(
    img,
    r_max: int = DEFAULT_R_MAX,
    shape: str = "square",
    cumulative: bool = False,
    family: str = "open",
) -> SIDiagram:
    """Build the SI diagram of ``img`` over openings (or closings) of size 0..r_max."""
    if r_max < 0:
        raise ValueError(f"r_max must be non-negative, got {r_max}")
    if family == "open":
        seq = opening_sequence(img, r_max, shape)
    elif family == "close":
        seq = closing_sequence(img, r_max, shape)
    else:
        raise ValueError(f"family must be 'open' or 'close', got {family!r}")
    cells = np.stack([histogram(im) for im in seq])
    if cumulative:
        cells = np.cumsum(cells, axis=1)
    return SIDiagram(cells, cumulative, int(seq[0].size), family)


def render_si(
    d: SIDiagram,
    x_scale: int = 5,
    y_scale: int = 2,
    value_scale: int = 50,
    r_crop: Optional[int] = None,
    k_crop: Optional[int] = None,
) -> np.ndarray:
    """Render a diagram as an 8-bit image.

    Column r / row k shows ``min(255, cells[r, k] * value_scale)``, each
    cell blown up to ``x_scale`` by ``y_scale`` pixels. ``r_crop`` and
    ``k_crop`` keep only the first columns / rows.
    """
    if min(x_scale, y_scale, value_scale) < 1:
        raise ValueError("render scales must be >= 1")
    n_r, n_k = d.cells.shape
    r_crop = n_r if r_crop is None else r_crop
    k_crop = n_k if k_crop is None else k_crop
    if not 1 <= r_crop <= n_r:
        raise ValueError(f"r_crop {r_crop} outside 1..{n_r}")
    if not 1 <= k_crop <= n_k:
        raise ValueError(f"k_crop {k_crop} outside 1..{n_k}")
    cells = d.cells[:r_crop, :k_crop].astype(np.int64)
    values = np.minimum(cells * value_scale, 255).astype(np.uint8).T
    return np.repeat(np.repeat(values, y_scale, axis=0), x_scale, axis=1)


def export_csv(d: SIDiagram) -> bytes:
    buf = io.StringIO()
    buf.write(f"# cumulative={'true' if d.cumulative else 'false'}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "k", "count"])
    for r, row in enumerate(d.cells.tolist()):
        for k, count in enumerate(row):
            writer.writerow([r, k, count])
    return buf.getvalue().encode("ascii")


def load_csv(data: bytes, source_pixel_count: Optional[int] = None) -> SIDiagram:
    """Parse the output of :func:`export_csv` back into a diagram."""
    lines = data.decode("ascii").splitlines()
    cumulative = False
    while lines and lines[0].startswith("#"):
        key, _, value = lines.pop(0)[1:].strip().partition("=")
        if key.strip() == "cumulative":
            cumulative = value.strip() == "true"
    rows = list(csv.DictReader(lines))
    n_r = max(int(row["r"]) for row in rows) + 1
    cells = np.zeros((n_r, 256), dtype=np.int64)
    for row in rows:
        cells[int(row["r"]), int(row["k"])] = int(row["count"])
    if source_pixel_count is None:
        source_pixel_count = int(cells[0, -1] if cumulative else cells[0].sum())
    return SIDiagram(cells, cumulative, source_pixel_count)
