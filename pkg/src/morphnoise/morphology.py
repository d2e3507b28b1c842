"""
Flat grayscale morphology on 8-bit images.

Erosion and dilation take the min/max over the structuring element
restricted to the image domain (no padding constants leak in). All
shapes are reduced to 1-D running min/max along rows and columns, which
are computed with the van Herk / Gil-Werman block recurrence, so the
cost per pixel does not grow with the element size for squares.

Filters built on top:

* opening / closing
* alternating sequential filters (ASF), open-first or close-first
* the morphological centre of the two ASF variants
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from morphnoise.image import as_image

__all__ = [
    "SHAPES",
    "FilterSpec",
    "StructuringElement",
    "apply_filter",
    "asf",
    "center",
    "close",
    "dilate",
    "erode",
    "open",
]

SHAPES = ("square", "disk", "cross")
FILTER_KINDS = ("asf_open_first", "asf_close_first", "center", "op_sequence")
OPS = ("open", "close")


@dataclass(frozen=True)
class StructuringElement:
    """Flat, centre-symmetric neighbourhood of radius ``size``.

    ``square`` covers the Chebyshev ball, ``disk`` the Euclidean ball and
    ``cross`` the L1 ball (a diamond). Size 0 is the single pixel.
    """

    shape: str = "square"
    size: int = 1

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown structuring element shape {self.shape!r}; expected one of {SHAPES}")
        if int(self.size) != self.size or self.size < 0:
            raise ValueError(f"structuring element size must be a non-negative integer, got {self.size!r}")

    def offsets(self) -> list[tuple[int, int]]:
        """All ``(dy, dx)`` offsets covered by the element."""
        r = self.size
        out = []
        for dy in range(-r, r + 1):
            for dx in range(-r, r + 1):
                if self.shape == "square":
                    inside = True
                elif self.shape == "disk":
                    inside = dy * dy + dx * dx <= r * r
                else:
                    inside = abs(dy) + abs(dx) <= r
                if inside:
                    out.append((dy, dx))
        return out

    def mask(self) -> np.ndarray:
        r = self.size
        m = np.zeros((2 * r + 1, 2 * r + 1), dtype=bool)
        for dy, dx in self.offsets():
            m[dy + r, dx + r] = True
        return m


def _se(se) -> StructuringElement:
    if isinstance(se, StructuringElement):
        return se
    if isinstance(se, int):
        return StructuringElement("square", se)
    shape, size = se
    return StructuringElement(shape, size)


def _running(a: np.ndarray, r: int, axis: int, op: np.ufunc, fill: int) -> np.ndarray:
    """Centred running ``op`` (np.minimum/np.maximum) of half-width ``r``.

    Positions outside the array are filled with the neutral element of
    ``op`` so they never win, which is the same as clipping the window.
    """
    if r == 0:
        return a.copy()
    w = 2 * r + 1
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    nblocks = -(-(n + 2 * r) // w)
    right = nblocks * w - n - r
    padded = np.pad(a, [(0, 0)] * (a.ndim - 1) + [(r, right)], constant_values=fill)
    blocks = padded.reshape(a.shape[:-1] + (nblocks, w))
    prefix = op.accumulate(blocks, axis=-1).reshape(padded.shape)
    suffix = op.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1].reshape(padded.shape)
    out = op(suffix[..., :n], prefix[..., w - 1 : w - 1 + n])
    return np.ascontiguousarray(np.moveaxis(out, -1, axis))


def _rank_filter(img: np.ndarray, se: StructuringElement, op: np.ufunc, fill: int) -> np.ndarray:
    r = se.size
    if r == 0:
        return img.copy()
    if se.shape == "square":
        return _running(_running(img, r, 1, op, fill), r, 0, op, fill)
    if se.shape == "cross":
        # r-fold plus-shaped step; exact under clipping because every
        # monotone lattice path between two in-domain pixels stays in-domain
        out = img
        for _ in range(r):
            out = op(_running(out, 1, 1, op, fill), _running(out, 1, 0, op, fill))
        return out
    # disk: union of horizontal chords, one per row offset
    height = img.shape[0]
    chords: dict[int, np.ndarray] = {}
    out = np.full_like(img, fill)
    for dy in range(-r, r + 1):
        half = math.isqrt(r * r - dy * dy)
        if half not in chords:
            chords[half] = _running(img, half, 1, op, fill)
        rows = chords[half]
        lo, hi = max(0, -dy), min(height, height - dy)
        if lo < hi:
            out[lo:hi] = op(out[lo:hi], rows[lo + dy : hi + dy])
    return out


def erode(img, se=StructuringElement("square", 1)) -> np.ndarray:
    """Minimum of ``img`` over the in-domain part of ``se`` at each pixel."""
    return _rank_filter(as_image(img), _se(se), np.minimum, 255)


def dilate(img, se=StructuringElement("square", 1)) -> np.ndarray:
    """Maximum of ``img`` over the in-domain part of ``se`` at each pixel."""
    return _rank_filter(as_image(img), _se(se), np.maximum, 0)


def open(img, se=StructuringElement("square", 1)) -> np.ndarray:  # noqa: A001
    se = _se(se)
    return dilate(erode(img, se), se)


def close(img, se=StructuringElement("square", 1)) -> np.ndarray:
    se = _se(se)
    return erode(dilate(img, se), se)


def asf(img, variant: str = "open_first", n: int = 1, shape: str = "square") -> np.ndarray:
    """Alternating sequential filter with stages of size 1..n.

    ``open_first`` applies close(open(f)) at each stage, ``close_first``
    applies open(close(f)).
    """
    if variant not in ("open_first", "close_first"):
        raise ValueError(f"unknown ASF variant {variant!r}")
    if int(n) != n or n < 1:
        raise ValueError(f"ASF stage count must be a positive integer, got {n!r}")
    out = as_image(img)
    for i in range(1, n + 1):
        se = StructuringElement(shape, i)
        if variant == "open_first":
            out = close(open(out, se), se)
        else:
            out = open(close(out, se), se)
    return out


def center(img, n: int = 1, shape: str = "square") -> np.ndarray:
    """Morphological centre of the open-first and close-first ASFs of size n.

    Each pixel of ``img`` is clamped into the interval spanned by the two
    ASF outputs at that pixel.
    """
    img = as_image(img)
    psi1 = asf(img, "open_first", n, shape)
    psi2 = asf(img, "close_first", n, shape)
    lower = np.minimum(psi1, psi2)
    upper = np.maximum(psi1, psi2)
    return np.minimum(np.maximum(img, lower), upper)


@dataclass(frozen=True)
class FilterSpec:
    """Declarative filter pipeline.

    ``kind`` is one of ``asf_open_first``, ``asf_close_first``, ``center``
    (all using ``size``) or ``op_sequence`` (using ``ops``, a sequence of
    ``(op, size)`` pairs applied left to right).
    """

    kind: str
    size: int = 1
    ops: tuple[tuple[str, int], ...] = field(default=())
    se_shape: str = "square"

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}; expected one of {FILTER_KINDS}")
        if self.se_shape not in SHAPES:
            raise ValueError(f"unknown structuring element shape {self.se_shape!r}")
        ops = tuple((str(op), int(size)) for op, size in self.ops)
        object.__setattr__(self, "ops", ops)
        if self.kind == "op_sequence":
            if not ops:
                raise ValueError("op_sequence filter needs at least one operation")
            for op, size in ops:
                if op not in OPS:
                    raise ValueError(f"unknown operation {op!r}; expected open or close")
                if size < 1:
                    raise ValueError(f"operation size must be positive, got {size}")
        elif int(self.size) != self.size or self.size < 1:
            raise ValueError(f"{self.kind} filter needs a positive size, got {self.size!r}")

    @classmethod
    def sequence(cls, ops: Iterable[Sequence], se_shape: str = "square") -> "FilterSpec":
        return cls("op_sequence", ops=tuple((op, size) for op, size in ops), se_shape=se_shape)

    @classmethod
    def parse(cls, text: str, se_shape: str = "square") -> "FilterSpec":
        """Parse ``center:N``, ``asf-oc:N``, ``asf-co:N`` or ``seq:open@1,close@2,...``."""
        name, sep, arg = text.strip().partition(":")
        if not sep or not arg:
            raise ValueError(f"bad filter spec {text!r}")
        kinds = {"center": "center", "asf-oc": "asf_open_first", "asf-co": "asf_close_first"}
        if name in kinds:
            try:
                size = int(arg)
            except ValueError:
                raise ValueError(f"bad size in filter spec {text!r}") from None
            return cls(kinds[name], size=size, se_shape=se_shape)
        if name == "seq":
            ops = []
            for item in arg.split(","):
                op, at, size = item.strip().partition("@")
                if not at:
                    raise ValueError(f"bad operation {item!r} in filter spec {text!r}; expected op@size")
                try:
                    ops.append((op, int(size)))
                except ValueError:
                    raise ValueError(f"bad size in operation {item!r}") from None
            return cls.sequence(ops, se_shape=se_shape)
        raise ValueError(f"unknown filter kind {name!r} in {text!r}")

    def __str__(self) -> str:
        if self.kind == "op_sequence":
            return "seq:" + ",".join(f"{op}@{size}" for op, size in self.ops)
        prefix = {"center": "center", "asf_open_first": "asf-oc", "asf_close_first": "asf-co"}[self.kind]
        return f"{prefix}:{self.size}"


def apply_filter(img, spec: FilterSpec) -> np.ndarray:
    if not isinstance(spec, FilterSpec):
        raise TypeError(f"expected a FilterSpec, got {type(spec).__name__}")
    img = as_image(img)
    if spec.kind == "center":
        return center(img, spec.size, spec.se_shape)
    if spec.kind == "asf_open_first":
        return asf(img, "open_first", spec.size, spec.se_shape)
    if spec.kind == "asf_close_first":
        return asf(img, "close_first", spec.size, spec.se_shape)
    out = img
    for op, size in spec.ops:
        se = StructuringElement(spec.se_shape, size)
        out = open(out, se) if op == "open" else close(out, se)
    return out
