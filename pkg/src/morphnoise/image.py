"""
8-bit grayscale image substrate: PGM codec, differences, histograms.

Images are plain 2-D ``numpy.uint8`` arrays of shape ``(height, width)``,
row-major with the origin at the top-left corner. Every function here is
pure and returns a fresh array.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PGMDecodeError",
    "abs_diff",
    "as_image",
    "histogram",
    "invert",
    "load_pgm",
    "sample_image",
    "save_pgm",
    "volume",
]

_WHITESPACE = b" \t\n\r\v\f"


class PGMDecodeError(ValueError):
    """Raised for malformed PGM input; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


def as_image(data) -> np.ndarray:
    """Validate ``data`` as an 8-bit image and return it as a uint8 array.

    Integer arrays outside [0, 255] are rejected rather than wrapped.
    """
    arr = np.asarray(data)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr
    if arr.dtype.kind not in "iub":
        raise TypeError(f"image must hold integers, got dtype {arr.dtype}")
    if arr.min() < 0 or arr.max() > 255:
        raise ValueError("pixel values must lie in [0, 255]")
    return arr.astype(np.uint8)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[::-1]} vs {b.shape[::-1]} (width x height)")


class _HeaderReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_space_and_comments(self) -> None:
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break

    def token(self, what: str) -> tuple[bytes, int]:
        self._skip_space_and_comments()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE + b"#":
            self.pos += 1
        if start == self.pos:
            raise PGMDecodeError(f"unexpected end of data while reading {what}", start)
        return self.data[start : self.pos], start

    def integer(self, what: str) -> int:
        tok, start = self.token(what)
        if not tok.isdigit():
            raise PGMDecodeError(f"invalid {what} {tok!r}", start)
        return int(tok)


def load_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) or ASCII (P2) PGM file with maxval <= 255.

    Raises
    ------
    PGMDecodeError
        On a bad magic number, malformed or out-of-range header fields,
        truncated raster data or pixel values above maxval.
    """
    data = bytes(data)
    reader = _HeaderReader(data)
    magic, _ = reader.token("magic number")
    if magic not in (b"P5", b"P2"):
        raise PGMDecodeError(f"unsupported magic number {magic!r}", 0)
    width = reader.integer("width")
    height = reader.integer("height")
    if width < 1 or height < 1:
        raise PGMDecodeError(f"non-positive dimensions {width}x{height}", reader.pos)
    reader._skip_space_and_comments()
    maxval_offset = reader.pos
    maxval = reader.integer("maxval")
    if not 1 <= maxval <= 255:
        raise PGMDecodeError(f"maxval {maxval} outside 1..255", maxval_offset)
    npix = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if reader.pos >= len(data) or data[reader.pos : reader.pos + 1] not in _WHITESPACE:
            raise PGMDecodeError("missing whitespace after maxval", reader.pos)
        start = reader.pos + 1
        raster = data[start : start + npix]
        if len(raster) < npix:
            raise PGMDecodeError(f"truncated raster: expected {npix} bytes, got {len(raster)}", start + len(raster))
        pixels = np.frombuffer(raster, dtype=np.uint8)
        if pixels.max() > maxval:
            bad = int(np.argmax(pixels > maxval))
            raise PGMDecodeError(f"pixel value {pixels[bad]} exceeds maxval {maxval}", start + bad)
    else:
        values = []
        for _ in range(npix):
            try:
                tok, offset = reader.token("pixel value")
            except PGMDecodeError as exc:
                raise PGMDecodeError(f"truncated raster: expected {npix} values, got {len(values)}", exc.offset) from None
            if not tok.isdigit() or int(tok) > maxval:
                raise PGMDecodeError(f"invalid pixel value {tok!r}", offset)
            values.append(int(tok))
        pixels = np.array(values, dtype=np.uint8)

    return pixels.reshape(height, width).copy()


def save_pgm(img, ascii: bool = False) -> bytes:
    """Encode an image as PGM with maxval 255 (P5 by default, P2 if ``ascii``)."""
    img = as_image(img)
    height, width = img.shape
    if not ascii:
        return b"P5\n%d %d\n255\n" % (width, height) + img.tobytes()
    lines = [b"P2", b"%d %d" % (width, height), b"255"]
    lines.extend(b" ".join(b"%d" % v for v in row) for row in img.tolist())
    return b"\n".join(lines) + b"\n"


def abs_diff(a, b) -> np.ndarray:
    """Pixelwise ``|a - b|``; always fits in 8 bits."""
    a, b = as_image(a), as_image(b)
    _check_same_shape(a, b)
    return (np.maximum(a, b) - np.minimum(a, b)).astype(np.uint8)


def invert(img) -> np.ndarray:
    return (255 - as_image(img)).astype(np.uint8)


def histogram(img) -> np.ndarray:
    """Counts of each intensity 0..255 as an int64 array of length 256."""
    return np.bincount(as_image(img).ravel(), minlength=256).astype(np.int64)


def volume(img) -> int:
    """Sum of all pixel intensities, as an exact Python int."""
    return int(as_image(img).sum(dtype=np.uint64))


def sample_image() -> np.ndarray:
    """The bundled 256 x 256 natural test image (scikit-image's cameraman,
    2 x 2 block-averaged)."""
    from importlib.resources import files

    return load_pgm((files("morphnoise") / "data" / "camera256.pgm").read_bytes())
