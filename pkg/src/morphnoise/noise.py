"""
Reproducible salt-and-pepper corruption.

Randomness comes from SplitMix64, defined by the recurrence (all
arithmetic mod 2**64)::

    state_i = seed + i * 0x9E3779B97F4A7C15          (i = 1, 2, ...)
    z = state_i
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_i = z ^ (z >> 31)

Pixels are visited row-major and pixel j consumes outputs 2j+1 and 2j+2.
The first, mapped to [0, 1) as ``(out >> 11) / 2**53``, decides
replacement (``< p``); the top bit of the second picks salt (255, bit
set) or pepper (0). Because each output depends only on its index, the
whole stream is generated in one vectorised pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from morphnoise.image import as_image

__all__ = ["NoiseSpec", "add_salt_pepper", "corrupted_mask", "splitmix64"]

_MASK = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class NoiseSpec:
    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise probability must be in [0, 1], got {self.p}")


def splitmix64(seed: int, count: int, start: int = 1) -> np.ndarray:
    """Outputs ``start .. start + count - 1`` of the SplitMix64 stream."""
    seed = np.uint64(seed & _MASK)
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = seed + idx * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def _draws(shape: tuple[int, int], spec: NoiseSpec) -> tuple[np.ndarray, np.ndarray]:
    stream = splitmix64(spec.seed, 2 * shape[0] * shape[1]).reshape(-1, 2)
    u = (stream[:, 0] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    replace = (u < spec.p).reshape(shape)
    salt = (stream[:, 1] >> np.uint64(63)).astype(bool).reshape(shape)
    return replace, salt


def corrupted_mask(shape: tuple[int, int], spec: NoiseSpec) -> np.ndarray:
    """Boolean mask of the pixels :func:`add_salt_pepper` replaces."""
    return _draws(shape, spec)[0]


def add_salt_pepper(img, spec: NoiseSpec) -> np.ndarray:
    """Replace each pixel with probability ``spec.p`` by 0 or 255 (equiprobable)."""
    img = as_image(img)
    replace, salt = _draws(img.shape, spec)
    out = img.copy()
    out[replace] = np.where(salt[replace], 255, 0)
    return out
