"""Regenerate src/morphnoise/data/camera256.pgm from scikit-image's cameraman.

Needs scikit-image at build time only; the package itself does not import it.
"""

from pathlib import Path

import numpy as np
from skimage import data

from morphnoise.image import save_pgm

OUT = Path(__file__).resolve().parents[1] / "src" / "morphnoise" / "data" / "camera256.pgm"


def main():
    cam = data.camera().astype(np.uint32)
    blocks = cam.reshape(256, 2, 256, 2).sum(axis=(1, 3))
    img = ((blocks + 2) // 4).astype(np.uint8)
    OUT.write_bytes(save_pgm(img))
    print(f"wrote {OUT} ({img.shape[1]}x{img.shape[0]})")


if __name__ == "__main__":
    main()
