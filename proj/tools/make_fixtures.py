#!/usr/bin/env python3
"""Regenerates the binary test fixtures under tests/data/.

Sources: scikit-image's CC0 "camera" photograph, block-averaged down to the
fixture sizes. The PSNR regression pair perturbs one fixture with seeded
integer offsets and freezes the resulting PSNR (printed on stdout; the frozen
value is asserted by the CLI tests).

Run from the repository root:  python3 tools/make_fixtures.py
"""

from pathlib import Path

import numpy as np
from skimage import data

DATA_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"


def write_pgm(path: Path, img: np.ndarray) -> None:
    assert img.dtype == np.uint8 and img.ndim == 2
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n"
    path.write_bytes(header.encode("ascii") + img.tobytes())


def block_mean(img: np.ndarray, factor: int) -> np.ndarray:
    h, w = img.shape
    blocks = img.reshape(h // factor, factor, w // factor, factor).astype(np.float64)
    mean = blocks.mean(axis=(1, 3))
    return np.clip(np.floor(mean + 0.5), 0, 255).astype(np.uint8)


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    err = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    return 10.0 * np.log10(255.0**2 / err)


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    camera = data.camera()  # 512x512 uint8, CC0

    for size in (256, 128, 64):
        write_pgm(DATA_DIR / f"camera{size}.pgm", block_mean(camera, 512 // size))

    # Regression pair: camera64 vs camera64 plus small seeded integer offsets.
    rng = np.random.default_rng(20260814)
    a = block_mean(camera, 8)
    offsets = rng.integers(-6, 7, size=a.shape)
    b = np.clip(a.astype(np.int64) + offsets, 0, 255).astype(np.uint8)
    write_pgm(DATA_DIR / "psnr_pair_a.pgm", a)
    write_pgm(DATA_DIR / "psnr_pair_b.pgm", b)
    print(f"psnr_pair: {psnr(a, b):.10f} dB")


if __name__ == "__main__":
    main()
