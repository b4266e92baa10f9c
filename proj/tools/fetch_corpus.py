#!/usr/bin/env python3
"""Fetch the standard grayscale test images into corpus/ as binary PGM.

The denoising literature evaluates on a small canonical set: Lena and
Barbara at 512x512, House, Peppers and Cameraman at 256x256.  They are not
redistributable as part of this repository, so this helper downloads them
from well-known academic mirrors and converts each to an 8-bit binary PGM
named the way the acceptance gate and bench expect (lena.pgm, barbara.pgm,
house.pgm, peppers.pgm, cameraman.pgm).

Any other copy of the same images works just as well: convert to 8-bit
grayscale PGM with the names above and drop them into corpus/ by hand.

Requires Pillow for decoding; downloads use only the standard library.
"""

from __future__ import annotations

import argparse
import io
import sys
import urllib.request
from pathlib import Path

from PIL import Image

# (name, canonical side, candidate URLs in preference order)
IMAGES = [
    (
        "lena",
        512,
        [
            "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Lena512.png",
            "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Lena512.png",
            "https://www.ece.rice.edu/~wakin/images/lena512.bmp",
        ],
    ),
    (
        "barbara",
        512,
        [
            "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Barbara512.png",
            "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Barbara512.png",
            "http://www.io.csic.es/PagsPers/JPortilla/content/BLS-GSM/test_images/barbara.png",
        ],
    ),
    (
        "house",
        256,
        [
            "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_House256.png",
            "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_House256.png",
        ],
    ),
    (
        "peppers",
        256,
        [
            "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Peppers256.png",
            "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Peppers256.png",
        ],
    ),
    (
        "cameraman",
        256,
        [
            "https://webpages.tuni.fi/foi/GCF-BM3D/images/image_Cameraman256.png",
            "https://www.cs.tut.fi/~foi/GCF-BM3D/images/image_Cameraman256.png",
        ],
    ),
]


def download(url: str, timeout: float) -> bytes:
    request = urllib.request.Request(url, headers={"User-Agent": "corpus-fetch/1.0"})
    with urllib.request.urlopen(request, timeout=timeout) as response:
        return response.read()


def fetch_one(name: str, side: int, urls: list[str], out: Path, timeout: float) -> bool:
    for url in urls:
        try:
            raw = download(url, timeout)
        except Exception as err:  # noqa: BLE001 - report and try the next mirror
            print(f"  {url}: {err}")
            continue
        try:
            img = Image.open(io.BytesIO(raw)).convert("L")
        except Exception as err:  # noqa: BLE001
            print(f"  {url}: not decodable ({err})")
            continue
        if img.size != (side, side):
            print(
                f"  {url}: size {img.size[0]}x{img.size[1]}, resampling to {side}x{side}"
                " (note: a resampled copy is not the canonical test image;"
                " reference PSNR values may drift)"
            )
            img = img.resize((side, side), Image.LANCZOS)
        img.save(out, format="PPM")  # mode L saves as binary PGM (P5)
        print(f"  saved {out} from {url}")
        return True
    return False


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--corpus-dir",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "corpus",
        help="destination directory (default: <repo>/corpus)",
    )
    parser.add_argument("--timeout", type=float, default=30.0, help="per-request timeout, seconds")
    parser.add_argument("--force", action="store_true", help="re-download existing files")
    args = parser.parse_args()

    args.corpus_dir.mkdir(parents=True, exist_ok=True)
    missing = []
    for name, side, urls in IMAGES:
        out = args.corpus_dir / f"{name}.pgm"
        if out.exists() and not args.force:
            print(f"{name}: already present, skipping (use --force to refresh)")
            continue
        print(f"{name}:")
        if not fetch_one(name, side, urls, out, args.timeout):
            missing.append(name)

    if missing:
        print(
            f"could not fetch: {', '.join(missing)}. Place 8-bit grayscale PGMs with "
            f"these names into {args.corpus_dir} manually.",
            file=sys.stderr,
        )
        return 1
    print("corpus complete")
    return 0


if __name__ == "__main__":
    sys.exit(main())
