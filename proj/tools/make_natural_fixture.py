#!/usr/bin/env python3
"""Build tests/data/natural96.bin: natural 96x96 RGB images in STL-10 binary layout.

Regions of random size are cut from the photographs bundled with scikit-image and
scikit-learn and box-downsampled to 96x96. Each record is 27648 bytes: red plane,
green plane, blue plane, each plane column-major (byte x*96 + y).
"""
import argparse
import os

import numpy as np
from PIL import Image
import skimage.data
import sklearn.datasets

SKIMAGE_FILES = [
    "coffee.png", "astronaut.png", "chelsea.png", "rocket.jpg", "ihc.png",
    "motorcycle_left.png", "motorcycle_right.png", "hubble_deep_field.jpg",
]


def sources():
    base = os.path.dirname(skimage.data.__file__)
    out = [np.asarray(Image.open(os.path.join(base, f)).convert("RGB")) for f in SKIMAGE_FILES]
    out.extend(np.asarray(img) for img in sklearn.datasets.load_sample_images().images)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=192)
    ap.add_argument("--seed", type=int, default=20200601)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data", "natural96.bin"))
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    photos = sources()
    records = []
    for i in range(args.count):
        photo = photos[i % len(photos)]
        h, w, _ = photo.shape
        size = int(rng.integers(96, min(h, w, 288) + 1))
        y0 = int(rng.integers(0, h - size + 1))
        x0 = int(rng.integers(0, w - size + 1))
        region = Image.fromarray(photo[y0:y0 + size, x0:x0 + size])
        region = region.resize((96, 96), Image.BOX)
        if rng.integers(0, 2):
            region = region.transpose(Image.FLIP_LEFT_RIGHT)
        arr = np.asarray(region, dtype=np.uint8)  # (y, x, c)
        # planar, column-major: plane c, byte x*96 + y
        records.append(arr.transpose(2, 1, 0).reshape(-1))
    data = np.concatenate(records).astype(np.uint8)
    with open(args.out, "wb") as f:
        f.write(data.tobytes())
    print(f"wrote {args.count} images ({data.size} bytes) to {os.path.normpath(args.out)}")


if __name__ == "__main__":
    main()
