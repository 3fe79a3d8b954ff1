#!/usr/bin/env python3
"""Convert the CIFAR-10 test set and CIFAR-10H annotations into lucon inputs.

Inputs:
  --cifar     CIFAR-10 test batch: `test_batch.bin` (binary release) or
              `test_batch` (Python pickle release).
  --cifar10h  `cifar10h-counts.npy`, a 10000x10 array of annotator counts.
  --out       Output directory.

Outputs in --out:
  cifar10_test.cpts         CPTS binary points, 10000 x 3072, pixels / 255
  cifar10_test.labels.csv   id,label
  cifar10h.soft.csv         id,p0..p9 (annotator counts normalized per row)

Ids are the image positions 0..9999 in the test batch. Pixel order is the
one stored in the batch (channel-major, 1024 values per channel).
"""

import argparse
import pickle
import struct
import sys
from pathlib import Path

import numpy as np

NUM_IMAGES = 10000
NUM_CLASSES = 10
DIM = 3 * 32 * 32


def load_cifar_test(path: Path):
    if path.suffix == ".bin":
        raw = np.fromfile(path, dtype=np.uint8)
        if raw.size != NUM_IMAGES * (DIM + 1):
            sys.exit(f"{path}: expected {NUM_IMAGES * (DIM + 1)} bytes, got {raw.size}")
        raw = raw.reshape(NUM_IMAGES, DIM + 1)
        return raw[:, 1:], raw[:, 0].astype(np.int64)
    with open(path, "rb") as f:
        batch = pickle.load(f, encoding="bytes")
    data = np.asarray(batch[b"data"], dtype=np.uint8)
    labels = np.asarray(batch[b"labels"], dtype=np.int64)
    if data.shape != (NUM_IMAGES, DIM) or labels.shape != (NUM_IMAGES,):
        sys.exit(f"{path}: unexpected shapes {data.shape}, {labels.shape}")
    return data, labels


def soft_labels(counts: np.ndarray) -> np.ndarray:
    if counts.shape != (NUM_IMAGES, NUM_CLASSES):
        sys.exit(f"CIFAR-10H counts: expected shape ({NUM_IMAGES}, {NUM_CLASSES}), got {counts.shape}")
    counts = counts.astype(np.float64)
    if (counts < 0).any():
        sys.exit("CIFAR-10H counts: negative entries")
    totals = counts.sum(axis=1, keepdims=True)
    if (totals <= 0).any():
        sys.exit("CIFAR-10H counts: row with no annotations")
    return counts / totals


def write_cpts(path: Path, points: np.ndarray) -> None:
    m, n = points.shape
    with open(path, "wb") as f:
        f.write(b"CPTS")
        f.write(struct.pack("<II", m, n))
        f.write(np.ascontiguousarray(points, dtype="<f4").tobytes())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--cifar", type=Path, required=True)
    ap.add_argument("--cifar10h", type=Path, required=True)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    pixels, labels = load_cifar_test(args.cifar)
    soft = soft_labels(np.load(args.cifar10h))
    args.out.mkdir(parents=True, exist_ok=True)

    write_cpts(args.out / "cifar10_test.cpts", pixels.astype(np.float32) / np.float32(255.0))
    with open(args.out / "cifar10_test.labels.csv", "w", newline="\n") as f:
        f.write("id,label\n")
        f.writelines(f"{i},{int(y)}\n" for i, y in enumerate(labels))
    with open(args.out / "cifar10h.soft.csv", "w", newline="\n") as f:
        f.write("id," + ",".join(f"p{j}" for j in range(NUM_CLASSES)) + "\n")
        for i, row in enumerate(soft):
            f.write(f"{i}," + ",".join(repr(float(p)) for p in row) + "\n")

    agree = float((soft.argmax(axis=1) == labels).mean())
    print(f"wrote {NUM_IMAGES} images to {args.out}; CIFAR-10H majority agrees with labels on {agree:.2%}")


if __name__ == "__main__":
    main()
