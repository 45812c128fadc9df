#!/usr/bin/env python3
"""Convert the digit JSON shipped by the npm `mnist` package into IDX files.

The npm package bundles 10,000 MNIST digits as per-class JSON arrays of
grayscale values in [0, 1] (rounded to three decimals). This script writes
the four standard IDX files so `bench run --data-dir` can consume them:

    train-images-idx3-ubyte  train-labels-idx1-ubyte
    t10k-images-idx3-ubyte   t10k-labels-idx1-ubyte

Each class is split in file order: the first `--train-fraction` of its digits
go to the training files, the rest to the test files. Output order
interleaves classes round-robin so the files are not sorted by label.

Usage:
    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_idx.py package/src/digits data/mnist
"""

import argparse
import json
import pathlib
import struct

PIXELS = 28 * 28


def read_digits(src: pathlib.Path):
    per_class = []
    for label in range(10):
        values = json.loads((src / f"{label}.json").read_text())["data"]
        if len(values) % PIXELS:
            raise SystemExit(f"{label}.json: length {len(values)} is not a multiple of {PIXELS}")
        images = [
            bytes(min(255, max(0, round(v * 255))) for v in values[i : i + PIXELS])
            for i in range(0, len(values), PIXELS)
        ]
        per_class.append(images)
    return per_class


def interleave(per_class):
    out = []
    cursors = [0] * len(per_class)
    remaining = sum(len(c) for c in per_class)
    while remaining:
        for label, images in enumerate(per_class):
            if cursors[label] < len(images):
                out.append((label, images[cursors[label]]))
                cursors[label] += 1
                remaining -= 1
    return out


def write_idx(dst: pathlib.Path, prefix: str, samples):
    with open(dst / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for _, image in samples:
            f.write(image)
    with open(dst / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for label, _ in samples))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("src", type=pathlib.Path, help="directory holding 0.json .. 9.json")
    parser.add_argument("dst", type=pathlib.Path, help="output directory")
    parser.add_argument("--train-fraction", type=float, default=0.85)
    args = parser.parse_args()

    per_class = read_digits(args.src)
    train, test = [], []
    for images in per_class:
        cut = int(len(images) * args.train_fraction)
        train.append(images[:cut])
        test.append(images[cut:])

    args.dst.mkdir(parents=True, exist_ok=True)
    train_samples = interleave(train)
    test_samples = interleave(test)
    write_idx(args.dst, "train", train_samples)
    write_idx(args.dst, "t10k", test_samples)
    print(f"wrote {len(train_samples)} train / {len(test_samples)} test images to {args.dst}")


if __name__ == "__main__":
    main()
