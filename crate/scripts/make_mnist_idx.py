#!/usr/bin/env python3
"""Build the desk-scale MNIST IDX files under data/mnist/.

Source: the `mnist` npm package, which bundles a ~10k-sample subset of the
MNIST handwritten digits as per-class JSON (pixel/255 rounded to three
decimals; exactly recoverable to the original u8 values). Install it and
point --digits-dir at its src/digits directory:

    npm install mnist
    python3 scripts/make_mnist_idx.py --digits-dir node_modules/mnist/src/digits

Each class's first TRAIN_PER_CLASS samples go to the train split, the rest
to the test split, interleaved round-robin across classes so any prefix of
the files is class-balanced. Output uses the standard IDX layout and file
names, gzipped.
"""

import argparse
import gzip
import json
import struct
from pathlib import Path

TRAIN_PER_CLASS = 700
SIDE = 28


def load_class(digits_dir: Path, label: int):
    flat = json.loads((digits_dir / f"{label}.json").read_text())["data"]
    n = len(flat) // (SIDE * SIDE)
    images = []
    for i in range(n):
        chunk = flat[i * SIDE * SIDE:(i + 1) * SIDE * SIDE]
        images.append(bytes(round(v * 255) for v in chunk))
    return images


def write_idx(out_dir: Path, stem: str, images, labels):
    img = struct.pack(">IIII", 0x803, len(images), SIDE, SIDE) + b"".join(images)
    lab = struct.pack(">II", 0x801, len(labels)) + bytes(labels)
    for name, payload in [
        (f"{stem}-images-idx3-ubyte.gz", img),
        (f"{stem}-labels-idx1-ubyte.gz", lab),
    ]:
        with open(out_dir / name, "wb") as raw:
            with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as f:
                f.write(payload)


def interleave(per_class):
    images, labels = [], []
    longest = max(len(v) for v in per_class.values())
    for i in range(longest):
        for label in sorted(per_class):
            if i < len(per_class[label]):
                images.append(per_class[label][i])
                labels.append(label)
    return images, labels


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--digits-dir", type=Path, required=True)
    parser.add_argument("--out-dir", type=Path, default=Path("data/mnist"))
    args = parser.parse_args()

    train, test = {}, {}
    for label in range(10):
        images = load_class(args.digits_dir, label)
        train[label] = images[:TRAIN_PER_CLASS]
        test[label] = images[TRAIN_PER_CLASS:]
        print(f"class {label}: {len(train[label])} train, {len(test[label])} test")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir, "train", *interleave(train))
    write_idx(args.out_dir, "t10k", *interleave(test))
    print(f"wrote IDX files to {args.out_dir}")


if __name__ == "__main__":
    main()
