#!/usr/bin/env python3
"""Build gzipped IDX files from the 10,000 MNIST digits bundled in the npm `mnist` package.

The package stores each pixel as round(byte / 255, 3). The step between adjacent
bytes (1/255) is wider than the rounding error, so round(value * 255) recovers
the original byte exactly.

Usage:
    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    python3 scripts/mnist_from_npm.py package/src/digits data/mnist-npm

Output (9000 train / 1000 test, fixed shuffle):
    train-images-idx3-ubyte.gz  train-labels-idx1-ubyte.gz
    t10k-images-idx3-ubyte.gz   t10k-labels-idx1-ubyte.gz

The official MNIST files can be dropped into any directory and used instead;
the loader accepts both plain and gzipped IDX.
"""
import gzip
import json
import os
import random
import struct
import sys

N_TEST = 1000


def write_idx(path, images, labels):
    with gzip.GzipFile(path + "-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))
    with gzip.GzipFile(path + "-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main(src, dst):
    samples = []
    for digit in range(10):
        with open(os.path.join(src, f"{digit}.json")) as f:
            raw = json.load(f)["data"]
        assert len(raw) % 784 == 0
        for k in range(len(raw) // 784):
            px = [int(round(v * 255)) for v in raw[k * 784:(k + 1) * 784]]
            assert all(0 <= p <= 255 for p in px)
            samples.append((px, digit))
    random.Random(20230901).shuffle(samples)
    os.makedirs(dst, exist_ok=True)
    test, train = samples[:N_TEST], samples[N_TEST:]
    write_idx(os.path.join(dst, "train"), [s[0] for s in train], [s[1] for s in train])
    write_idx(os.path.join(dst, "t10k"), [s[0] for s in test], [s[1] for s in test])
    print(f"wrote {len(train)} train / {len(test)} test samples to {dst}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
