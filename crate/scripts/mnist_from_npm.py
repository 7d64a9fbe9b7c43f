#!/usr/bin/env python3
"""Rebuild MNIST IDX files from the digit JSON shipped in the npm `mnist` package.

The package stores 1000 samples per digit as pixel/255 rounded to three
decimals. Each value is mapped back to its byte, the 10000 samples are
interleaved with a fixed permutation, and the first 8000 become the training
file while the remaining 2000 become the test file.

usage: mnist_from_npm.py <extracted package dir> <output dir>
"""
import gzip
import json
import struct
import sys
from pathlib import Path

import numpy as np


def to_bytes(values):
    px = np.rint(np.asarray(values, dtype=np.float64) * 255.0).astype(np.int64)
    assert px.min() >= 0 and px.max() <= 255
    # the package rounded b/255 to 3 decimals; make sure the inverse is exact
    back = np.round(px / 255.0, 3)
    assert np.allclose(back, values, atol=1e-9), "pixel values are not b/255 rounded"
    return px.astype(np.uint8)


def write_idx(path, magic, dims, payload):
    with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
        fh.write(struct.pack(">I", magic))
        for d in dims:
            fh.write(struct.pack(">I", d))
        fh.write(payload.tobytes())


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    images, labels = [], []
    for digit in range(10):
        doc = json.loads((src / "src" / "digits" / f"{digit}.json").read_text())
        data = np.asarray(doc["data"], dtype=np.float64).reshape(-1, 784)
        for row in data:
            images.append(to_bytes(row))
            labels.append(digit)
    images = np.stack(images)
    labels = np.asarray(labels, dtype=np.uint8)
    order = np.random.RandomState(20180101).permutation(len(labels))
    images, labels = images[order], labels[order]
    n_train = 8000
    for prefix, sl in (("train", slice(0, n_train)), ("t10k", slice(n_train, None))):
        imgs, labs = images[sl], labels[sl]
        write_idx(out / f"{prefix}-images-idx3-ubyte.gz", 0x803, (len(labs), 28, 28), imgs)
        write_idx(out / f"{prefix}-labels-idx1-ubyte.gz", 0x801, (len(labs),), labs)
        print(prefix, len(labs), np.bincount(labs, minlength=10).tolist())


if __name__ == "__main__":
    main()
