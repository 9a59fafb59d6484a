#!/usr/bin/env python3
"""Populate data/ from redistributed copies of the benchmark datasets.

The official UCI and MNIST hosts are not always reachable, so this script
rebuilds the on-disk layout the `nnrw` loaders expect from two package-index
mirrors of the same data:

  * keel-ds (PyPI wheel): KEEL copies of Statlog Landsat (6,435 rows) and UCI
    Letter Recognition (20,000 rows).
  * mnist-loader (npm tarball): the four raw MNIST IDX files.

Output layout:

  data/satimage/sat.trn, data/satimage/sat.tst   Statlog whitespace tables
  data/letter/letter-recognition.data            UCI comma format, label first
  data/mnist/*-idx?-ubyte.gz                      gzip-compressed IDX files

The KEEL Landsat file merges the official training and test files in a
different row order, so the official 4,435 / 2,000 partition is rebuilt as a
seeded split that reproduces the official per-class counts exactly.
"""

import argparse
import gzip
import hashlib
import io
import pathlib
import random
import tarfile
import zipfile

# Per-class counts of the official sat.trn / sat.tst files (raw labels).
SAT_TRAIN_COUNTS = {1: 1072, 2: 479, 3: 961, 4: 415, 5: 470, 7: 1038}
SAT_TEST_COUNTS = {1: 461, 2: 224, 3: 397, 4: 211, 5: 237, 7: 470}
SAT_SPLIT_SEED = 20200101

MNIST_FILES = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
]


def keel_rows(wheel, member):
    text = zipfile.ZipFile(wheel).read(member).decode()
    return [
        [tok.strip() for tok in line.split(",")]
        for line in text.splitlines()
        if line.strip() and not line.startswith("@")
    ]


def write_satimage(wheel, out):
    rows = keel_rows(wheel, "keel_ds/data/balanced/raw/satimage.dat")
    assert len(rows) == 6435, len(rows)
    by_class = {}
    for row in rows:
        assert len(row) == 37
        by_class.setdefault(int(row[-1]), []).append(row)
    rng = random.Random(SAT_SPLIT_SEED)
    train, test = [], []
    for label in sorted(by_class):
        members = by_class[label]
        assert len(members) == SAT_TRAIN_COUNTS[label] + SAT_TEST_COUNTS[label]
        order = list(range(len(members)))
        rng.shuffle(order)
        cut = SAT_TRAIN_COUNTS[label]
        train += [(i, label) for i in sorted(order[:cut])]
        test += [(i, label) for i in sorted(order[cut:])]
    # Keep the source row order inside each split.
    index = {id(r): n for n, r in enumerate(rows)}
    train_rows = sorted((by_class[c][i] for i, c in train), key=lambda r: index[id(r)])
    test_rows = sorted((by_class[c][i] for i, c in test), key=lambda r: index[id(r)])
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("sat.trn", train_rows), ("sat.tst", test_rows)):
        (out / name).write_text("".join(" ".join(r) + "\n" for r in part))


def write_letter(wheel, out):
    rows = keel_rows(wheel, "keel_ds/data/balanced/raw/letter.dat")
    assert len(rows) == 20000, len(rows)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for row in rows:
        assert len(row) == 17 and len(row[-1]) == 1
        lines.append(",".join([row[-1]] + row[:-1]) + "\n")
    (out / "letter-recognition.data").write_text("".join(lines))


def write_mnist(tarball, out):
    out.mkdir(parents=True, exist_ok=True)
    with tarfile.open(tarball) as tar:
        for name in MNIST_FILES:
            payload = tar.extractfile(f"package/data/{name}").read()
            print(f"{name}: sha256 {hashlib.sha256(payload).hexdigest()}")
            buf = io.BytesIO()
            # mtime=0 keeps the archive byte-stable across runs.
            with gzip.GzipFile(filename="", mode="wb", fileobj=buf, mtime=0) as gz:
                gz.write(payload)
            (out / f"{name}.gz").write_bytes(buf.getvalue())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--keel-wheel", required=True, type=pathlib.Path)
    ap.add_argument("--mnist-tarball", required=True, type=pathlib.Path)
    ap.add_argument("--out", default=pathlib.Path(__file__).resolve().parents[1] / "data",
                    type=pathlib.Path)
    args = ap.parse_args()
    write_satimage(args.keel_wheel, args.out / "satimage")
    write_letter(args.keel_wheel, args.out / "letter")
    write_mnist(args.mnist_tarball, args.out / "mnist")


if __name__ == "__main__":
    main()
