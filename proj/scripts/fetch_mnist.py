#!/usr/bin/env python3
"""Download the MNIST idx files used by experiments/mnist_*.ini.

Fetches the four classic gzipped idx files, checks their magic numbers and
unpacks them under the destination directory (default: data/mnist relative
to the repository root). Re-runs skip files that are already in place.
"""

import argparse
import gzip
import pathlib
import struct
import sys
import urllib.error
import urllib.request

MIRRORS = [
    "https://ossci-datasets.s3.amazonaws.com/mnist/",
    "https://storage.googleapis.com/cvdf-datasets/mnist/",
]

# file name -> (idx magic, minimum payload bytes)
FILES = {
    "train-images-idx3-ubyte": (2051, 60000 * 28 * 28),
    "train-labels-idx1-ubyte": (2049, 60000),
    "t10k-images-idx3-ubyte": (2051, 10000 * 28 * 28),
    "t10k-labels-idx1-ubyte": (2049, 10000),
}


def fetch(name: str) -> bytes:
    last_error = None
    for mirror in MIRRORS:
        url = mirror + name + ".gz"
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                return gzip.decompress(resp.read())
        except (urllib.error.URLError, OSError, gzip.BadGzipFile) as e:
            print(f"  {url}: {e}", file=sys.stderr)
            last_error = e
    raise SystemExit(f"all mirrors failed for {name}: {last_error}")


def check(name: str, blob: bytes) -> None:
    magic, min_payload = FILES[name]
    if len(blob) < 4 + min_payload:
        raise SystemExit(f"{name}: truncated ({len(blob)} bytes)")
    (got,) = struct.unpack(">i", blob[:4])
    if got != magic:
        raise SystemExit(f"{name}: bad magic {got}, expected {magic}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--dest",
        type=pathlib.Path,
        default=pathlib.Path(__file__).resolve().parent.parent / "data" / "mnist",
        help="directory to place the unpacked idx files in",
    )
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)

    for name in FILES:
        target = args.dest / name
        if target.exists():
            check(name, target.read_bytes())
            print(f"{target} already present, kept")
            continue
        print(f"downloading {name} ...")
        blob = fetch(name)
        check(name, blob)
        target.write_bytes(blob)
        print(f"wrote {target} ({len(blob)} bytes)")

    print(f"done; point OCSVM_MNIST_DIR at {args.dest} or run from the repository root")


if __name__ == "__main__":
    main()
