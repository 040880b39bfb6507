#!/usr/bin/env python3
"""Fetch the standard grayscale test images and convert them to 256x256 P5 PGM.

Sources reachable through ordinary package registries:

  cameraman  npm package `cameraman`      (cameraman.tif, already 256x256)
  lena       npm package `lena`           (512x512 RGB ndarray, base64 in lena.js)
  mandrill   npm package `baboon-image`   (baboon.png, 512x512 RGB)
  barbara    PyPI wheel  `sporco`         (sporco/data/barbara.png)

house, peppers, livingroom and boat are not published on any package
registry. Drop them (any format Pillow reads, named house.*, peppers.*,
livingroom.*, boat.*) into a directory and pass it with --extra.

Conversion: ITU-R 601 luma, centre crop to square, box-filter resize to
256x256, written as binary PGM with maxval 255.

Usage:
    python3 scripts/fetch_test_images.py [--out data/images] [--extra DIR]
"""

import argparse
import base64
import glob
import io
import os
import re
import subprocess
import sys
import tarfile
import tempfile
import zipfile

from PIL import Image

NAMES = ["cameraman", "lena", "barbara", "house", "peppers", "livingroom", "boat", "mandrill"]
SIZE = 256


def to_pgm(img: Image.Image, path: str) -> None:
    img = img.convert("L")
    w, h = img.size
    side = min(w, h)
    left, top = (w - side) // 2, (h - side) // 2
    img = img.crop((left, top, left + side, top + side))
    if side != SIZE:
        img = img.resize((SIZE, SIZE), Image.BOX)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (SIZE, SIZE))
        f.write(img.tobytes())


def npm_pack(pkg: str, workdir: str) -> tarfile.TarFile:
    subprocess.run(["npm", "pack", pkg], cwd=workdir, check=True,
                   stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, timeout=600)
    tgz = glob.glob(os.path.join(workdir, pkg + "-*.tgz"))[0]
    return tarfile.open(tgz)


def fetch_cameraman(workdir):
    tar = npm_pack("cameraman", workdir)
    return Image.open(io.BytesIO(tar.extractfile("package/cameraman.tif").read()))


def fetch_lena(workdir):
    tar = npm_pack("lena", workdir)
    js = tar.extractfile("package/lena.js").read().decode()
    payload = re.search(r"base64decode\(\s*'([^']+)'", js).group(1)
    raw = base64.b64decode(payload)
    return Image.frombytes("RGB", (512, 512), raw)


def fetch_mandrill(workdir):
    tar = npm_pack("baboon-image", workdir)
    return Image.open(io.BytesIO(tar.extractfile("package/baboon.png").read()))


def fetch_barbara(workdir):
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "--timeout", "120",
                    "-d", workdir, "sporco"], check=True,
                   stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, timeout=900)
    whl = glob.glob(os.path.join(workdir, "sporco-*.whl"))[0]
    data = zipfile.ZipFile(whl).read("sporco/data/barbara.png")
    return Image.open(io.BytesIO(data))


FETCHERS = {
    "cameraman": fetch_cameraman,
    "lena": fetch_lena,
    "mandrill": fetch_mandrill,
    "barbara": fetch_barbara,
}


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/images")
    ap.add_argument("--extra", help="directory holding house/peppers/livingroom/boat in any format")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    missing = []
    with tempfile.TemporaryDirectory() as work:
        for name in NAMES:
            dest = os.path.join(args.out, name + ".pgm")
            if os.path.exists(dest):
                print(f"{name}: present")
                continue
            img = None
            if args.extra:
                hits = sorted(glob.glob(os.path.join(args.extra, name + ".*")))
                if hits:
                    img = Image.open(hits[0])
            if img is None and name in FETCHERS:
                try:
                    img = FETCHERS[name](work)
                except Exception as exc:  # registry unreachable, package moved
                    print(f"{name}: fetch failed ({exc})", file=sys.stderr)
            if img is None:
                missing.append(name)
                print(f"{name}: MISSING")
                continue
            tmp = dest + ".tmp"
            to_pgm(img, tmp)
            os.replace(tmp, dest)
            print(f"{name}: wrote {dest}")

    if missing:
        print("missing images: " + ", ".join(missing), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
