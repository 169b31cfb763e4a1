"""Fetch the MovieLens 100K ratings as data/ml-100k/u.data (tab separated).

The canonical GroupLens download is tried first. When it is unreachable the
ratings are taken from the recbole wheel, which bundles the same 100,000
ratings as ``ml-100k.inter`` (a TSV with one header line); the header is
dropped so the output matches the original ``u.data`` layout.

    python3 scripts/fetch_movielens.py [--out data/ml-100k] [--wheel path.whl]
"""
from __future__ import annotations

import argparse
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

GROUPLENS = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
INTER = "recbole/dataset_example/ml-100k/ml-100k.inter"


def from_grouplens(timeout: float = 20.0) -> bytes:
    with urllib.request.urlopen(GROUPLENS, timeout=timeout) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_wheel(wheel: Path | None) -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        if wheel is None:
            subprocess.run(
                [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
                 "recbole==1.2.1", "-d", tmp],
                check=True,
            )
            wheel = next(Path(tmp).glob("recbole-*.whl"))
        with zipfile.ZipFile(wheel) as archive:
            lines = archive.read(INTER).decode("utf-8").splitlines()
    if not lines[0].startswith("user_id"):
        raise RuntimeError(f"unexpected header in {INTER}: {lines[0]!r}")
    return ("\n".join(lines[1:]) + "\n").encode("utf-8")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/ml-100k")
    parser.add_argument("--wheel", type=Path, help="use an already downloaded recbole wheel")
    args = parser.parse_args(argv)

    data = None
    if args.wheel is None:
        try:
            data = from_grouplens()
        except OSError as exc:
            print(f"grouplens unavailable ({exc}); using the recbole wheel", file=sys.stderr)
    if data is None:
        data = from_wheel(args.wheel)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "u.data").write_bytes(data)
    count = data.count(b"\n")
    print(f"wrote {out / 'u.data'} ({count} ratings)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
