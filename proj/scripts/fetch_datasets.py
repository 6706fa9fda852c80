#!/usr/bin/env python3
"""Rebuild data/pima.csv and data/abalone.csv from PyPI packages that bundle them.

The UCI Pima Indians diabetes data (768 rows) ships inside the `keel-ds`
wheel and the UCI abalone data (4177 rows) inside the `scikit-lego` wheel.
Both are downloaded with `pip download`, read in place and rewritten as
plain CSV with a header row.

Usage: python3 scripts/fetch_datasets.py [output_dir]
"""
import csv
import glob
import io
import subprocess
import sys
import tempfile
import zipfile


def wheel(tmp, package):
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                    package, "-d", tmp], check=True, capture_output=True)
    name = package.replace("-", "_")
    return zipfile.ZipFile(glob.glob(f"{tmp}/{name}-*.whl")[0])


def pima(tmp, out):
    raw = wheel(tmp, "keel-ds").read("keel_ds/data/balanced/raw/pima.dat").decode()
    header = ["pregnant", "glucose", "pressure", "triceps", "insulin", "bmi",
              "pedigree", "age", "diabetes"]
    with open(f"{out}/pima.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            cells = [c.strip() for c in line.split(",")]
            cells[-1] = "1" if cells[-1] == "tested_positive" else "0"
            w.writerow(cells)


def abalone(tmp, out):
    blob = wheel(tmp, "scikit-lego").read("sklego/data/abalone.zip")
    inner = zipfile.ZipFile(io.BytesIO(blob))
    text = inner.read(inner.namelist()[0]).decode()
    rows = list(csv.reader(io.StringIO(text)))
    with open(f"{out}/abalone.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([h.strip().lower() for h in rows[0]])
        w.writerows(r for r in rows[1:] if r)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    with tempfile.TemporaryDirectory() as tmp:
        pima(tmp, out)
        abalone(tmp, out)
