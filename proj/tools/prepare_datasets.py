#!/usr/bin/env python3
"""Stage the three UCI benchmark files under data/.

Two sources are supported:

  --from-uci DIR       copy the canonical UCI downloads (processed.cleveland.data,
                       wdbc.data, ionosphere.data) from DIR.
  --from-packages      rebuild the same column layouts from copies bundled in
                       PyPI packages (scikit-learn for WDBC, the Orange3 wheel
                       for Cleveland heart disease and ionosphere).  Useful on
                       machines that can reach a package index but not UCI.

Output files: data/hdds.csv, data/bcds.csv, data/ids.csv.  A SHA-256 line is
printed for each file so it can be compared against the table in README.md.
"""

import argparse
import glob
import hashlib
import os
import shutil
import subprocess
import sys
import tempfile
import zipfile

UCI_FILES = {
    "hdds": "processed.cleveland.data",
    "bcds": "wdbc.data",
    "ids": "ionosphere.data",
}

CHEST_PAIN = {"typical ang": 1, "atypical ang": 2, "non-anginal": 3, "asymptomatic": 4}
REST_ECG = {"normal": 0, "ST-T abnormal": 1, "left vent hypertrophy": 2}
SLOPE = {"upsloping": 1, "flat": 2, "downsloping": 3}
THAL = {"normal": 3, "fixed defect": 6, "reversable defect": 7}
GENDER = {"female": 0, "male": 1}


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        h.update(f.read())
    return h.hexdigest()


def as_float(text):
    if text in ("?", ""):
        return "?"
    return repr(float(text))


def coded(table, text):
    if text in ("?", ""):
        return "?"
    return repr(float(table[text]))


def heart_from_orange(tab_text):
    lines = tab_text.splitlines()[3:]
    out = []
    for line in lines:
        c = line.split("\t")
        row = [
            as_float(c[0]), coded(GENDER, c[1]), coded(CHEST_PAIN, c[2]),
            as_float(c[3]), as_float(c[4]), as_float(c[5]), coded(REST_ECG, c[6]),
            as_float(c[7]), as_float(c[8]), as_float(c[9]), coded(SLOPE, c[10]),
            as_float(c[11]), coded(THAL, c[12]), c[13],
        ]
        out.append(",".join(row))
    return "\n".join(out) + "\n"


def ionosphere_from_orange(tab_text):
    lines = tab_text.splitlines()[3:]
    return "\n".join(",".join(line.split("\t")) for line in lines) + "\n"


def wdbc_from_sklearn():
    import sklearn

    path = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", "breast_cancer.csv")
    with open(path) as f:
        rows = f.read().splitlines()[1:]
    out = []
    for i, line in enumerate(rows, start=1):
        c = line.split(",")
        diagnosis = "M" if c[-1] == "0" else "B"
        # The bundled copy has no patient id column; a sequential id keeps the
        # canonical layout (the schema ignores column 0).
        out.append(",".join([str(i), diagnosis] + c[:-1]))
    return "\n".join(out) + "\n"


def orange_wheel():
    tmp = tempfile.mkdtemp(prefix="orange-wheel-")
    subprocess.check_call(
        [sys.executable, "-m", "pip", "download", "orange3", "--no-deps", "-q", "-d", tmp]
    )
    wheels = glob.glob(os.path.join(tmp, "*.whl"))
    if not wheels:
        sys.exit("pip download did not produce an Orange3 wheel")
    return zipfile.ZipFile(wheels[0])


def from_packages(out_dir):
    wheel = orange_wheel()
    files = {
        "hdds": heart_from_orange(wheel.read("Orange/datasets/heart_disease.tab").decode()),
        "ids": ionosphere_from_orange(wheel.read("Orange/tests/datasets/ionosphere.tab").decode()),
        "bcds": wdbc_from_sklearn(),
    }
    for key, text in files.items():
        with open(os.path.join(out_dir, key + ".csv"), "w", newline="\n") as f:
            f.write(text)


def from_uci(src_dir, out_dir):
    for key, name in UCI_FILES.items():
        src = os.path.join(src_dir, name)
        if not os.path.exists(src):
            sys.exit(f"missing {src}")
        shutil.copyfile(src, os.path.join(out_dir, key + ".csv"))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    group = ap.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-uci", metavar="DIR")
    group.add_argument("--from-packages", action="store_true")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    if args.from_uci:
        from_uci(args.from_uci, args.out)
    else:
        from_packages(args.out)
    for key in UCI_FILES:
        path = os.path.join(args.out, key + ".csv")
        with open(path) as f:
            n = sum(1 for line in f if line.strip())
        print(f"{key}.csv  rows={n}  sha256={sha256(path)}")


if __name__ == "__main__":
    main()
