"""Artifact writers: CSV, binary PGM and JSON, plus checksums."""
import hashlib
import json
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "%.17g"


def write_csv(path, header, rows):
    """Comma-separated values with a header row; floats at 17 significant digits."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, rows, fmt=FLOAT_FORMAT, delimiter=",")
    return Path(path)


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def write_rows(path, header, rows):
    """CSV rows of mixed types (strings pass through, floats at 17 digits)."""
    def fmt(v):
        if isinstance(v, float):
            return FLOAT_FORMAT % v
        return "" if v is None else str(v)

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row.get(key)) for key in header) + "\n")
    return Path(path)


def write_operator_csv(path, entries):
    entries = np.asarray(entries)
    header = [f"c{j}" for j in range(entries.shape[1])]
    return write_csv(path, header, entries)


def read_operator_csv(path):
    return read_csv(path)[1]


def write_pgm(path, image):
    """8-bit binary PGM (P5, maxval 255); ``image`` holds values in [0, 1]."""
    pixels = np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
    return Path(path)


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, payload = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit binary PGM")
    width, height = (int(v) for v in dims.split())
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width)


def write_json(path, record):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return Path(path)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def sha256_array(array):
    return hashlib.sha256(np.ascontiguousarray(array, dtype=np.float64).tobytes()).hexdigest()
