"""Artifact readers and writers: CSV, JSON, PGM."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DomainError, IncompleteData
from .tomography import DensityMatrix, MeasurementRecord, PhotonState, ProjectorPair


def fmt(x) -> str:
    """Round-trip float formatting, stable across runs."""
    return format(float(x), ".17g")


def dump_json(obj, path):
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return {"real": o.real, "imag": o.imag}
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_rows_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_matrix_csv(path, values, axis_rows, axis_cols, corner="s\\i"):
    """Matrix with the column axis as header row and the row axis as first column."""
    values = np.asarray(values, dtype=float)
    rows = [[r, *(fmt(v) for v in values[k])] for k, r in enumerate(axis_rows)]
    return write_rows_csv(path, [corner, *axis_cols], rows)


def read_matrix_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0][1:]
    labels = [r[0] for r in rows[1:]]
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return labels, header, values


def write_pgm(path, values, vmax=None):
    """8-bit binary PGM, values mapped linearly from ``[0, vmax]`` onto ``[0, 255]``."""
    a = np.asarray(values)
    if a.dtype != np.uint8:
        a = np.asarray(a, dtype=float)
        top = float(a.max()) if vmax is None else float(vmax)
        a = np.zeros(a.shape) if top <= 0 else np.clip(a / top, 0.0, 1.0)
        a = np.round(a * 255.0).astype(np.uint8)
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode("ascii"))
        fh.write(a.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise DomainError("not a binary PGM file")
    w, h, _ = int(parts[1]), int(parts[2]), int(parts[3])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def correlation_to_files(matrix, stem, formats=("csv", "json")):
    stem = Path(stem)
    written = []
    if "csv" in formats:
        written.append(write_matrix_csv(stem.with_suffix(".csv"), matrix.values, matrix.axis_s, matrix.axis_i))
    if "json" in formats:
        written.append(dump_json(matrix.to_dict(), stem.with_suffix(".json")))
    written.append(write_pgm(stem.with_suffix(".pgm"), matrix.values))
    return written


# measurement records ----------------------------------------------------------

def write_records_csv(path, records):
    rows = [(r.projector.psi.label, r.projector.zeta.label, r.count) for r in records]
    return write_rows_csv(path, ["psi", "zeta", "count"], rows)


def write_records_json(path, records):
    return dump_json([{"psi": r.projector.psi.label, "zeta": r.projector.zeta.label, "count": r.count}
                      for r in records], path)


def _record(psi, zeta, count):
    try:
        pair = ProjectorPair(PhotonState.parse(str(psi)), PhotonState.parse(str(zeta)))
    except KeyError as exc:
        raise IncompleteData(f"unknown projector label {exc.args[0]!r}") from None
    return MeasurementRecord(pair, float(count))


def read_records(path):
    """Records from CSV (``psi,zeta,count``) or JSON (list of objects with those keys)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return [_record(d["psi"], d["zeta"], d["count"]) for d in json.loads(path.read_text())]
    with path.open(newline="") as fh:
        return [_record(row["psi"], row["zeta"], row["count"]) for row in csv.DictReader(fh)]


# density matrices -------------------------------------------------------------

def basis_labels(dim_photon=4):
    return [f"{pi}{ps}" for pi in range(dim_photon) for ps in range(dim_photon)]


def density_to_dict(rho: DensityMatrix) -> dict:
    m = rho.matrix
    return {"dim": m.shape[0], "basis": basis_labels(), "order": "idler-major |p_i p_s>",
            "real": m.real.tolist(), "imag": m.imag.tolist()}


def density_from_dict(d) -> DensityMatrix:
    return DensityMatrix(np.array(d["real"]) + 1j * np.array(d["imag"]))


def write_density_bars(path, rho: DensityMatrix):
    labels = basis_labels()
    m = rho.matrix
    rows = [(labels[a], labels[b], m[a, b].real, m[a, b].imag) for a in range(m.shape[0]) for b in range(m.shape[1])]
    return write_rows_csv(path, ["row", "col", "real", "imag"], rows)
