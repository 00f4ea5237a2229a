"""Plot-ready CSV/JSON writers and file manifests.

CSV files start with ``#`` comment lines (provenance, units, config hash),
followed by one header row and comma-separated data rows, which gnuplot
reads with ``set datafile separator ','`` and ``columnhead``.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

FLOAT_FMT = "{:.12e}"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return FLOAT_FMT.format(x)


def write_csv(path, columns: Mapping[str, Sequence], comments: Iterable[str] = ()) -> Path:
    """Write equal-length columns with leading comment lines."""
    path = Path(path)
    names = list(columns)
    cols = [list(columns[k]) for k in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {dict(zip(names, map(len, cols)))}")
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    """Read a file written by :func:`write_csv`.

    Returns (comments, columns); numeric columns become float arrays, any
    other column an array of strings.
    """
    comments, header, rows = [], None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    raw = np.array(rows, dtype=str).reshape(-1, len(header))
    cols = {}
    for k, name in enumerate(header):
        try:
            cols[name] = raw[:, k].astype(float)
        except ValueError:
            cols[name] = raw[:, k]
    return comments, cols


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and NaN/inf to JSON-safe values."""
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(jsonable(obj), indent=2) + "\n")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(directory, names: Sequence[str], filename: str = "manifest.json") -> Path:
    """Record sha256 of each listed file (relative to `directory`)."""
    directory = Path(directory)
    entries = {name: sha256_file(directory / name) for name in names}
    return write_json(directory / filename, {"files": entries})


def verify_manifest(directory, filename: str = "manifest.json") -> dict:
    """Re-hash every file in the manifest; returns {name: 'ok' | 'mismatch' | 'missing'}."""
    directory = Path(directory)
    manifest = json.loads((directory / filename).read_text())
    status = {}
    for name, digest in manifest["files"].items():
        p = directory / name
        if not p.exists():
            status[name] = "missing"
        else:
            status[name] = "ok" if sha256_file(p) == digest else "mismatch"
    return status


# --- single-object exporters -------------------------------------------------


def export_strength_function(est, path, comments: Iterable[str] = ()) -> Path:
    """CSV of (E, P_i(E)) samples from a StrengthFunctionEstimate."""
    notes = [f"strength function of basis state {est.i}", f"bandwidth = {est.bandwidth:.12g}"]
    return write_csv(path, {"E": est.energies, "P": est.density}, notes + list(comments))


def export_density_of_states(summary, path, comments: Iterable[str] = ()) -> Path:
    notes = [
        f"N = {summary.N}",
        f"gaussian fit: sigma = {summary.sigma:.12g}, E_c = {summary.E_center:.12g}, D = {summary.D:.12g}",
    ]
    return write_csv(
        path,
        {"E": summary.energies, "rho": summary.rho, "rho_fit": summary.rho_model(summary.energies)},
        notes + list(comments),
    )


def strength_moments(est) -> dict:
    return {
        "i": est.i,
        "centroid": est.centroid,
        "variance": est.variance,
        "delta_e": est.delta_e,
        "H_ii": est.H_ii,
        "shift": est.shift,
        "peak_shift": est.peak_shift,
        "bandwidth": est.bandwidth,
    }


def export_survival(series, path, npc_t: Optional[Sequence[float]] = None,
                    comments: Iterable[str] = ()) -> Path:
    """CSV with columns t, W_exact and optionally N_pc_t."""
    cols = {"t": series.t, "W_exact": series.w}
    if npc_t is not None:
        cols["N_pc_t"] = npc_t
    return write_csv(path, cols, [f"provenance = {series.provenance}"] + list(comments))
