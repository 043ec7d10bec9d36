"""Frame records, manifests and diagnostic tables on disk.

Frames are newline-delimited JSON records ``{"t", "N", "positions",
"min_speed", "arc_length"}`` with positions flattened row-major to 3N numbers.
Python's float repr is the shortest decimal string that round-trips, so a
record read back reproduces the filament bit for bit.  Every file is written
to a temporary name in the target directory and renamed into place.
"""
import csv
import io
import json
import os
import tempfile

import numpy as np

from .errors import InputError
from .filament import Filament

FORMAT = "vortex-lie/1"
FRAMES_FILE = "frames.jsonl"
MANIFEST_FILE = "manifest.json"
DIAGNOSTICS_FILE = "diagnostics.csv"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def frame_record(f):
    return {
        "t": f.time,
        "N": f.n,
        "positions": f.positions.ravel().tolist(),
        "min_speed": f.min_speed,
        "arc_length": float(f.speed.mean()),
    }


def filament_from_record(rec):
    try:
        n = int(rec["N"])
        pos = np.array(rec["positions"], dtype=float)
        t = float(rec["t"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed frame record: {exc}") from exc
    if pos.size != 3 * n:
        raise InputError(f"frame record has {pos.size} numbers, expected 3N = {3 * n}")
    return Filament(pos.reshape(n, 3), t)


def write_frames(frames, path):
    lines = [json.dumps(frame_record(f)) for f in frames]
    return _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_frames(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return [filament_from_record(json.loads(line)) for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def read_frame(path, index=0):
    frames = read_frames(path)
    if not -len(frames) <= index < len(frames):
        raise InputError(f"{path}: frame {index} requested, file holds {len(frames)}")
    return frames[index]


def write_trajectory(traj, directory, config=None, extra=None):
    """Write frames.jsonl and manifest.json; returns the manifest dict.

    ``config`` is echoed into the manifest (a RunConfig, anything with
    ``to_dict``, or a plain dict); without it the solver config is echoed.
    """
    frames_path = os.path.join(directory, FRAMES_FILE)
    write_frames(traj.frames, frames_path)
    if config is None:
        echo = {"solver": traj.config.to_dict()}
    elif hasattr(config, "to_dict"):
        echo = config.to_dict()
    else:
        echo = dict(config)
    manifest = {
        "format": FORMAT,
        "frames": {
            "file": FRAMES_FILE,
            "count": len(traj.frames),
            "fields": ["t", "N", "positions", "min_speed", "arc_length"],
            "positions_layout": "row-major (N, 3)",
        },
        "config": echo,
        "termination": traj.termination.to_dict(),
    }
    if traj.picard_iterations:
        manifest["picard_iterations_max"] = max(traj.picard_iterations)
    if extra:
        manifest.update(extra)
    write_manifest(manifest, directory)
    return manifest


def write_manifest(manifest, directory):
    path = os.path.join(directory, MANIFEST_FILE)
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(directory):
    with open(os.path.join(directory, MANIFEST_FILE), encoding="utf-8") as fh:
        return json.load(fh)


def write_diagnostics(times, series, directory, filename=DIAGNOSTICS_FILE):
    """CSV table: a ``t`` column, then one column per named series."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise InputError("times must be one-dimensional")
    names = list(series)
    cols = []
    for name in names:
        col = np.asarray(series[name], dtype=float)
        if col.shape != times.shape:
            raise InputError(f"series {name!r} has length {col.size}, expected {times.size}")
        cols.append(col)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + names)
    for i, t in enumerate(times):
        w.writerow([repr(float(t))] + [repr(float(c[i])) for c in cols])
    return _atomic_write(os.path.join(directory, filename), buf.getvalue())


def read_diagnostics(path):
    """Dict column name -> float array."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty table")
    header = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return {name: data[:, j] for j, name in enumerate(header)}


def write_json(obj, path):
    return _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
