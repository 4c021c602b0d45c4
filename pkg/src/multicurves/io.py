"""File formats: curve CSV + JSON sidecar, track CSV + JSON, reports, PPM/PNG images.

Floats are written with Python's shortest round-trip repr, so reading a
file back and writing it again reproduces it byte for byte.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .multicurve import MultiCurve

SCHEMA = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and complex values for json."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _write_columns(path, thetas, cols):
    p = len(cols)
    header = ["theta"] + [f"{part}_{i}" for i in range(p) for part in ("re", "im")]
    lines = [",".join(header)]
    for k, t in enumerate(thetas):
        row = [_fmt(t)]
        for c in cols:
            row.append(_fmt(c[k].real))
            row.append(_fmt(c[k].imag))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def _read_columns(path):
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    if header[0] != "theta" or (len(header) - 1) % 2:
        raise ValueError(f"{path}: unexpected header {text[0]!r}")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    if data.ndim != 2:
        data = data.reshape(0, len(header))
    cols = [data[:, 1 + 2 * i] + 1j * data[:, 2 + 2 * i] for i in range((len(header) - 1) // 2)]
    return data[:, 0], cols


def write_curve(path, curve: MultiCurve, recipe: dict | None = None) -> tuple:
    """Write the unfolding samples and the sidecar; returns the two paths."""
    path = Path(path)
    th = np.arange(curve.M) / curve.M
    _write_columns(path, th, curve.components)
    meta = {"schema": SCHEMA, "n": curve.n, "p": curve.p, "N": curve.M,
            "base_points": curve.base_points, "interpolation": curve.interpolation}
    if recipe is not None:
        meta["recipe"] = recipe
    side = sidecar_path(path)
    write_json(side, meta)
    return path, side


def read_curve(path, validate: bool = True) -> tuple:
    """Return (MultiCurve, sidecar dict)."""
    path = Path(path)
    meta = read_json(sidecar_path(path))
    th, cols = _read_columns(path)
    if len(cols) != meta["p"] or th.size != meta["N"]:
        raise ValueError(f"{path}: CSV shape does not match sidecar (p={meta['p']}, N={meta['N']})")
    curve = MultiCurve(cols, meta["n"], meta.get("interpolation", "linear"), validate=validate)
    return curve, meta


def write_track(path, track) -> tuple:
    path = Path(path)
    _write_columns(path, track.thetas, [track.points[:, j] for j in range(track.points.shape[1])])
    side = sidecar_path(path)
    write_json(side, {"schema": SCHEMA, **track.to_json()})
    return path, side


def read_track(path):
    path = Path(path)
    meta = read_json(sidecar_path(path))
    th, cols = _read_columns(path)
    return th, np.stack(cols, axis=1), meta


# ------------------------------------------------------------------- images

def ppm_bytes(rgb: np.ndarray) -> bytes:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    H, W, _ = rgb.shape
    return b"P6\n%d %d\n255\n" % (W, H) + rgb.tobytes()


def write_ppm(path, rgb: np.ndarray) -> None:
    Path(path).write_bytes(ppm_bytes(rgb))


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    W, H = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(H, W, 3)


def write_png(path, rgb: np.ndarray) -> None:
    try:
        from PIL import Image
    except ImportError as exc:  # optional output
        raise RuntimeError("PNG output needs Pillow; PPM output is always available") from exc
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), "RGB").save(os.fspath(path))


def write_image(path, rgb: np.ndarray) -> None:
    if str(path).lower().endswith(".png"):
        write_png(path, rgb)
    else:
        write_ppm(path, rgb)
