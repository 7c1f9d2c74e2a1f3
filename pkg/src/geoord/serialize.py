"""JSON file formats.

Floats are written with Python's shortest round-trip repr, so reading a file
back gives the identical doubles and equal inputs give identical bytes.

Sample file::

    {"manifold": "se3", "params": {"alpha": 1.0, "beta": 1.0, "radius": 1.0},
     "points": [{"rotation": [9 floats, row-major], "translation": [3 floats]}, ...],
     "ids": [...], "order": [...], "closed": false, "velocities": [[6], [6]]}

where "ids", "order", "closed" and "velocities" are optional and other
manifolds store each point as a flat list (plane [x, y], s2 [x, y, z],
se2 [theta, u, v], scaled_se2 [lambda, theta, dx, dy]).
"""
from __future__ import annotations

import json
import sys

import numpy as np

from .frames import FrameRecord, Mask
from .liegroup import MetricWeights, PlanarMotion, Twist
from .sampling import MANIFOLDS, SampleSet


class InputError(ValueError):
    """A file is missing, unreadable or does not match its format."""


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def write_json(path, obj):
    text = dumps(obj)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_json(path):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _flt(x):
    return [float(v) for v in np.ravel(x)]


def sample_to_dict(s: SampleSet, **extra):
    if s.manifold == "se3":
        pts = [{"rotation": _flt(m[:3, :3]), "translation": _flt(m[:3, 3])} for m in s.points]
    else:
        pts = [_flt(p) for p in s.points]
    out = {
        "manifold": s.manifold,
        "params": {"alpha": s.weights.alpha, "beta": s.weights.beta, "radius": float(s.radius)},
        "points": pts,
    }
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def sample_from_dict(d, alpha=None, beta=None):
    """SampleSet from a parsed sample file; ``alpha``/``beta`` override params."""
    try:
        if not isinstance(d, dict):
            raise InputError("sample file must be a JSON object")
        man = d["manifold"]
        if man not in MANIFOLDS:
            raise InputError(f"unknown manifold {man!r}")
        params = d.get("params", {})
        w = MetricWeights(
            float(alpha if alpha is not None else params.get("alpha", 1.0)),
            float(beta if beta is not None else params.get("beta", 1.0)),
        )
        radius = float(params.get("radius", 1.0))
        raw = d["points"]
        if man == "se3":
            pts = []
            for p in raw:
                m = np.eye(4)
                m[:3, :3] = np.reshape(np.asarray(p["rotation"], dtype=float), (3, 3))
                m[:3, 3] = p["translation"]
                pts.append(m)
        else:
            pts = raw
        return SampleSet(man, pts, w, radius)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad sample file: {exc}") from exc


def velocities_from_dict(d):
    v = d.get("velocities")
    if v is None:
        raise InputError("sample file has no 'velocities'")
    try:
        return [Twist.from_vector(np.asarray(x, dtype=float)) for x in v]
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad velocities: {exc}") from exc


def frames_from_list(data):
    """Frame file: JSON list of {"id", "pose": [theta, u, v], "mask":
    {"a", "b", "corners": [[x, y] x 4]}} with pose and mask each optional."""
    if not isinstance(data, list):
        raise InputError("frame file must be a JSON list")
    out = []
    try:
        for rec in data:
            pose = rec.get("pose")
            mask = rec.get("mask")
            out.append(FrameRecord(
                str(rec["id"]),
                PlanarMotion(*map(float, pose)) if pose is not None else None,
                Mask(float(mask["a"]), float(mask["b"]), mask["corners"]) if mask is not None else None,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad frame record: {exc}") from exc
    return out


def frames_to_list(frames):
    out = []
    for f in frames:
        rec = {"id": f.id}
        if f.pose is not None:
            rec["pose"] = _flt(f.pose.as_array())
        if f.mask is not None:
            rec["mask"] = {"a": float(f.mask.a), "b": float(f.mask.b),
                           "corners": [_flt(c) for c in f.mask.corners]}
        out.append(rec)
    return out
