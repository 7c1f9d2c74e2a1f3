"""Order motion frames (video poses) from known poses or rectangle masks.

With masks only, the pairwise distance combines the centroid shift with the
relative rotation recovered from how much the two rectangles overlap once
both are centred.  Overlap cannot tell the sign of the rotation, so the
estimate lies in [0, pi/2], or less for near-square masks (see
identifiable_angle); consecutive frames must turn by less than that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import AreaOutOfRange, DegeneratePolygon, MissingMask, StartRequired
from .liegroup import MetricWeights, PlanarMotion
from .reconstruct import (
    DEFAULT_SLACK,
    WeightedCompleteGraph,
    order_mst,
    order_nn,
    order_nncrust_r3,
)
from .sampling import SampleSet

ALGORITHMS = ("mst", "nn", "nncrust")


@dataclass(frozen=True, eq=False)
class Mask:
    """Rectangle with sides a <= b, placed at the given four corners (pixels)."""

    a: float
    b: float
    corners: np.ndarray

    def __post_init__(self):
        if not (0 < self.a <= self.b):
            raise ValueError(f"mask sides need 0 < a <= b, got a={self.a}, b={self.b}")
        c = np.array(self.corners, dtype=float)
        if c.shape != (4, 2) or not np.all(np.isfinite(c)):
            raise ValueError("mask needs four finite (x, y) corners")
        c.setflags(write=False)
        object.__setattr__(self, "corners", c)

    @property
    def centroid(self):
        return self.corners.mean(axis=0)


@dataclass(frozen=True, eq=False)
class FrameRecord:
    id: str
    pose: PlanarMotion | None = None
    mask: Mask | None = None

    def __post_init__(self):
        if self.pose is None and self.mask is None:
            raise ValueError(f"frame {self.id!r} has neither pose nor mask")


@dataclass
class OrderingResult:
    order: list
    closed: bool
    algorithm: str
    max_degree: int = 2
    pairwise_report: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, with_matrix=False):
        out = {"order": list(self.order), "closed": self.closed,
               "algorithm": self.algorithm, "max_degree": self.max_degree}
        if with_matrix and self.pairwise_report is not None:
            out["pairwise_report"] = [[float(x) for x in row] for row in self.pairwise_report]
        return out


def polygon_area(poly):
    """Signed shoelace area (positive for counter-clockwise)."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _ccw(poly):
    p = np.asarray(poly, dtype=float)
    return p if polygon_area(p) >= 0 else p[::-1]


def clip_convex(subject, clip):
    """Sutherland-Hodgman: part of polygon ``subject`` inside convex ``clip``."""
    out = [tuple(p) for p in _ccw(subject)]
    c = _ccw(clip)
    for k in range(len(c)):
        if not out:
            break
        a, b = c[k], c[(k + 1) % len(c)]
        ex, ey = b[0] - a[0], b[1] - a[1]

        def side(p):
            return ex * (p[1] - a[1]) - ey * (p[0] - a[0])

        inp, out = out, []
        for i in range(len(inp)):
            p, q = inp[i], inp[(i + 1) % len(inp)]
            sp, sq = side(p), side(q)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0):
                r = sp / (sp - sq)
                out.append((p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])))
    return np.array(out, dtype=float).reshape(-1, 2)


def rectangle(a, b, theta=0.0, center=(0.0, 0.0)):
    """Corners of a b-by-a rectangle (long side along x before rotation)."""
    c, s = math.cos(theta), math.sin(theta)
    half = np.array([[-b, -a], [b, -a], [b, a], [-b, a]]) / 2.0
    return half @ np.array([[c, s], [-s, c]]) + np.asarray(center, dtype=float)


def overlap_area(a: float, b: float, theta: float) -> float:
    """Intersection area of an a-by-b rectangle and its copy turned by theta
    about the common centre, by exact polygon clipping."""
    if not (0 < a <= b):
        raise ValueError("need 0 < a <= b")
    if not (0.0 <= theta <= math.pi / 2 + 1e-12):
        raise ValueError("theta must lie in [0, pi/2]")
    return abs(polygon_area(clip_convex(rectangle(a, b), rectangle(a, b, theta))))


def closed_form_regime(a: float, b: float) -> float:
    """Smallest angle from which the overlap is the parallelogram of area
    a^2 / sin(theta): the turned copy's short sides then clear the long
    sides of the original, i.e. theta >= 2 arctan(a / b)."""
    return 2.0 * math.atan2(a, b)


@lru_cache(maxsize=256)
def identifiable_angle(a: float, b: float) -> float:
    """Angle at which the overlap bottoms out. For b/a above roughly 1.3 this
    is pi/2; nearer a square the overlap dips and climbs back, so the area
    only pins down angles up to this point."""
    th = np.linspace(0.0, math.pi / 2, 257)
    areas = np.array([overlap_area(a, b, t) for t in th])
    i = int(np.argmin(areas))
    if i == len(th) - 1 or areas[i] >= areas[-1] - 1e-12 * a * b:
        return math.pi / 2
    res = minimize_scalar(lambda t: overlap_area(a, b, t), bounds=(th[i - 1], th[i + 1]),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def estimate_rotation_from_area(a: float, b: float, area: float, tol: float = 1e-14) -> float:
    """Invert overlap_area on [0, identifiable_angle(a, b)], where the area
    decreases monotonically from a*b. Inside the parallelogram regime the
    inverse is arcsin(a^2 / area); elsewhere a bracketed root search."""
    top = identifiable_angle(a, b)
    lo_area, hi_area = overlap_area(a, b, top), a * b
    slack = 1e-9 * hi_area
    if not (lo_area - slack <= area <= hi_area + slack):
        raise AreaOutOfRange(f"area {area} outside [{lo_area}, {hi_area}]")
    if area >= hi_area:
        return 0.0
    if area <= lo_area:
        return top
    th0 = closed_form_regime(a, b)
    if th0 <= top and area <= a * a / math.sin(th0):
        return math.asin(a * a / area)
    hi = min(th0, top)
    return brentq(lambda t: overlap_area(a, b, t) - area, 0.0, hi, xtol=tol, rtol=4 * np.finfo(float).eps)


def _require_mask(f):
    if f.mask is None:
        raise MissingMask(f"frame {f.id!r} has no mask")
    return f.mask


def estimate_translation(f1: FrameRecord, f2: FrameRecord):
    """Centroid shift from frame 1 to frame 2."""
    return _require_mask(f2).centroid - _require_mask(f1).centroid


def centred_overlap(f1: FrameRecord, f2: FrameRecord) -> float:
    m1, m2 = _require_mask(f1), _require_mask(f2)
    return abs(polygon_area(clip_convex(m1.corners - m1.centroid, m2.corners - m2.centroid)))


def estimate_rotation(f1: FrameRecord, f2: FrameRecord, area_measured: float | None = None) -> float:
    """Unsigned relative rotation in [0, pi/2] from the overlap area of the
    two centred masks (measured here unless ``area_measured`` is given)."""
    m1 = _require_mask(f1)
    _require_mask(f2)
    if area_measured is None:
        area_measured = centred_overlap(f1, f2)
    return estimate_rotation_from_area(m1.a, m1.b, area_measured)


def lattice_area(polygon) -> float:
    """Area estimate from integer lattice points: I + B/2 - 1 for I interior
    and B boundary points (exact for polygons with lattice vertices)."""
    p = np.asarray(polygon, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3 or abs(polygon_area(p)) < 1e-12:
        raise DegeneratePolygon("polygon needs at least three vertices and nonzero area")
    lo = np.ceil(p.min(axis=0) - 1e-9).astype(int)
    hi = np.floor(p.max(axis=0) + 1e-9).astype(int)
    xs, ys = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1))
    x, y = xs.ravel().astype(float), ys.ravel().astype(float)
    q = np.roll(p, -1, axis=0)
    on_edge = np.zeros(len(x), dtype=bool)
    winding = np.zeros(len(x), dtype=int)
    for (x0, y0), (x1, y1) in zip(p, q):
        cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)
        within = (np.minimum(x0, x1) - 1e-9 <= x) & (x <= np.maximum(x0, x1) + 1e-9) & \
                 (np.minimum(y0, y1) - 1e-9 <= y) & (y <= np.maximum(y0, y1) + 1e-9)
        on_edge |= within & (np.abs(cross) <= 1e-9 * max(1.0, math.hypot(x1 - x0, y1 - y0)))
        up = (y0 <= y) & (y1 > y) & (cross > 0)
        down = (y0 > y) & (y1 <= y) & (cross < 0)
        winding += up.astype(int) - down.astype(int)
    boundary = int(on_edge.sum())
    interior = int(((winding != 0) & ~on_edge).sum())
    return interior + boundary / 2.0 - 1.0


def mask_distance_matrix(frames, w: MetricWeights):
    """d*(i, j) = sqrt(alpha theta*^2 + beta |centroid shift|^2)."""
    n = len(frames)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            th = estimate_rotation(frames[i], frames[j])
            dc = estimate_translation(frames[i], frames[j])
            D[i, j] = D[j, i] = math.sqrt(w.alpha * th * th + w.beta * float(dc @ dc))
    return D


def _canonical_ids(ids, closed):
    """Direction/rotation-free form keyed on ids, so input order does not matter."""
    ids = list(ids)
    if len(ids) < 2:
        return ids
    if not closed:
        return ids if ids[0] < ids[-1] else ids[::-1]
    k = ids.index(min(ids))
    ids = ids[k:] + ids[:k]
    if len(ids) > 2 and ids[-1] < ids[1]:
        ids = [ids[0]] + ids[:0:-1]
    return ids


def order_frames(frames, w: MetricWeights = MetricWeights(), algorithm: str = "mst",
                 start: str | None = None, source: str = "auto",
                 slack: float = DEFAULT_SLACK) -> OrderingResult:
    """Recover the frame order.

    ``source`` picks the distance: 'pose' (given poses), 'mask' (estimated
    from masks) or 'auto' (poses when every frame has one).  MST and
    NN-CRUST results are returned in an id-canonical direction; NN keeps
    ``start`` first.
    """
    frames = list(frames)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    ids = [f.id for f in frames]
    if len(set(ids)) != len(ids):
        raise ValueError("frame ids must be unique")
    if algorithm == "nn" and start is None:
        raise StartRequired("the nearest-neighbour chain needs a start frame")
    if start is not None and start not in ids:
        raise ValueError(f"unknown start frame {start!r}")
    if source == "auto":
        source = "pose" if all(f.pose is not None for f in frames) else "mask"
    if source == "pose":
        if any(f.pose is None for f in frames):
            raise ValueError("some frames have no pose")
        s = SampleSet("se2", [f.pose.as_array() for f in frames], w)
        D = s.distance_matrix()
    elif source == "mask":
        if algorithm == "nncrust":
            raise ValueError("nncrust needs poses; mask distances give no coordinates")
        s = None
        D = mask_distance_matrix(frames, w)
    else:
        raise ValueError(f"unknown source {source!r}")
    g = WeightedCompleteGraph(D)
    if algorithm == "mst":
        p = order_mst(s, slack, graph=g)
    elif algorithm == "nn":
        p = order_nn(s, ids.index(start), slack, graph=g)
    else:
        p = order_nncrust_r3(s, w, slack)
    out = [ids[i] for i in p.order]
    if algorithm != "nn":
        out = _canonical_ids(out, p.closed)
    return OrderingResult(out, p.closed, algorithm, p.max_degree, D)


def generate_frames(n: int = 16, a: float = 40.0, b: float = 100.0, turn: float = 0.9):
    """A rigid motion sampled at n frames: the mask turns by ``turn`` radians
    in total while its centre sweeps (100 + 300 t, 200 + 80 sin(pi t)) pixels.
    Records carry both the pose and the mask; ids are 'frame-00', ..."""
    out = []
    for i in range(n):
        t = i / (n - 1) if n > 1 else 0.0
        th = turn * t
        c = (100.0 + 300.0 * t, 200.0 + 80.0 * math.sin(math.pi * t))
        out.append(FrameRecord(f"frame-{i:02d}", PlanarMotion(th, *c), Mask(a, b, rectangle(a, b, th, c))))
    return out
