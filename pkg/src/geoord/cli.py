"""geoord command line.

Exit codes: 0 success, 1 bad input, 2 the samples could not be ordered
(branching spanning tree or non-manifold NN-CRUST output).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import svg
from .curves import DEMO_NAMES, get_curve
from .errors import BranchingTree, GeoordError, NonManifoldOutput
from .frames import ALGORITHMS, order_frames
from .interpolate import (
    BoundaryData,
    INTERPOLATORS,
    MotionCurve,
    interpolate_decasteljau,
)
from .liegroup import MetricWeights
from .reconstruct import DEFAULT_SLACK, OrderedPath, order_mst, order_nn, order_nncrust_r3
from .sampling import check_uniform_sample
from .serialize import (
    InputError,
    frames_from_list,
    read_json,
    sample_from_dict,
    sample_to_dict,
    velocities_from_dict,
    write_json,
    write_text,
)

SCHEME_NAMES = {"geodesic": "geodesic", "partial": "partial_geodesic", "decasteljau": "de_casteljau"}


def _add_metric(p):
    p.add_argument("--alpha", type=float, default=None, help="rotation weight (default: file value or 1)")
    p.add_argument("--beta", type=float, default=None, help="translation weight (default: file value or 1)")


def _add_io(p, need_input=True):
    p.add_argument("--input", required=need_input, help="input JSON file ('-' for stdin)")
    p.add_argument("--output", default="-", help="output file (default: stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="geoord", description="Order and interpolate curve samples on manifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", help="recover the order of a sample file")
    _add_io(p)
    _add_metric(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mst")
    p.add_argument("--start", help="start sample (index, or id when the file has ids); needed for nn")
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK, help="loop closure slack")
    p.add_argument("--threads", type=int, default=None, help="worker threads for distances")

    p = sub.add_parser("interpolate", help="upsample ordered samples into a motion")
    _add_io(p)
    p.add_argument("--order", help="ordering result file (default: order in the sample file, else file order)")
    p.add_argument("--scheme", choices=tuple(SCHEME_NAMES), default="geodesic")
    p.add_argument("--k", type=int, default=8, help="steps per segment (output samples for decasteljau)")
    p.add_argument("--svg", help="also write an SVG plot here")

    p = sub.add_parser("demo", help="write a shuffled demo sample and its truth file")
    p.add_argument("name", choices=DEMO_NAMES)
    p.add_argument("--n", type=int, default=None, help="sample count (default: smallest dense count)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    p.add_argument("--truth", help="truth file (default: <output>.truth.json when writing a file)")

    p = sub.add_parser("check", help="density report of a sample against its truth file")
    _add_io(p)
    p.add_argument("--truth", required=True)
    p.add_argument("--epsilon", type=float, default=None, help="default: the worst gap")

    p = sub.add_parser("plot", help="SVG of a motion curve or an (ordered) sample file")
    _add_io(p)
    p.add_argument("--order", help="ordering result file for sample input")
    p.add_argument("--every", type=int, default=1, help="draw a rotation glyph every m samples")

    p = sub.add_parser("frames", help="order motion frames")
    _add_io(p)
    _add_metric(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mst")
    p.add_argument("--start", help="start frame id (needed for nn)")
    p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    p.add_argument("--source", choices=("auto", "pose", "mask"), default="auto")
    p.add_argument("--matrix", action="store_true", help="include the pairwise distance matrix")
    return ap


def _start_index(start, data, n):
    if start is None:
        return None
    ids = data.get("ids")
    if ids is not None and start in ids:
        return ids.index(start)
    try:
        i = int(start)
    except ValueError:
        raise InputError(f"unknown start {start!r}") from None
    if not 0 <= i < n:
        raise InputError(f"start {i} out of range")
    return i


def cmd_order(args):
    data = read_json(args.input)
    s = sample_from_dict(data, args.alpha, args.beta)
    start = _start_index(args.start, data, len(s))
    if args.algo == "mst":
        p = order_mst(s, args.slack, workers=args.threads)
    elif args.algo == "nn":
        if start is None:
            raise InputError("--algo nn needs --start")
        p = order_nn(s, start, args.slack, workers=args.threads)
    else:
        p = order_nncrust_r3(s, None, args.slack, workers=args.threads)
    out = p.to_dict()
    if data.get("ids") is not None:
        out["ids"] = [data["ids"][i] for i in p.order]
    write_json(args.output, out)
    return 0


def _path_for(data, order_file, n):
    if order_file:
        od = read_json(order_file)
        return OrderedPath(od["order"], bool(od.get("closed", False)))
    if "order" in data:
        return OrderedPath(data["order"], bool(data.get("closed", False)))
    return OrderedPath(range(n), bool(data.get("closed", False)))


def cmd_interpolate(args):
    data = read_json(args.input)
    s = sample_from_dict(data)
    scheme = SCHEME_NAMES[args.scheme]
    try:
        path = _path_for(data, args.order, len(s))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad order: {exc}") from exc
    if scheme == "de_casteljau":
        if s.manifold != "se3":
            raise InputError("decasteljau needs se3 samples")
        vel = velocities_from_dict(data)
        if len(s) != 2 or len(vel) != 2:
            raise InputError("decasteljau needs exactly two frames and two velocities")
        i, j = path.order
        curve = interpolate_decasteljau(
            BoundaryData(s.element(i), s.element(j), vel[i], vel[j]), args.k)
    else:
        if s.manifold not in ("se3", "se2"):
            raise InputError(f"{args.scheme} interpolation needs se3 or se2 samples")
        curve = INTERPOLATORS[scheme](path, s, args.k)
    write_json(args.output, curve.to_records())
    if args.svg:
        xy, dirs = svg.motion_geometry(curve)
        write_text(args.svg, svg.render(xy, False, dirs))
    return 0


def cmd_demo(args):
    c = get_curve(args.name)
    s, truth = c.sample(args.n, args.seed)
    write_json(args.output, sample_to_dict(s))
    truth_path = args.truth
    if truth_path is None and args.output not in (None, "-"):
        truth_path = str(Path(args.output).with_suffix("")) + ".truth.json"
    if truth_path:
        write_json(truth_path, c.truth_record(truth))
    return 0


def cmd_check(args):
    data = read_json(args.input)
    s = sample_from_dict(data)
    truth = read_json(args.truth)
    try:
        c = get_curve(truth["curve"])
        order = truth["order"]
        closed = bool(truth.get("closed", c.closed))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad truth file: {exc}") from exc
    rep = check_uniform_sample(s, order, args.epsilon, closed, c.epsilon_bound)
    out = rep.to_dict()
    out["curve"] = c.name
    out["feature_size"] = c.feature_size
    out["injectivity_radius"] = c.injectivity_radius
    write_json(args.output, out)
    return 0


def cmd_plot(args):
    data = read_json(args.input)
    if isinstance(data, list):
        try:
            curve = MotionCurve.from_records(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad motion curve: {exc}") from exc
        xy, dirs = svg.motion_geometry(curve)
        closed = len(curve) > 2 and np.allclose(curve.translations[0], curve.translations[-1])
    else:
        s = sample_from_dict(data)
        path = _path_for(data, args.order, len(s))
        xy, dirs = svg.sample_geometry(s.manifold, s.points[list(path.order)])
        closed = path.closed
    write_text(args.output, svg.render(xy, closed, dirs, args.every))
    return 0


def cmd_frames(args):
    frames = frames_from_list(read_json(args.input))
    w = MetricWeights(1.0 if args.alpha is None else args.alpha, 1.0 if args.beta is None else args.beta)
    r = order_frames(frames, w, args.algo, args.start, args.source, args.slack)
    write_json(args.output, r.to_dict(with_matrix=args.matrix))
    return 0


COMMANDS = {
    "order": cmd_order,
    "interpolate": cmd_interpolate,
    "demo": cmd_demo,
    "check": cmd_check,
    "plot": cmd_plot,
    "frames": cmd_frames,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        os.environ["GEOORD_THREADS"] = str(args.threads)
    try:
        return COMMANDS[args.command](args)
    except (BranchingTree, NonManifoldOutput) as exc:
        print(f"geoord: {exc}", file=sys.stderr)
        return 2
    except (GeoordError, ValueError, OSError) as exc:
        print(f"geoord: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
