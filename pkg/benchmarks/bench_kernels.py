"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --n 200 400 --repeat 3
"""
import argparse
import timeit

import numpy as np

from geoord import kernels
from geoord.liegroup import exp_so3


def frames(n, rng):
    T = np.tile(np.eye(4), (n, 1, 1))
    T[:, :3, :3] = exp_so3(rng.normal(size=(n, 3)) * 0.6)
    T[:, :3, 3] = rng.normal(size=(n, 3))
    return np.ascontiguousarray(T)


def cases(n, rng):
    T = frames(n, rng)
    W = np.zeros((n, n))
    kernels.get_backend(kernels.BACKEND).se3_distance_rows(T, 1.0, 1.0, 0, n, W)
    return {
        "se3_distance_rows": lambda k: k.se3_distance_rows(T, 1.0, 1.0, 0, n, np.zeros((n, n))),
        "prim_mst": lambda k: k.prim_mst(W),
        "nn_chain": lambda k: k.nn_chain(W, 0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    names = kernels.available_backends()
    if "cython" not in names:
        print("compiled kernels not built; timing the python backend only")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'n':>6}" + "".join(f"{b + ' [s]':>14}" for b in names) + f"{'speedup':>10}")
    for n in args.n:
        for name, fn in cases(n, rng).items():
            best = {}
            for b in names:
                k = kernels.get_backend(b)
                best[b] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
            speed = best["python"] / best["cython"] if "cython" in best else float("nan")
            print(f"{name:<20}{n:>6}" + "".join(f"{best[b]:>14.5f}" for b in names) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
