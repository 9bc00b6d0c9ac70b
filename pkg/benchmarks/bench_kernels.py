"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --repeat 5

Two workloads: the two-box main scheme (case iii, 2e4 iterations in R^5)
and the Browder path of a planar rotation at t = 0.1, 0.01, 0.001.
"""
import argparse
import math
import statistics
import time

import numpy as np

from halpern import _backend
from halpern.operators import make_projection_operator, make_rotation_operator
from halpern.schedules import Constant, Harmonic
from halpern.sets import Ball, Box, WholeSpace
from halpern.solvers import SolverConfig, browder_path, main_scheme


def case_iii(backend, iters):
    d = 5
    T = make_projection_operator(Box(np.zeros(d), np.ones(d)), WholeSpace(d))
    S = make_projection_operator(Box(np.full(d, 0.5), np.full(d, 1.5)), WholeSpace(d))
    cfg = SolverConfig(anchor=np.full(d, 2.0), start=np.full(d, -1.0), alpha=Harmonic(1, 1),
                       beta=Constant(0.5), max_iters=iters, trace_stride=100, backend=backend)
    return main_scheme(T, S, cfg, "iii").final


def rotation_path(backend, _iters):
    R = make_rotation_operator(math.pi / 2, Ball(np.zeros(2), 2.0))
    return browder_path(R, [1.0, 0.0], (0.1, 0.01, 0.001), 1e-10, backend=backend)[-1][1]


def timed(fn, backend, iters, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend, iters)
        times.append(time.perf_counter() - t0)
    return out, min(times), statistics.median(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--iters", type=int, default=20_000, help="main-scheme iterations")
    args = p.parse_args(argv)
    if not _backend.available():
        raise SystemExit("compiled kernels are not built; run `python3 setup.py build_ext --inplace`")
    print(f"{'workload':<16}{'backend':<9}{'best [s]':>12}{'median [s]':>12}{'speedup':>10}")
    for name, fn in (("main case iii", case_iii), ("browder path", rotation_path)):
        res = {b: timed(fn, b, args.iters, args.repeat) for b in ("python", "cython")}
        diff = float(np.max(np.abs(res["python"][0] - res["cython"][0])))
        for b in ("python", "cython"):
            speed = res["python"][1] / res[b][1]
            print(f"{name:<16}{b:<9}{res[b][1]:>12.5f}{res[b][2]:>12.5f}{speed:>9.1f}x")
        print(f"{'':<16}max |python - cython| = {diff:.1e}")


if __name__ == "__main__":
    main()
