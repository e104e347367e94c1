"""Compare the numba and numpy RK4 kernels.

    python3 benchmarks/bench_transport.py [--steps 1000 4000] [--dims 2 4 8] [--repeat 5]

The first table times the bare kernel on precomputed coefficient samples.
The second times a whole ``transport`` call along a polyline, so connection
evaluation is included and the kernel is only part of the cost.
"""
import argparse
import os
import time

import numpy as np

from transportc import _kernels
from transportc.transport import ConstantConnection, PathSpec, transport


def best_of(fn, repeat):
    fn()  # warm up, triggers compilation on the first numba call
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_table(dims, steps_list, repeat, rng):
    print(f"{'n':>3} {'steps':>6} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7} {'max diff':>10}")
    for n in dims:
        for steps in steps_list:
            ms = (rng.normal(size=(2 * steps + 1, n, n)) + 1j * rng.normal(size=(2 * steps + 1, n, n))) * 0.3
            h = 1.0 / steps
            a = best_of(lambda: _kernels.rk4(ms, h, "numba"), repeat)
            b = best_of(lambda: _kernels.rk4(ms, h, "numpy"), repeat)
            diff = np.abs(_kernels.rk4(ms, h, "numba") - _kernels.rk4(ms, h, "numpy")).max()
            print(f"{n:>3} {steps:>6} {a * 1e3:>10.3f} {b * 1e3:>10.3f} {b / a:>7.2f} {diff:>10.1e}")


def transport_table(dims, steps_list, repeat, rng):
    path = PathSpec.polyline([(0.0, 0.0), (0.5, 0.8), (1.0, 0.2), (0.3, 0.1)])
    print(f"{'n':>3} {'steps':>6} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    old = os.environ.get("TRANSPORTC_BACKEND")
    try:
        for n in dims:
            conn = ConstantConnection(rng.normal(size=(n, n)), rng.normal(size=(n, n)))
            for steps in steps_list:
                row = []
                for name in ("numba", "numpy"):
                    os.environ["TRANSPORTC_BACKEND"] = name
                    row.append(best_of(lambda: transport(conn, path, steps), repeat))
                a, b = row
                print(f"{n:>3} {steps:>6} {a * 1e3:>10.3f} {b * 1e3:>10.3f} {b / a:>7.2f}")
    finally:
        if old is None:
            os.environ.pop("TRANSPORTC_BACKEND", None)
        else:
            os.environ["TRANSPORTC_BACKEND"] = old


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, nargs="+", default=[250, 1000, 4000])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels.rk4_numba is None:
        raise SystemExit("numba is not importable, nothing to compare")
    rng = np.random.default_rng(args.seed)
    print("RK4 kernel")
    kernel_table(args.dims, args.steps, args.repeat, rng)
    print("\ntransport along a 3-segment polyline")
    transport_table(args.dims, args.steps, args.repeat, rng)


if __name__ == "__main__":
    main()
