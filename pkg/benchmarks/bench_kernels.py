"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py --robots 12 36 --repeat 200

Also times a short end-to-end run with each backend.
"""
import argparse
import math
import time

import numpy as np

from swarmforage import _kernels_py, kernels
from swarmforage.config import make_config
from swarmforage.harness import run_one
from swarmforage.sim import ARENA_SIDE, ROBOT_DIAMETER, init_world

try:
    from swarmforage import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeat):
    best = math.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def bench_kernels(impl, n, repeat):
    world = init_world(make_config(robot_count=n), 0)
    x, y, h = world.x.copy(), world.y.copy(), world.heading
    rng = np.random.default_rng(1)
    ang = rng.uniform(0, 2 * math.pi, size=n)
    dx, dy = 0.01 * np.cos(ang), 0.01 * np.sin(ang)
    t_sense = best_of(lambda: impl.sense_all(x, y, h, ROBOT_DIAMETER, 0.04), repeat)
    t_move = best_of(lambda: impl.move_clamped(x, y, dx, dy, ROBOT_DIAMETER, ARENA_SIDE),
                     repeat)
    return t_sense, t_move


def bench_run(impl, n, seconds):
    saved = kernels.sense_all, kernels.move_clamped
    kernels.sense_all, kernels.move_clamped = impl.sense_all, impl.move_clamped
    try:
        cfg = make_config(robot_count=n, train_duration=seconds, eval_duration=seconds)
        t0 = time.perf_counter()
        m = run_one(cfg)
        return time.perf_counter() - t0, m.trace_hash
    finally:
        kernels.sense_all, kernels.move_clamped = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--robots", type=int, nargs="+", default=[12, 36])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--run-seconds", type=float, default=300.0,
                    help="simulated seconds per phase for the end-to-end timing")
    args = ap.parse_args()

    impls = [("python", _kernels_py)]
    if _kernels_c is not None:
        impls.append(("cython", _kernels_c))
    else:
        print("compiled kernels not built; timing the Python fallback only")
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'robots':>6} {'backend':>8} {'sense us':>10} {'move us':>10}")
    for n in args.robots:
        for name, impl in impls:
            s, m = bench_kernels(impl, n, args.repeat)
            print(f"{n:6d} {name:>8} {s * 1e6:10.1f} {m * 1e6:10.1f}")

    print(f"\nend-to-end modular run, {args.run_seconds:g} s train + eval")
    for n in args.robots:
        hashes = set()
        for name, impl in impls:
            wall, digest = bench_run(impl, n, args.run_seconds)
            hashes.add(digest)
            speed = 2 * args.run_seconds / wall
            print(f"{n:6d} {name:>8} {wall:8.2f} s  ({speed:.0f}x real time)")
        print(f"{'':6} traces identical across backends: {len(hashes) == 1}")


if __name__ == "__main__":
    main()
