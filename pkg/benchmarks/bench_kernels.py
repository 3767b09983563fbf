"""Compare the numba and pure-numpy paths of the hot kernels.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--points N] [--repeat N]
"""

import argparse
import timeit

import numpy as np

from dtspectra import Coulomb, Extrapolation, OscillatorReconstructed, Tabulated
from dtspectra import _kernels as K


def _time(fn, repeat):
    fn()  # warm-up (compilation or cache load)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_simulate(steps, repeat):
    rows = []
    r = np.geomspace(0.1, 50.0, 512)
    pots = [Coulomb(1.0), OscillatorReconstructed(1.0, 0.5, 1.0),
            Tabulated(r, -1.0 / r, extrapolation=Extrapolation.CLAMP_SLOPE, slopes=1.0 / r**2)]
    for pot in pots:
        out = np.empty((steps + 1, 3))
        args = (1.0, 0.01, 0.0, 0.98, 0.001, 1.0, steps, *pot.kernel_args(), out)
        t_np = _time(lambda: K.simulate_numpy(*args), repeat)
        t_nb = _time(lambda: K.simulate_numba(*args), repeat)
        rows.append((f"simulate {pot.name} ({steps} steps)", t_np, t_nb))
    return rows


def bench_evaluate(points, repeat):
    rows = []
    r = np.geomspace(0.1, 50.0, points)
    grid = np.geomspace(0.05, 60.0, 512)
    pots = [Coulomb(1.0), OscillatorReconstructed(1.0, 0.5, 1.0),
            Tabulated(grid, -1.0 / grid, slopes=1.0 / grid**2)]
    for pot in pots:
        args = (*pot.kernel_args(), r, True)
        t_np = _time(lambda: K.evaluate_numpy(*args), repeat)
        t_nb = _time(lambda: K.evaluate_numba(*args), repeat)
        rows.append((f"evaluate U' {pot.name} ({points} pts)", t_np, t_nb))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--points", type=int, default=200000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if K.simulate_numba is None:
        raise SystemExit("numba is not available; nothing to compare")
    rows = bench_simulate(args.steps, args.repeat) + bench_evaluate(args.points, args.repeat)
    width = max(len(name) for name, _, _ in rows)
    print(f"{'kernel':<{width}}  {'numpy [ms]':>11}  {'numba [ms]':>11}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{width}}  {1e3 * t_np:11.3f}  {1e3 * t_nb:11.3f}  {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
