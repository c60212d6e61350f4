"""Compare the numba and numpy backends of the hot kernels.

    python3 benchmarks/bench_accel.py [--repeat 5] [--grid 512] [--n 500]

Reports the best-of-``repeat`` wall time per call and the largest
discrepancy between the two backends.
"""

import argparse
import math
import time

import numpy as np

from wizer import _accel


def best_time(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--grid", type=int, default=512)
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    nodes = np.arange(args.grid) * (2 * math.pi / args.grid)
    angles = rng.uniform(0, 2 * math.pi, args.n)
    weights = rng.uniform(0.5, 2.0, args.n)
    rows = np.sign(rng.normal(size=(200, args.grid))) * (rng.random((200, args.grid)) > 0.3)

    cases = []
    for h in (0.01, 0.2, 2.0):
        cases.append((f"kde_sums h={h:g} m=1",
                      lambda f, h=h: f(nodes, angles, weights, h, 1, 4),
                      _accel.kde_sums_numba, _accel.kde_sums_numpy))
    cases.append(("kernel_matrix h=0.05 m=1",
                  lambda f: f(nodes, angles, 0.05, 1, 4),
                  _accel.kernel_matrix_numba, _accel.kernel_matrix_numpy))
    cases.append(("sign_changes_rows 200 rows",
                  lambda f: f(rows), _accel.sign_changes_rows_numba, _accel.sign_changes_rows_numpy))

    print(f"G={args.grid} n={args.n} repeat={args.repeat}")
    print(f"{'kernel':<30}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, call, fast, slow in cases:
        a, b = call(fast), call(slow)  # warm-up (compiles numba)
        diff = max(float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))))
                   for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
        t_fast = best_time(lambda: call(fast), args.repeat)
        t_slow = best_time(lambda: call(slow), args.repeat)
        print(f"{name:<30}{1e3 * t_fast:>12.2f}{1e3 * t_slow:>12.2f}{t_slow / t_fast:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
