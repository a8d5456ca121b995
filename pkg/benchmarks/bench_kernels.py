"""Wall-clock comparison of the numba and numpy RK4 kernels.

    python benchmarks/bench_kernels.py            # default sizes
    python benchmarks/bench_kernels.py --modes 4001 --repeat 5

The first numba call includes compilation (or a cache load) and is reported
separately.  Both backends are checked to agree before timing.
"""
import argparse
import time

import numpy as np

from exciton_decoherence import FIG2, build_bath_grid
from exciton_decoherence import _kernels
from exciton_decoherence.oracle import integrate_mode_equations, solve_volterra_u


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--modes", type=int, default=1003, help="bath modes J (odd)")
    ap.add_argument("--t-end", type=float, default=1.0, help="integration time in units of 1/gamma")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled (EXCITON_DECOHERENCE_NO_NUMBA); nothing to compare")
        return 1

    p = FIG2.with_(delta=0.5)
    grid = build_bath_grid(p, args.modes, 50 * p.gamma)
    t_end = p.time_fs(args.t_end)

    def bath(backend):
        return integrate_mode_equations(p, grid, "branch", t_end, alpha=3.0, n_samples=11, backend=backend)

    def volterra(backend):
        return solve_volterra_u(p, t_end * 20, n_samples=11, backend=backend)

    t0 = time.perf_counter()
    a = bath("numba")
    volterra("numba")
    first = time.perf_counter() - t0
    b = bath("numpy")
    err = np.max(np.abs(a.field_path - b.field_path))
    print(f"backend agreement (max |field diff|): {err:.2e}")
    print(f"numba first call (compile or cache load): {first:.3f} s")

    n_steps = round(t_end / a.step_size)
    print(f"\nbath RK4, J={args.modes}, {n_steps} steps")
    tn = best_of(lambda: bath("numba"), args.repeat)
    tp = best_of(lambda: bath("numpy"), args.repeat)
    print(f"  numba {tn:8.3f} s   numpy {tp:8.3f} s   speedup {tp / tn:6.1f}x")

    print("\nVolterra RK4, 6 states")
    tn = best_of(lambda: volterra("numba"), args.repeat)
    tp = best_of(lambda: volterra("numpy"), args.repeat)
    print(f"  numba {tn:8.3f} s   numpy {tp:8.3f} s   speedup {tp / tn:6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
