"""Compare the compiled and numpy distance kernels.

    python3 benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and size for each backend
and the speedup of the compiled one. Results must agree to 1e-12.
"""

import argparse
import time

import numpy as np

from loja import _pykernels

try:
    from loja import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled backend not built; only timing numpy")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'n':>7}{'numpy [ms]':>13}{'cython [ms]':>13}{'speedup':>9}")
    for n in args.sizes:
        P = rng.normal(size=(n, args.dim))
        Q = rng.normal(size=(n, args.dim)) + 0.1
        cases = {
            "min_dists": lambda m: m.min_dists(P, Q),
            "directed_hausdorff": lambda m: m.directed_hausdorff(P, Q),
            "nearest_stats": lambda m: m.nearest_stats(P, Q, 1e-3),
        }
        for name, call in cases.items():
            t_py, r_py = best_of(lambda: call(_pykernels), args.repeat)
            if _ckernels is None:
                print(f"{name:<20}{n:>7}{1e3 * t_py:>13.2f}{'-':>13}{'-':>9}")
                continue
            t_c, r_c = best_of(lambda: call(_ckernels), args.repeat)
            pairs = zip(r_py, r_c) if isinstance(r_py, tuple) else [(r_py, r_c)]
            for a, b in pairs:
                np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
            print(f"{name:<20}{n:>7}{1e3 * t_py:>13.2f}{1e3 * t_c:>13.2f}{t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
