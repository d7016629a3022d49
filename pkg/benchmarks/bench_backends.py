"""Compare the compiled and pure-numpy backends on the hot paths.

Usage: python benchmarks/bench_backends.py [--n 200000] [--repeat 5]

Times the Bessel kernels on large batches, one full expectation pass, and a
short fit, under both backends.  The same work is dispatched either to the
compiled kernels or to the numpy fallback, so the answer columns double as
an agreement check.
"""

import argparse
import time

import numpy as np

from hyperfa import backend, datasim, mghfa
from hyperfa.specfun import dlogk_dnu, log_bessel_k


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(name, fn, repeat, results):
    out = {}
    for mode in ("numpy", "numba"):
        if mode == "numba" and not backend.NUMBA_AVAILABLE:
            continue
        backend.set_backend(mode)
        fn()  # warm (compilation, caches)
        out[mode] = best_of(fn, repeat)
    results.append((name, out))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=200_000,
                        help="batch size for the kernel benchmarks")
    parser.add_argument("--repeat", type=int, default=5,
                        help="repetitions; best time is reported")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    nu = rng.uniform(-8.0, 8.0, size=args.n)
    x = np.exp(rng.uniform(np.log(0.1), np.log(100.0), size=args.n))

    design = datasim.SimDesign("gh", p=20, G=3, n_per_component=700, seed=1)
    data, _ = datasim.generate(design)
    fit_design = datasim.SimDesign("gh", p=10, G=3, n_per_component=200, seed=2)
    fit_data, _ = datasim.generate(fit_design)

    backend.set_backend("numba" if backend.NUMBA_AVAILABLE else "numpy")
    model = mghfa.fit(data, 3, 2, mghfa.FitConfig(max_iter=3, seed=0)).model

    results = []
    bench(f"log_bessel_k, {args.n:,} points",
          lambda: log_bessel_k(nu, x), args.repeat, results)
    bench(f"dlogk_dnu, {args.n:,} points",
          lambda: dlogk_dnu(nu, x), args.repeat, results)
    bench("e_step, n=2100 p=20 G=3 q=2",
          lambda: mghfa.e_step(data, model), args.repeat, results)
    bench("fit, n=600 p=10 G=3 q=1, 30 iters",
          lambda: mghfa.fit(fit_data, 3, 1,
                            mghfa.FitConfig(max_iter=30, seed=0)),
          max(1, args.repeat // 2), results)

    width = max(len(name) for name, _ in results)
    print(f"{'benchmark':<{width}}  {'numpy':>9}  {'numba':>9}  speedup")
    for name, out in results:
        numpy_t = out["numpy"]
        if "numba" in out:
            print(f"{name:<{width}}  {numpy_t:>8.3f}s  {out['numba']:>8.3f}s  "
                  f"{numpy_t / out['numba']:>6.1f}x")
        else:
            print(f"{name:<{width}}  {numpy_t:>8.3f}s  {'-':>9}  (numba not installed)")
    backend.set_backend("auto")


if __name__ == "__main__":
    main()
