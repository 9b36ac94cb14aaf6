"""Compare the compiled and numpy update cores.

Times single-point updates on a model capped at k support vectors for each
available backend. Medians and the log-log growth slope use only the
updates that reach the bordering step; interior discards cost a single
similarity pass and are reported in the overall points/s column. Run
from the repository root after installing the package::

    python3 benchmarks/bench_backends.py --sizes 25 50 100 200 400
"""
import argparse

import numpy as np

from streamsvdd._backend import BACKENDS
from streamsvdd.bench import growth_fit, update_times


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    parser.add_argument("--points", type=int, default=3000, help="timed updates per size")
    parser.add_argument("--dim", type=int, default=5)
    parser.add_argument("--sigma", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'backend':>8} {'k':>5} {'bordered':>8} {'median_us':>10} {'p90_us':>8} {'updates/s':>10} "
          f"{'points/s':>10}")
    medians = {}
    for name in sorted(BACKENDS):
        medians[name] = []
        for k in args.sizes:
            t, hard = update_times(k, args.points, backend=name, dim=args.dim, sigma=args.sigma,
                                   seed=args.seed)
            med = float(np.median(t[hard]))
            medians[name].append(med)
            print(f"{name:>8} {k:>5} {hard.mean():>8.0%} {med * 1e6:>10.1f} "
                  f"{np.percentile(t[hard], 90) * 1e6:>8.1f} {1.0 / t[hard].mean():>10,.0f} "
                  f"{1.0 / t.mean():>10,.0f}")
    print()
    for name, meds in medians.items():
        if len(meds) > 1:
            slope, r2, r3 = growth_fit(args.sizes, meds)
            print(f"{name}: log-log slope {slope:.2f} (quadratic residual {r2:.3g}, cubic {r3:.3g})")
    if len(medians) == 2:
        ratio = np.array(medians["python"]) / np.array(medians["cython"])
        print("numpy/compiled time ratio per size: " + ", ".join(f"{r:.2f}" for r in ratio))


if __name__ == "__main__":
    main()
