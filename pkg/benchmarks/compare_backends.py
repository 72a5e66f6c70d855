#!/usr/bin/env python3
"""Time the numba-compiled kernels against the pure-numpy fallbacks.

The proximal inner loop and the coordinate-descent lasso dominate runtime:
the genetic search calls the inner solver once per new individual per
generation.  Run after `pip install -e .`:

    python3 benchmarks/compare_backends.py [--sizes 5,10,20] [--repeats 5]

The active backend for the library itself is chosen by DAGLEARN_BACKEND
(numba when available); this script times both implementations side by side
and checks they agree.
"""

import argparse
import time

import numpy as np

from daglearn._kernels import available_backends
from daglearn.model import Permutation
from daglearn.solver import lipschitz_bound


def make_instance(p, n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, p))
    ranks0 = np.asarray(Permutation.random(p, rng).ranks) - 1
    y = x[:, ranks0]
    gram2 = 2.0 / n * (y.T @ y)
    lam = 0.1 * float(np.max(np.abs(gram2 - np.diag(np.diag(gram2)))))
    return gram2, lam, lipschitz_bound(x), y


def time_call(fn, *args, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="5,10,20,40", help="comma-separated node counts")
    parser.add_argument("--n", type=int, default=1000, help="observations per instance")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best kept)")
    args = parser.parse_args()

    backends = available_backends()
    if "numba" not in backends:
        print("numba unavailable; nothing to compare")
        return

    print(f"{'kernel':<12} {'p':>4} {'iters':>7} {'numpy':>10} {'numba':>10} {'speedup':>8}  agree")
    for p in (int(s) for s in args.sizes.split(",")):
        gram2, lam, lip, y = make_instance(p, args.n, seed=p)
        t0 = np.zeros((p, p))
        solve_args = (gram2, lam, lip, 1e-6, 1_000_000)
        # warm the JIT before timing
        backends["numba"]["prox_solve"](*solve_args, t0.copy())
        t_np, out_np = time_call(
            backends["numpy"]["prox_solve"], *solve_args, t0.copy(), repeats=args.repeats
        )
        t_nb, out_nb = time_call(
            backends["numba"]["prox_solve"], *solve_args, t0.copy(), repeats=args.repeats
        )
        agree = np.max(np.abs(out_np[0] - out_nb[0])) < 1e-8
        print(
            f"{'prox_solve':<12} {p:>4} {out_nb[2]:>7} {t_np:>9.4f}s {t_nb:>9.4f}s "
            f"{t_np / t_nb:>7.1f}x  {agree}"
        )

        target = y[:, 0]
        z = np.ascontiguousarray(y[:, 1:])
        cd_args = (z, target, lam, 1e-12, 100_000)
        backends["numba"]["lasso_cd"](*cd_args)
        t_np, b_np = time_call(backends["numpy"]["lasso_cd"], *cd_args, repeats=args.repeats)
        t_nb, b_nb = time_call(backends["numba"]["lasso_cd"], *cd_args, repeats=args.repeats)
        agree = np.max(np.abs(b_np - b_nb)) < 1e-8
        print(
            f"{'lasso_cd':<12} {p:>4} {'':>7} {t_np:>9.4f}s {t_nb:>9.4f}s "
            f"{t_np / t_nb:>7.1f}x  {agree}"
        )


if __name__ == "__main__":
    main()
