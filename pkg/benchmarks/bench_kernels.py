"""Time each hot kernel under numba and under the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

The numba timing excludes the first (compiling) call.  Outputs of the two
paths are compared before timing so a fast wrong kernel cannot win.
"""
import argparse
import json
import sys
import timeit

import numpy as np

from dirichlet_lab import _accel
from dirichlet_lab.frequency import primes_up_to, smallest_prime_factors


def cases(rng):
    lam = np.log(np.arange(1, 4097))
    c = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    cps = 2 ** np.arange(1, 13)
    t = rng.uniform(-200, 200, 2000)
    theta = rng.uniform(0, 2 * np.pi, (20_000, 4))
    R = rng.integers(-4, 5, (64, 4))
    cR = rng.standard_normal(64) + 0j
    w = rng.uniform(0, 1, 64)
    N = 16_384
    primes = primes_up_to(N)
    col = np.zeros(N + 1, dtype=np.int64)
    col[primes] = np.arange(len(primes))
    pa = rng.uniform(0, 2 * np.pi, (100, len(primes)))
    terms = rng.standard_normal((2000, 256)) + 1j * rng.standard_normal((2000, 256))
    return {
        "weighted_prefix_sup": (terms, rng.uniform(0, 1, 256)),
        "torus_eval": (theta, R, cR),
        "torus_prefix_sup": (theta, R, cR, w),
        "flow_eval": (t, lam, c),
        "flow_prefix_max": (t, lam, c, cps),
        "grid_prefix_max": (-200.0, 0.05, 8001, lam, c, cps),
        "multiplicative_angles": (pa, smallest_prime_factors(N), col),
    }


def _close(a, b):
    if isinstance(a, tuple):
        return all(_close(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-8, atol=1e-8)


def run(repeat):
    if not _accel.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    rows = []
    for name, args in cases(np.random.default_rng(0)).items():
        fast, slow = getattr(_accel, f"{name}_numba"), getattr(_accel, f"{name}_numpy")
        if not _close(fast(*args), slow(*args)):
            raise AssertionError(f"{name}: backends disagree")
        t_nb = min(timeit.repeat(lambda: fast(*args), number=1, repeat=repeat))
        t_np = min(timeit.repeat(lambda: slow(*args), number=1, repeat=repeat))
        rows.append({"kernel": name, "numba_s": t_nb, "numpy_s": t_np, "speedup": t_np / t_nb})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    rows = run(args.repeat)
    print(f"{'kernel':24s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}")
    for r in rows:
        print(f"{r['kernel']:24s} {r['numba_s']:11.5f} {r['numpy_s']:11.5f} {r['speedup']:8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
