"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from cohort_bias_lab import _pykernels, randomization

try:
    from cohort_bias_lab import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    ages = np.arange(0, 100, dtype=np.float64)
    counts = rng.uniform(0, 1000, ages.size)
    yield "project_cells 100 ages x 40 years", lambda k: k.project_cells(ages, counts, 0.11, 0.082, 40)

    pop = randomization.synthetic_population(n=2000, seed=1)
    a = np.array([s.age for s in pop], dtype=np.int64)
    codes = np.array([s.cell for s in pop], dtype=np.int64)
    lo = int(a.min())
    n_ages = int(a.max()) - lo + 1
    perms = np.stack([randomization._permutation(len(pop), 0, r) for r in range(256)]).astype(np.int64)
    yield ("group_metrics 256 splits of 2000 subjects",
           lambda k: k.group_metrics(perms, 1000, a - lo, lo, n_ages, codes, 10, 65 - lo))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'case':45s} " + " ".join(f"{name:>12s}" for name, _ in backends) + "   speedup")
    for label, fn in cases():
        times = []
        for _, k in backends:
            fn(k)
            number = 5
            times.append(min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number)
        row = f"{label:45s} " + " ".join(f"{t * 1e3:10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
