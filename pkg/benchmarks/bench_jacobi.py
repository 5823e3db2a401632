"""Compare the compiled and pure-Python Jacobi eigensolvers (numpy's LAPACK as reference).

Usage: python benchmarks/bench_jacobi.py [--sizes 4 8 16 32] [--repeat 20] [--seed 0]
"""
import argparse
import timeit

import numpy as np

from histkit import _kernels
from histkit.sampling import random_hermitian, rng_from


def bench(fn, a, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(lambda: fn(a), number=number, repeat=3)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = rng_from(args.seed)
    solvers = dict(_kernels.BACKENDS)
    solvers["numpy"] = np.linalg.eigh
    names = sorted(solvers)
    print(f"{'n':>4}  " + "  ".join(f"{name + ' [us]':>14}" for name in names) + "   max |w - w_numpy|")
    for n in args.sizes:
        a = random_hermitian(rng, n)
        ref = np.linalg.eigvalsh(a)
        times = {name: bench(solvers[name], a, args.repeat if name != "python" else max(1, args.repeat // 10))
                 for name in names}
        err = max(np.max(np.abs(np.sort(_kernels.BACKENDS[b](a)[0]) - ref)) for b in _kernels.BACKENDS)
        print(f"{n:>4}  " + "  ".join(f"{times[name] * 1e6:>14.1f}" for name in names) + f"   {err:.1e}")
    if "cython" not in solvers:
        print("compiled extension not built; run `python setup.py build_ext --inplace`")


if __name__ == "__main__":
    main()
