"""Time the compiled and numpy stencil kernels on the same inputs.

    python benchmarks/bench_kernels.py [--sizes 26,50,100,200] [--repeat 200]
"""

import argparse
import importlib
import timeit

import numpy as np

from hjconvex import _pykernels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="26,50,100,200")
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    try:
        ck = importlib.import_module("hjconvex._ckernels")
    except ImportError:
        ck = None
        print("compiled kernels not built; timing the numpy backend only")

    rng = np.random.default_rng(0)
    print(f"{'N':>5} {'kernel':>9} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for N in (int(s) for s in args.sizes.split(",")):
        u = rng.standard_normal((N, N))
        c = [rng.standard_normal((N - 2, N - 2)) for _ in range(4)]
        h = 2.0 / (N - 1)
        cases = {
            "stencils": (lambda m: m.stencils(u, h)),
            "adjoint": (lambda m: m.stencils_adjoint(*c, h)),
        }
        for name, call in cases.items():
            t_py = min(timeit.repeat(lambda: call(_pykernels), number=args.repeat, repeat=3)) / args.repeat
            if ck is None:
                print(f"{N:>5} {name:>9} {t_py * 1e6:>10.1f} {'-':>10} {'-':>8}")
                continue
            t_c = min(timeit.repeat(lambda: call(ck), number=args.repeat, repeat=3)) / args.repeat
            print(f"{N:>5} {name:>9} {t_py * 1e6:>10.1f} {t_c * 1e6:>10.1f} {t_py / t_c:>7.2f}x")


if __name__ == "__main__":
    main()
