"""Time the compiled and numpy kernels on the same problems.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from acougrad import kernels
from acougrad.forward import Scheme

CASES = [(50, 200), (200, 800), (1000, 4000)]


def _args(N, M, scheme):
    x = np.linspace(0.0, 1.0, N + 1)
    p = np.exp(-50.0 * (x - 0.4) ** 2)
    r2, tau2 = 0.25, (2.0 / M) ** 2
    src = np.zeros(M + 3)
    src[1:M + 1] = np.sin(np.linspace(0.0, 6.0, M))
    fwd = (p, p, M, r2, tau2, scheme.hat, scheme.taylor, scheme.mirror, 64)
    bwd = (p, src, M + 3, r2, tau2, scheme.hat, scheme.taylor, scheme.mirror, True, 64)
    return fwd, bwd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()
    scheme = Scheme()
    names = list(kernels.BACKENDS)
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    print(f"{'N':>6} {'M':>6} {'kernel':>9} " + " ".join(f"{n + ' [ms]':>14}" for n in names) + "   speedup")
    for N, M in CASES:
        fwd, bwd = _args(N, M, scheme)
        for kname, args in (("forward", fwd), ("backward", bwd)):
            times = {}
            for name in names:
                fn = getattr(kernels.BACKENDS[name], kname + "_march")
                times[name] = min(timeit.repeat(lambda: fn(*args), number=1, repeat=opts.repeat)) * 1e3
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{N:>6} {M:>6} {kname:>9} " + " ".join(f"{times[n]:>14.3f}" for n in names) + f"   {speed:7.1f}x")


if __name__ == "__main__":
    main()
