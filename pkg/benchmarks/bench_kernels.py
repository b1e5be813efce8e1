"""Compare the numba-compiled kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The first jitted call (compilation, or loading the on-disk cache) is done
before timing. Every pair is also checked for agreement; for the splitter
the comparison is restricted to the guarded block (total photon number below
``d - 4``), since the recursion loses digits near the truncation edge.
"""

import argparse
import timeit

import numpy as np

from alpharep import _kernels as K
from alpharep._accel import HAVE_NUMBA
from alpharep.fock import GUARD, splitter_matrix


def guarded(arr, d):
    n1, n2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return arr[..., (n1 + n2) < d - GUARD]


def cases():
    M = splitter_matrix(0.6, 0.8, 0.3, "B13")
    for d in (8, 16, 27, 40):
        yield (
            f"beam splitter {d}x{d}",
            lambda d=d: K._bs_elements_jit(M, d, d),
            lambda d=d: K._bs_elements_np(M, d, d),
            lambda x, d=d: guarded(x, d),
        )
    for n in (20, 40, 80):
        lf = K.log_factorials(n + 1)
        a = 1.3 - 0.4j
        yield (
            f"coefficients {n}x{n}",
            lambda n=n, lf=lf: K._coeff_block_jit(n, n, a, lf),
            lambda n=n, lf=lf: K._coeff_block_np(n, n, a, lf),
            lambda x: x,
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        print("numba not importable: the 'jit' column times plain Python loops")
    print(f"{'kernel':<22} {'jit [ms]':>10} {'numpy [ms]':>11} {'speedup':>8} {'max diff':>9}")
    for name, fast, slow, view in cases():
        a, b = fast(), slow()
        diff = float(np.max(np.abs(view(a) - view(b))))
        tf = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        ts = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22} {tf:>10.3f} {ts:>11.3f} {ts / tf:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
