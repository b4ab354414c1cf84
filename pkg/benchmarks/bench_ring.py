"""Compare the compiled and pure-Python ring multiplication kernels.

    python benchmarks/bench_ring.py [--n 20000] [--seed 0]

Times raw kernel calls on random normal forms, then the end-to-end ring
self-test in a subprocess per backend (KITAEVLAB_PURE=1 selects the
pure-Python kernel at import).
"""

import argparse
import os
import random
import subprocess
import sys
import time

from kitaevlab import _ringpy
from kitaevlab.verify import random_element

try:
    from kitaevlab import _ringcore
except ImportError:
    _ringcore = None


def time_kernel(kernel, pairs, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a, b in pairs:
            kernel(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--terms", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    pairs = [(random_element(rng, args.terms, 6, 50), random_element(rng, args.terms, 6, 50))
             for _ in range(args.n)]
    kernels = [("python", _ringpy.mul_parts)]
    if _ringcore is not None:
        kernels.append(("compiled", _ringcore.mul_parts))
    else:
        print("compiled kernel not built; only the pure-Python timing is shown")

    results = {}
    for name, k in kernels:
        results[name] = time_kernel(k, pairs)
        print(f"{name:<9} {args.n} products: {results[name]:.3f}s "
              f"({1e6 * results[name] / args.n:.2f} us each)")
    if len(results) == 2:
        print(f"speedup   {results['python'] / results['compiled']:.2f}x")
        mismatches = sum(
            _ringpy.mul_parts(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
            != _ringcore.mul_parts(a.const_coeff, a.u_terms, a.v_terms, b.const_coeff, b.u_terms, b.v_terms)
            for a, b in pairs)
        print(f"results identical: {mismatches == 0}")

    for label, pure in (("python", "1"), ("compiled", "0")):
        if label == "compiled" and _ringcore is None:
            continue
        env = dict(os.environ, KITAEVLAB_PURE=pure)
        t0 = time.perf_counter()
        subprocess.run([sys.executable, "-m", "kitaevlab", "ring", "selftest", "--samples", "10000"],
                       env=env, check=True, capture_output=True)
        print(f"{label:<9} ring selftest (10^4 triples, incl. startup): {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
