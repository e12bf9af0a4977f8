"""Compare the compiled and pure-Python matching kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Times raw enumeration on random allowed-edge matrices, then a full
symmetry-reduced scan of Z/11 (sizes <= 5) with each backend.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from matchlab import _pykernels

try:
    from matchlab import _ckernels
except ImportError:
    _ckernels = None

SCAN = ("from matchlab.scanner import scan_group; import time; t=time.perf_counter(); "
        "scan_group('z11', 5); print(time.perf_counter()-t)")


def random_matrices(count: int, k: int, density: float, seed: int):
    rng = np.random.default_rng(seed)
    return [np.ascontiguousarray((rng.random((k, k)) < density).astype(np.uint8)) for _ in range(count)]


def time_enumeration(impl, mats, cap, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        for m in mats:
            impl.enumerate_perfect(m, cap)
        best = min(best, time.perf_counter() - t)
    return best


def time_scan(pure: bool) -> float:
    env = dict(os.environ, MATCHLAB_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", SCAN], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the Python kernels are available")
    print(f"{'workload':<34}{'python':>10}{'cython':>10}{'speedup':>9}")
    for k, density, count in [(6, 0.7, 2000), (8, 0.7, 300), (10, 0.6, 40)]:
        mats = random_matrices(count, k, density, seed=k)
        py = time_enumeration(_pykernels, mats, 10_000, args.repeat)
        cy = time_enumeration(_ckernels, mats, 10_000, args.repeat) if _ckernels else float("nan")
        print(f"{f'enumerate {count}x k={k} p={density}':<34}{py:>9.3f}s{cy:>9.3f}s{py / cy:>8.1f}x")
    py = time_scan(pure=True)
    cy = time_scan(pure=False) if _ckernels else float("nan")
    print(f"{'scan z11 sizes<=5':<34}{py:>9.3f}s{cy:>9.3f}s{py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
