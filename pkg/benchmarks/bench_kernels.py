"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Each kernel is
timed on both backends with identical inputs, the outputs are checked for
agreement, and a small end-to-end block-norm computation is timed last.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from alphamod.decomposition import build_alpha_covering
from alphamod.kernels import backend_module


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(rng):
    cov = build_alpha_covering("1/2", kmax=64)
    rc, rh, fc, fh = (np.ascontiguousarray(a) for a in cov.window_params())
    xi = np.linspace(-cov.covered_band, cov.covered_band, 4096)
    tau = rng.uniform(-0.5, 1.5, 1 << 20)
    n = 1 << 16
    dxi = 2 * cov.covered_band / n
    spectrum = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lo, hi = cov.supports()
    starts = np.floor(lo / dxi).astype(np.int64)
    lengths = (np.floor(hi / dxi) - starts + 1).astype(np.int64)
    width = int(1 << int(np.ceil(np.log2(lengths.max()))))
    offsets = np.zeros_like(starts)
    rows = rng.standard_normal((256, 1024)) + 1j * rng.standard_normal((256, 1024))
    exps = np.array([2.0 / 3.0, 1.0, 2.0, np.inf])
    return {
        "smooth_step": lambda m: m.smooth_step(tau),
        "interval_windows": lambda m: m.interval_windows(xi, rc, rh, fc, fh),
        "gather_blocks": lambda m: m.gather_blocks(spectrum, dxi, starts, lengths, rc, rh, fc, fh,
                                                   width, offsets),
        "row_power_sums": lambda m: m.row_power_sums(rows, exps),
    }


END_TO_END = """
import time
from alphamod.grid import Grid, synthesize
from alphamod.decomposition import build_alpha_covering
from alphamod.norms import block_lp_norms
grid = Grid(256, 1 << 16)
cov = build_alpha_covering("1/2", kmax=64, band=grid.nyquist)
f = synthesize(grid, {"kind": "gaussian", "width": 0.05})
t0 = time.perf_counter()
block_lp_norms(f, cov, [2/3, 1, 2], oversample=4)
print(time.perf_counter() - t0)
"""


def end_to_end(pure):
    env = dict(os.environ, ALPHAMOD_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    py = backend_module("python")
    try:
        cy = backend_module("cython")
    except ImportError:
        print("compiled backend unavailable; build it with `pip install -e . --no-build-isolation`")
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, call in kernel_cases(rng).items():
        diff = float(np.max(np.abs(np.asarray(call(py)) - np.asarray(call(cy)))))
        tp, tc = best_of(lambda: call(py), args.repeat), best_of(lambda: call(cy), args.repeat)
        print(f"{name:<18}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{diff:>12.2e}")
    tp, tc = end_to_end(True), end_to_end(False)
    print(f"{'block_lp_norms':<18}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{'':>12}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
